import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from collmodel.errors import InvalidInputError
from collmodel.linalg import check_density_matrix, dagger, partial_trace
from collmodel.model import (
    DIM,
    ArmBasis,
    InputSpec,
    KrausChannel,
    StepConfig,
    bell_state,
    bs_unitary,
    filter_channel,
    hwp_unitary,
    joint_index,
    loss_channel,
    phase_unitary,
    qwp_unitary,
    step_channel,
    step_unitary,
    werner_state,
)

from conftest import step_configs, unit


def _is_unitary(u):
    return np.abs(dagger(u) @ u - np.eye(u.shape[0])).max() < 1e-12


@given(unit, st.floats(-20, 20))
def test_element_unitaries(r, theta):
    for u in (bs_unitary(r), qwp_unitary(), hwp_unitary(), phase_unitary(theta)):
        assert u.shape == (DIM, DIM)
        assert _is_unitary(u)


def test_beam_splitter_amplitudes():
    u = bs_unitary(0.3)
    for a in range(2):
        s, e = joint_index(a, ArmBasis.S_V), joint_index(a, ArmBasis.E_V)
        assert u[s, s] == pytest.approx(1j * math.sqrt(0.3))
        assert u[e, s] == pytest.approx(math.sqrt(0.7))
        assert u[s, e] == pytest.approx(math.sqrt(0.7))
        v = joint_index(a, ArmBasis.VAC)
        assert u[v, v] == 1


def test_plates_and_phase_are_diagonal():
    assert np.allclose(np.diag(qwp_unitary())[:5], [1, 1j, 1, 1, 1])
    assert np.allclose(np.diag(hwp_unitary())[:5], [1, 1, 1, -1, 1])
    ph = np.diag(phase_unitary(0.7))[:5]
    assert np.allclose(ph, [np.exp(0.7j)] * 2 + [1, 1, 1])


def test_step_unitary_ordering():
    cfg = StepConfig(r=0.37, theta=1.1)
    want = phase_unitary(-cfg.theta) @ hwp_unitary() @ qwp_unitary() @ bs_unitary(cfg.r)
    assert np.abs(step_unitary(cfg) - want).max() < 1e-15


@given(step_configs(lossy=True))
def test_step_channel_is_trace_preserving(cfg):
    ch = step_channel(cfg)
    assert ch.completeness_error() < 1e-10


def test_filter_kraus_structure():
    ch = filter_channel(0.25)
    assert len(ch) == 3
    k0 = ch.operators[0]
    assert k0[joint_index(0, ArmBasis.E_H), joint_index(0, ArmBasis.E_H)] == pytest.approx(0.5)
    assert k0[joint_index(0, ArmBasis.S_V), joint_index(0, ArmBasis.S_V)] == 1
    assert len(filter_channel(1.0)) == 1
    assert np.allclose(filter_channel(1.0).operators[0], np.eye(DIM))


def test_filter_zero_sends_environment_photon_to_vacuum():
    psi = np.zeros(DIM)
    psi[joint_index(1, ArmBasis.E_V)] = 1
    out = filter_channel(0.0).apply(np.outer(psi, psi))
    v = joint_index(1, ArmBasis.VAC)
    assert out[v, v] == pytest.approx(1.0)


def test_loss_channel_targets():
    rho = np.zeros((DIM, DIM))
    rho[joint_index(0, ArmBasis.S_H), joint_index(0, ArmBasis.S_H)] = 0.5
    rho[joint_index(0, ArmBasis.E_H), joint_index(0, ArmBasis.E_H)] = 0.5
    vac = joint_index(0, ArmBasis.VAC)
    assert loss_channel(0.6, "s-arm").apply(rho)[vac, vac] == pytest.approx(0.2)
    assert loss_channel(0.6, "e-arm").apply(rho)[vac, vac] == pytest.approx(0.2)
    assert loss_channel(0.6, "both").apply(rho)[vac, vac] == pytest.approx(0.4)
    with pytest.raises(InvalidInputError):
        loss_channel(0.5, "ancilla")


def test_kraus_channel_rejects_incomplete_set():
    with pytest.raises(InvalidInputError):
        KrausChannel((0.5 * np.eye(DIM),))
    with pytest.raises(InvalidInputError):
        KrausChannel(())


def test_kraus_then_composes_in_order():
    a = KrausChannel((bs_unitary(0.5),))
    b = KrausChannel((phase_unitary(0.3),))
    rho = bell_state("+")
    assert np.allclose(a.then(b).apply(rho), b.apply(a.apply(rho)), atol=1e-14)


def test_channel_preserves_ancilla_marginal(rng):
    # the ancilla never interacts, so its reduced state is frozen
    cfg = StepConfig(r=0.4, T=0.3, theta=0.9, eta_s=0.7, eta_e=0.8)
    rho = werner_state(0.8)
    out = step_channel(cfg).apply(rho)
    assert np.allclose(partial_trace(out, "ancilla"), partial_trace(rho, "ancilla"), atol=1e-14)
    check_density_matrix(out)


@pytest.mark.parametrize("F", [0.25, 0.5, 0.9712, 1.0])
def test_werner_state(F):
    rho = werner_state(F)
    check_density_matrix(rho)
    psi = np.zeros(DIM, dtype=complex)
    psi[joint_index(0, ArmBasis.S_V)] = psi[joint_index(1, ArmBasis.S_H)] = 1 / math.sqrt(2)
    assert np.real(psi.conj() @ rho @ psi) == pytest.approx(F)


def test_config_validation():
    with pytest.raises(InvalidInputError):
        StepConfig(r=1.2)
    with pytest.raises(InvalidInputError):
        StepConfig(T=-0.1)
    with pytest.raises(InvalidInputError):
        StepConfig(theta=float("nan"))
    assert StepConfig(theta=2 * math.pi + 0.5).theta == pytest.approx(0.5)


@pytest.mark.parametrize("text,kind,sign,F", [
    ("bell+", "bell", "+", 1.0),
    ("bell-", "bell", "-", 1.0),
    ("werner:0.9712", "werner", "+", 0.9712),
    ("werner-:0.5", "werner", "-", 0.5),
])
def test_input_spec_parse(text, kind, sign, F):
    spec = InputSpec.parse(text)
    assert (spec.kind, spec.sign, spec.F) == (kind, sign, F)
    assert InputSpec.parse(str(spec)) == spec


@pytest.mark.parametrize("text", ["ghz", "werner:1.5", "werner:abc", "werner:0.1"])
def test_input_spec_rejects(text):
    with pytest.raises(InvalidInputError):
        InputSpec.parse(text)
