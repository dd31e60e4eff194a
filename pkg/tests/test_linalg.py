import numpy as np
import pytest
from hypothesis import given, strategies as st

from collmodel.errors import InvalidInputError
from collmodel.linalg import (
    check_density_matrix,
    eig_general4,
    eig_hermitian,
    fidelity_pure,
    partial_trace,
    purity,
    random_density_matrix,
    random_unitary,
    tensor,
    trace_distance,
)

from conftest import density_matrices


def _sorted_complex(v):
    v = np.asarray(v)
    return v[np.lexsort((np.round(v.imag, 8), np.round(v.real, 8)))]


def test_tensor_matches_index_convention():
    a = np.arange(4).reshape(2, 2)
    b = np.arange(25).reshape(5, 5)
    t = tensor(a, b)
    assert t.shape == (10, 10)
    assert t[1 * 5 + 3, 0 * 5 + 2] == a[1, 0] * b[3, 2]


def test_partial_trace_of_product(rng):
    ra = random_density_matrix(2, rng)
    rb = random_density_matrix(5, rng)
    joint = tensor(ra, rb)
    assert np.allclose(partial_trace(joint, "ancilla"), ra, atol=1e-14)
    assert np.allclose(partial_trace(joint, "arm"), rb, atol=1e-14)


def test_partial_trace_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        partial_trace(np.eye(4), "ancilla")
    with pytest.raises(InvalidInputError):
        partial_trace(np.eye(10), "environment")


@given(st.integers(0, 2**32 - 1), st.integers(1, 10))
def test_eig_hermitian_reconstructs(seed, n):
    r = np.random.default_rng(seed)
    g = r.standard_normal((n, n)) + 1j * r.standard_normal((n, n))
    h = g + g.conj().T
    spec = eig_hermitian(h)
    v = spec.vectors
    assert np.all(np.diff(spec.values) >= -1e-12)
    assert np.abs(v.conj().T @ v - np.eye(n)).max() < 1e-10
    assert np.abs(v @ np.diag(spec.values) @ v.conj().T - h).max() < 1e-10
    assert np.allclose(spec.values, np.linalg.eigvalsh(h), atol=1e-10)


def test_eig_hermitian_degenerate_and_diagonal():
    vals = eig_hermitian(np.diag([3.0, 1.0, 1.0, -2.0])).values
    assert np.allclose(vals, [-2, 1, 1, 3])
    u = random_unitary(6, np.random.default_rng(3))
    h = u @ np.diag([0, 0, 0, 1, 1, 2]) @ u.conj().T
    assert np.allclose(eig_hermitian(h, vectors=False).values, [0, 0, 0, 1, 1, 2], atol=1e-12)


def test_eig_hermitian_rejects_non_hermitian():
    with pytest.raises(InvalidInputError):
        eig_hermitian(np.array([[0, 1], [0, 0]]))


@given(st.integers(0, 2**32 - 1))
def test_eig_general4_matches_numpy(seed):
    r = np.random.default_rng(seed)
    m = r.standard_normal((4, 4)) + 1j * r.standard_normal((4, 4))
    got = _sorted_complex(eig_general4(m))
    want = _sorted_complex(np.linalg.eigvals(m))
    assert np.abs(got - want).max() < 1e-9


def test_eig_general4_companion_roots():
    # x^4 - 10x^3 + 35x^2 - 50x + 24 = (x-1)(x-2)(x-3)(x-4)
    c = np.zeros((4, 4))
    c[1:, :3] = np.eye(3)
    c[:, 3] = [-24, 50, -35, 10]
    got = np.sort(eig_general4(c).real)
    assert np.allclose(got, [1, 2, 3, 4], atol=1e-10)


def test_eig_general4_nilpotent_and_rotation():
    jordan = np.diag([1.0, 1.0, 1.0], k=1)
    assert np.abs(eig_general4(jordan)).max() < 1e-3
    rot = np.zeros((4, 4))
    rot[0, 1], rot[1, 0] = -1, 1
    rot[2, 3], rot[3, 2] = -2, 2
    got = _sorted_complex(eig_general4(rot))
    assert np.allclose(got, _sorted_complex([1j, -1j, 2j, -2j]), atol=1e-10)


@given(density_matrices(), density_matrices())
def test_trace_distance_metric(rho, sigma):
    d = trace_distance(rho, sigma)
    assert -1e-12 <= d <= 1 + 1e-12
    assert abs(d - trace_distance(sigma, rho)) < 1e-12
    assert trace_distance(rho, rho) < 1e-12


def test_purity_and_fidelity():
    psi = np.array([1, 1j, 0, 0]) / np.sqrt(2)
    rho = np.outer(psi, psi.conj())
    assert purity(rho) == pytest.approx(1.0)
    assert purity(np.eye(4) / 4) == pytest.approx(0.25)
    assert fidelity_pure(psi, rho) == pytest.approx(1.0)
    assert fidelity_pure(psi, np.eye(4) / 4) == pytest.approx(0.25)


def test_check_density_matrix():
    check_density_matrix(np.eye(3) / 3)
    with pytest.raises(InvalidInputError):
        check_density_matrix(np.eye(3))
    with pytest.raises(InvalidInputError):
        check_density_matrix(np.diag([1.5, -0.5]))
    with pytest.raises(InvalidInputError):
        check_density_matrix(np.array([[0.5, 0.1], [0.3, 0.5]]))
