"""Optical elements of one collision step, as operators on ancilla x arm.

The arm carries the single system/environment photon. Its state space is
five-dimensional (``ArmBasis``): photon in the system mode s (H or V), photon
in the retained environment mode e1 (H or V), or photon absorbed (``VAC``).
Absorption records in e2 are traced out step by step, which turns the filter
into a three-operator Kraus channel instead of a growing register.

Joint index = ``ancilla * 5 + arm``, ancilla 0 = H, 1 = V.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Sequence, Tuple

import numpy as np

from .constants import TOL
from .errors import InvalidInputError
from .linalg import ANCILLA_DIM, ARM_DIM, as_matrix, check_density_matrix, dagger

DIM = ANCILLA_DIM * ARM_DIM
TWO_PI = 2.0 * math.pi


class ArmBasis(IntEnum):
    S_H = 0
    S_V = 1
    E_H = 2
    E_V = 3
    VAC = 4


S_SECTOR = (ArmBasis.S_H, ArmBasis.S_V)
E_SECTOR = (ArmBasis.E_H, ArmBasis.E_V)


def joint_index(ancilla: int, arm: int) -> int:
    return ancilla * ARM_DIM + int(arm)


def _check_unit_interval(name: str, x: float) -> float:
    x = float(x)
    if not (0.0 <= x <= 1.0) or math.isnan(x):
        raise InvalidInputError(f"{name} must lie in [0, 1], got {x}")
    return x


@dataclass(frozen=True)
class StepConfig:
    """Physical knobs of one collision step.

    ``r`` is the beam-splitter reflectivity, ``T`` the filter transmissivity
    (environment memory), ``theta`` the e1-vs-s phase difference in radians
    (reduced mod 2 pi), and ``eta_s``,
    ``eta_e`` optional per-step transmissions modelling lossy optics.
    """

    r: float = 0.5
    T: float = 1.0
    theta: float = 0.0
    eta_s: float = 1.0
    eta_e: float = 1.0

    def __post_init__(self):
        for name in ("r", "T", "eta_s", "eta_e"):
            object.__setattr__(self, name, _check_unit_interval(name, getattr(self, name)))
        theta = float(self.theta)
        if not math.isfinite(theta):
            raise InvalidInputError(f"theta must be finite, got {theta}")
        object.__setattr__(self, "theta", theta % TWO_PI)

    @property
    def ideal_elements(self) -> bool:
        return self.eta_s == 1.0 and self.eta_e == 1.0


@dataclass(frozen=True)
class KrausChannel:
    """CPTP map rho -> sum_k K rho K^dag on the 10-dim joint space."""

    operators: Tuple[np.ndarray, ...] = field(default_factory=tuple)

    def __post_init__(self):
        ops = tuple(as_matrix(k) for k in self.operators)
        if not ops:
            raise InvalidInputError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        if any(k.shape != shape for k in ops) or shape[0] != shape[1]:
            raise InvalidInputError("Kraus operators must be square and equally sized")
        for k in ops:
            k.setflags(write=False)
        object.__setattr__(self, "operators", ops)
        err = self.completeness_error()
        if err > TOL.completeness:
            raise InvalidInputError(f"Kraus set is not trace preserving (error {err:.2e})")

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def __len__(self):
        return len(self.operators)

    def completeness_error(self) -> float:
        total = sum(dagger(k) @ k for k in self.operators)
        return float(np.max(np.abs(total - np.eye(self.dim))))

    def then(self, other: "KrausChannel") -> "KrausChannel":
        """Channel applying ``self`` first and ``other`` second.

        Products that vanish identically are dropped.
        """
        ops = [b @ a for b in other.operators for a in self.operators]
        kept = [k for k in ops if np.any(np.abs(k) > 0.0)]
        return KrausChannel(tuple(kept or ops[:1]))

    def apply(self, rho) -> np.ndarray:
        return apply_channel(self, rho)


def _embed_arm(op: np.ndarray) -> np.ndarray:
    """I_ancilla (x) op."""
    return np.kron(np.eye(ANCILLA_DIM), op)


def bell_state(sign: str = "+") -> np.ndarray:
    """(|H>_a|S_V> +/- |V>_a|S_H>)/sqrt(2) as a density matrix."""
    psi = bell_vector(sign)
    return np.outer(psi, psi.conj())


def bell_vector(sign: str = "+") -> np.ndarray:
    s = _parse_sign(sign)
    psi = np.zeros(DIM, dtype=np.complex128)
    psi[joint_index(0, ArmBasis.S_V)] = 1.0 / math.sqrt(2.0)
    psi[joint_index(1, ArmBasis.S_H)] = s / math.sqrt(2.0)
    return psi


def _parse_sign(sign) -> int:
    if sign in ("+", "plus", 1, +1):
        return 1
    if sign in ("-", "−", "minus", -1):
        return -1
    raise InvalidInputError(f"sign must be '+' or '-', got {sign!r}")


def werner_state(F: float, sign: str = "+") -> np.ndarray:
    """p |Psi><Psi| + (1-F)/3 * I on the ancilla x {S_H, S_V} block, p = (4F-1)/3."""
    F = float(F)
    if not (0.25 <= F <= 1.0):
        raise InvalidInputError(f"Werner fidelity must lie in [0.25, 1], got {F}")
    rho = (4.0 * F - 1.0) / 3.0 * bell_state(sign)
    for a in range(ANCILLA_DIM):
        for arm in S_SECTOR:
            i = joint_index(a, arm)
            rho[i, i] += (1.0 - F) / 3.0
    return rho


@dataclass(frozen=True)
class InputSpec:
    """Named input state: ``bell+``, ``bell-`` or ``werner:F`` (optionally ``werner-:F``)."""

    kind: str
    sign: str = "+"
    F: float = 1.0

    @classmethod
    def parse(cls, text: str) -> "InputSpec":
        t = str(text).strip().replace("−", "-")
        if t in ("bell+", "bell-"):
            return cls("bell", t[-1])
        m = re.fullmatch(r"werner([+-]?):(.+)", t)
        if m:
            try:
                F = float(m.group(2))
            except ValueError:
                raise InvalidInputError(f"bad Werner fidelity in {text!r}") from None
            if not (0.25 <= F <= 1.0):
                raise InvalidInputError(f"Werner fidelity must lie in [0.25, 1], got {F}")
            return cls("werner", m.group(1) or "+", F)
        raise InvalidInputError(f"unknown input {text!r}; expected bell+, bell- or werner:F")

    def state(self) -> np.ndarray:
        if self.kind == "bell":
            return bell_state(self.sign)
        return werner_state(self.F, self.sign)

    def __str__(self):
        if self.kind == "bell":
            return f"bell{self.sign}"
        sign = "" if self.sign == "+" else "-"
        return f"werner{sign}:{self.F:g}"


def bs_unitary(r: float) -> np.ndarray:
    """Beam splitter between s and e1, same action on both polarizations.

    S_p -> i sqrt(r) S_p + sqrt(1-r) E_p and E_p -> i sqrt(r) E_p + sqrt(1-r) S_p.
    """
    r = _check_unit_interval("r", r)
    refl, trans = 1j * math.sqrt(r), math.sqrt(1.0 - r)
    u = np.zeros((ARM_DIM, ARM_DIM), dtype=np.complex128)
    for s, e in zip(S_SECTOR, E_SECTOR):
        u[s, s] = refl
        u[e, e] = refl
        u[e, s] = trans
        u[s, e] = trans
    u[ArmBasis.VAC, ArmBasis.VAC] = 1.0
    return _embed_arm(u)


def qwp_unitary() -> np.ndarray:
    """Quarter-wave plate on s: S_V picks up a factor i."""
    return _embed_arm(np.diag([1, 1j, 1, 1, 1]).astype(np.complex128))


def hwp_unitary() -> np.ndarray:
    """Half-wave plate on e1: E_V picks up a factor -1."""
    return _embed_arm(np.diag([1, 1, 1, -1, 1]).astype(np.complex128))


def phase_unitary(theta: float) -> np.ndarray:
    """exp(i theta) on the photon-in-s sector."""
    ph = np.exp(1j * (float(theta) % TWO_PI))
    return _embed_arm(np.diag([ph, ph, 1, 1, 1]).astype(np.complex128))


def _absorber(transmission: float, sector: Sequence[ArmBasis]) -> KrausChannel:
    keep = np.ones(ARM_DIM, dtype=np.complex128)
    for b in sector:
        keep[b] = math.sqrt(transmission)
    ops = [_embed_arm(np.diag(keep))]
    if transmission < 1.0:
        for b in sector:
            k = np.zeros((ARM_DIM, ARM_DIM), dtype=np.complex128)
            k[ArmBasis.VAC, b] = math.sqrt(1.0 - transmission)
            ops.append(_embed_arm(k))
    return KrausChannel(tuple(ops))


def filter_channel(T: float) -> KrausChannel:
    """Neutral filter on e1: E_p survives with amplitude sqrt(T), otherwise -> VAC.

    The two absorption operators keep the absorbed photon's polarization
    record orthogonal. At T = 1 only the identity remains.
    """
    return _absorber(_check_unit_interval("T", T), E_SECTOR)


def loss_channel(eta: float, target: str = "both") -> KrausChannel:
    """Polarization-independent loss with transmission ``eta`` on s, e1 or both arms."""
    eta = _check_unit_interval("eta", eta)
    sectors = {"s-arm": S_SECTOR, "e-arm": E_SECTOR, "both": S_SECTOR + E_SECTOR}
    if target not in sectors:
        raise InvalidInputError(f"target must be one of {sorted(sectors)}, got {target!r}")
    return _absorber(eta, sectors[target])


def step_unitary(cfg: StepConfig) -> np.ndarray:
    """phase . HWP . QWP . BS (the beam splitter acts first).

    ``cfg.theta`` is the phase of the e1 path relative to the s path, so the
    photon-in-s sector is multiplied by exp(-i theta). With the opposite sign
    the V amplitudes evolve exactly like the H amplitudes at -theta, and
    theta = pi/4 freezes the post-selected concurrence for every T.
    """
    return phase_unitary(-cfg.theta) @ hwp_unitary() @ qwp_unitary() @ bs_unitary(cfg.r)


def step_channel(cfg: StepConfig) -> KrausChannel:
    """Full collision step: unitary optics, then filter, then element losses."""
    ch = KrausChannel((step_unitary(cfg),)).then(filter_channel(cfg.T))
    if cfg.eta_s < 1.0:
        ch = ch.then(loss_channel(cfg.eta_s, "s-arm"))
    if cfg.eta_e < 1.0:
        ch = ch.then(loss_channel(cfg.eta_e, "e-arm"))
    return ch


def apply_channel(ch: KrausChannel, rho) -> np.ndarray:
    rho = as_matrix(rho)
    if rho.shape != (ch.dim, ch.dim):
        raise InvalidInputError(f"state shape {rho.shape} does not match channel dim {ch.dim}")
    out = sum(k @ rho @ dagger(k) for k in ch.operators)
    return 0.5 * (out + dagger(out))


def check_joint_state(rho) -> np.ndarray:
    rho = as_matrix(rho)
    if rho.shape != (DIM, DIM):
        raise InvalidInputError(f"joint state must be {DIM}x{DIM}, got {rho.shape}")
    return check_density_matrix(rho, name="joint state")
