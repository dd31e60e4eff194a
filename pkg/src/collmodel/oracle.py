"""Brute-force reference simulator in the full occupation-number basis.

Every optical mode is kept explicitly, truncated at one photon per mode. Each
filter (and lossy element) gets its own fresh vacuum absorber modes per step,
so nothing is traced out until the very end. The reduced state on ancilla x
{s, e1, absorbed} is then mapped into the compact 10-dim basis of
:mod:`collmodel.model` for comparison.

Basis index bit ``j`` is the occupation of mode ``j``. Fixed modes are
``a_H, a_V, s_H, s_V, e1_H, e1_V`` (bits 0..5); absorber modes are appended in
the order they are created.
"""
from __future__ import annotations

import math
from typing import List, Tuple, Union

import numpy as np

from .errors import CapacityError, InvalidInputError
from .linalg import trace_distance
from .model import ArmBasis, InputSpec, StepConfig, joint_index

A_H, A_V, S_H, S_V, E1_H, E1_V = range(6)
N_FIXED = 6
MAX_STEPS = 4
MAX_MODES = 22

_ARM_OF_MODE = {S_H: ArmBasis.S_H, S_V: ArmBasis.S_V, E1_H: ArmBasis.E_H, E1_V: ArmBasis.E_V}


class FockState:
    """Pure state over a growing set of two-level (0/1 photon) modes."""

    def __init__(self, amplitudes: np.ndarray, n_modes: int):
        self.amp = np.asarray(amplitudes, dtype=np.complex128)
        self.n_modes = n_modes
        if self.amp.shape != (2 ** n_modes,):
            raise InvalidInputError("amplitude vector does not match mode count")

    @classmethod
    def from_occupations(cls, terms: List[Tuple[complex, Tuple[int, ...]]], n_modes: int = N_FIXED) -> "FockState":
        amp = np.zeros(2 ** n_modes, dtype=np.complex128)
        for c, modes in terms:
            amp[sum(1 << m for m in modes)] += c
        return cls(amp, n_modes)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amp))

    def _bits(self, mode: int) -> np.ndarray:
        return (np.arange(self.amp.size) >> mode) & 1

    def add_vacuum_mode(self) -> int:
        """Append a fresh empty mode (new highest bit); returns its index."""
        if self.n_modes + 1 > MAX_MODES:
            raise CapacityError(f"more than {MAX_MODES} modes requested")
        self.amp = np.concatenate([self.amp, np.zeros_like(self.amp)])
        self.n_modes += 1
        return self.n_modes - 1

    def apply_diagonal(self, phases: np.ndarray) -> None:
        self.amp = self.amp * phases

    def apply_two_mode(self, m1: int, m2: int, local: np.ndarray) -> None:
        """Apply a 4x4 matrix on the local occupations |n_m1 n_m2> (index 2*n_m1 + n_m2).

        The doubly-occupied input must carry no amplitude: the one-photon-per-mode
        truncation cannot represent bunching.
        """
        both = (self._bits(m1) & self._bits(m2)).astype(bool)
        if np.any(np.abs(self.amp[both]) > 0.0):
            raise CapacityError(f"modes {m1} and {m2} both occupied; truncation invalid")
        n = self.n_modes
        ax1, ax2 = n - 1 - m1, n - 1 - m2
        t = np.moveaxis(self.amp.reshape((2,) * n), (ax1, ax2), (0, 1))
        shape = t.shape
        t = (local @ t.reshape(4, -1)).reshape(shape)
        self.amp = np.moveaxis(t, (0, 1), (ax1, ax2)).reshape(-1)

    def photon_numbers(self) -> np.ndarray:
        idx = np.arange(self.amp.size)
        return np.array([bin(i).count("1") for i in idx])[np.abs(self.amp) > 0]


def _splitter(amp_keep: complex, amp_cross: float) -> np.ndarray:
    # local basis order |00>, |01>, |10>, |11> with |10> = photon in first mode
    m = np.zeros((4, 4), dtype=np.complex128)
    m[0, 0] = 1.0
    m[2, 2] = amp_keep
    m[1, 2] = amp_cross
    return m


def _beam_splitter(r: float) -> np.ndarray:
    m = _splitter(1j * math.sqrt(r), math.sqrt(1.0 - r))
    m[1, 1] = 1j * math.sqrt(r)
    m[2, 1] = math.sqrt(1.0 - r)
    return m


def _absorption(transmission: float) -> np.ndarray:
    # second mode is a fresh absorber: |01> only reachable as an output
    m = _splitter(math.sqrt(transmission), math.sqrt(1.0 - transmission))
    m[1, 1] = 1.0
    return m


def _step(state: FockState, cfg: StepConfig) -> None:
    bs = _beam_splitter(cfg.r)
    state.apply_two_mode(S_H, E1_H, bs)
    state.apply_two_mode(S_V, E1_V, bs)

    # quarter-wave plate on s, half-wave plate on e1
    state.apply_diagonal(np.where(state._bits(S_V) == 1, 1j, 1.0))
    state.apply_diagonal(np.where(state._bits(E1_V) == 1, -1.0, 1.0))

    # phase difference: exp(i theta) on |0>_s |1>_e1
    n_s = state._bits(S_H) + state._bits(S_V)
    n_e = state._bits(E1_H) + state._bits(E1_V)
    state.apply_diagonal(np.where((n_s == 0) & (n_e == 1), np.exp(1j * cfg.theta), 1.0))

    absorbers = [((E1_H, E1_V), cfg.T)]
    if cfg.eta_s < 1.0:
        absorbers.append(((S_H, S_V), cfg.eta_s))
    if cfg.eta_e < 1.0:
        absorbers.append(((E1_H, E1_V), cfg.eta_e))
    for modes, transmission in absorbers:
        for m in modes:
            fresh = state.add_vacuum_mode()
            before = state.norm()
            state.apply_two_mode(m, fresh, _absorption(transmission))
            if abs(state.norm() - before) > 1e-12:
                raise ArithmeticError("absorber isometry lost norm")


def _pure_runs(spec: InputSpec) -> List[Tuple[float, FockState]]:
    """Input as a convex mixture of pure Fock states."""
    def bell(sign: int) -> FockState:
        c = 1.0 / math.sqrt(2.0)
        return FockState.from_occupations([(c, (A_H, S_V)), (sign * c, (A_V, S_H))])

    s = 1 if spec.sign == "+" else -1
    if spec.kind == "bell":
        return [(1.0, bell(s))]
    F = spec.F
    w = (1.0 - F) / 3.0
    p = (4.0 * F - 1.0) / 3.0
    # I_4 = |Psi+><Psi+| + |Psi-><Psi-| + |HH><HH| + |VV><VV|
    runs = [
        (p + w, bell(s)),
        (w, bell(-s)),
        (w, FockState.from_occupations([(1.0, (A_H, S_H))])),
        (w, FockState.from_occupations([(1.0, (A_V, S_V))])),
    ]
    return [(wt, st) for wt, st in runs if wt > 0.0]


def reduce_to_joint(state: FockState) -> np.ndarray:
    """Trace out all absorber modes; map into the 10-dim ancilla x arm basis."""
    nz = np.flatnonzero(np.abs(state.amp) > 0.0)
    n_abs = 2 ** (state.n_modes - N_FIXED)
    m = np.zeros((10, n_abs), dtype=np.complex128)
    for idx in nz:
        if bin(idx).count("1") != 2:
            raise ArithmeticError(f"photon number not conserved in basis state {idx}")
        a_h, a_v = (idx >> A_H) & 1, (idx >> A_V) & 1
        if a_h + a_v != 1:
            raise ArithmeticError("ancilla does not hold exactly one photon")
        occupied = [mode for mode in _ARM_OF_MODE if (idx >> mode) & 1]
        arm = _ARM_OF_MODE[occupied[0]] if occupied else ArmBasis.VAC
        m[joint_index(a_v, arm), idx >> N_FIXED] += state.amp[idx]
    return m @ m.conj().T


def simulate_fock(inp: Union[str, InputSpec], cfg: StepConfig, steps: int) -> np.ndarray:
    """Joint ancilla x arm state after ``steps`` collisions, computed mode by mode."""
    spec = InputSpec.parse(inp) if isinstance(inp, str) else inp
    if steps < 0 or int(steps) != steps:
        raise InvalidInputError(f"steps must be a non-negative integer, got {steps}")
    if steps > MAX_STEPS:
        raise CapacityError(f"oracle supports at most {MAX_STEPS} steps, got {steps}")
    per_step = 2 * (1 + (cfg.eta_s < 1.0) + (cfg.eta_e < 1.0))
    if N_FIXED + per_step * steps > MAX_MODES:
        raise CapacityError(f"{N_FIXED + per_step * steps} modes exceed the limit of {MAX_MODES}")
    rho = np.zeros((10, 10), dtype=np.complex128)
    for weight, state in _pure_runs(spec):
        for _ in range(int(steps)):
            _step(state, cfg)
        rho += weight * reduce_to_joint(state)
    return rho


def compare(inp: Union[str, InputSpec], cfg: StepConfig, steps: int) -> float:
    """Trace distance between the compact-model state and the oracle state."""
    from .dynamics import evolve

    expected = simulate_fock(inp, cfg, steps)
    got = evolve(inp, cfg, steps).records[-1].rho_joint
    return trace_distance(got, expected)
