"""Stroboscopic evolution, post-selection, concurrence and backflow measure."""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .constants import TOL
from .errors import EmptySectorError, InvalidInputError, InvariantViolation
from .linalg import as_matrix, check_density_matrix, dagger, eig_general4, eig_hermitian, hermiticity_error, purity
from .model import DIM, E_SECTOR, S_SECTOR, InputSpec, StepConfig, apply_channel, joint_index, step_channel, check_joint_state

_SIGMA_Y = np.array([[0, -1j], [1j, 0]])
SPIN_FLIP = np.kron(_SIGMA_Y, _SIGMA_Y)

_SECTORS = {"s": S_SECTOR, "e": E_SECTOR}


def _sector_indices(sector: str) -> List[int]:
    if sector not in _SECTORS:
        raise InvalidInputError(f"sector must be 's' or 'e', got {sector!r}")
    return [joint_index(a, arm) for a in range(2) for arm in _SECTORS[sector]]


def post_select(rho, sector: str) -> Tuple[np.ndarray, float]:
    """Two-qubit ancilla x polarization block of the s or e1 photon, renormalized.

    Returns ``(block, weight)`` where ``weight`` is the block's trace before
    renormalization. Raises :class:`EmptySectorError` below 1e-12 weight.
    """
    rho = as_matrix(rho)
    if rho.shape != (DIM, DIM):
        raise InvalidInputError(f"joint state must be {DIM}x{DIM}, got {rho.shape}")
    idx = _sector_indices(sector)
    block = rho[np.ix_(idx, idx)]
    weight = float(np.real(np.trace(block)))
    if weight < TOL.empty_sector:
        raise EmptySectorError(sector, weight)
    block = block / weight
    return 0.5 * (block + dagger(block)), weight


def concurrence(rho) -> float:
    """Wootters concurrence of a two-qubit density matrix."""
    rho = as_matrix(rho)
    if rho.shape != (4, 4):
        raise InvalidInputError(f"concurrence needs a 4x4 matrix, got {rho.shape}")
    check_density_matrix(rho)
    r = rho @ SPIN_FLIP @ rho.conj() @ SPIN_FLIP
    ev = np.real(eig_general4(r))
    if np.any(ev < -TOL.clamp_negative):
        raise InvalidInputError(f"spin-flipped spectrum has negative eigenvalue {ev.min():.3e}")
    lam = np.sort(np.sqrt(np.clip(ev, 0.0, None)))[::-1]
    return float(min(1.0, max(0.0, lam[0] - lam[1] - lam[2] - lam[3])))


@dataclass(frozen=True)
class NMResult:
    N: float
    increments: Tuple[Tuple[int, float], ...] = ()


def nm_measure(c_sequence: Sequence[Optional[float]]) -> NMResult:
    """Sum of positive concurrence increments between consecutive steps.

    ``None`` entries (empty sectors) are skipped; an increment is taken between
    consecutive defined values and reported at the later index.
    """
    if len(c_sequence) < 2:
        raise InvalidInputError("need at least two concurrence values")
    incs = []
    prev = None
    for k, c in enumerate(c_sequence):
        if c is None or (isinstance(c, float) and math.isnan(c)):
            continue
        if prev is not None:
            d = float(c) - prev
            if d > TOL.increment:
                incs.append((k, d))
        prev = float(c)
    return NMResult(float(sum(d for _, d in incs)), tuple(incs))


@dataclass
class StepRecord:
    k: int
    rho_joint: np.ndarray
    rho_as: Optional[np.ndarray]
    rho_ae: Optional[np.ndarray]
    weight_as: float
    weight_ae: float
    C_as: Optional[float]
    C_ae: Optional[float]
    purity_joint: float


@dataclass
class Trajectory:
    records: List[StepRecord]
    config: StepConfig
    input_descriptor: str = "custom"

    @property
    def C_as(self) -> List[Optional[float]]:
        return [rec.C_as for rec in self.records]

    @property
    def C_ae(self) -> List[Optional[float]]:
        return [rec.C_ae for rec in self.records]

    def nm(self) -> NMResult:
        return nm_measure(self.C_as)

    def n_cumulative(self) -> List[float]:
        """Running backflow measure of C_as up to each step."""
        out = [0.0]
        prev = self.C_as[0]
        total = 0.0
        for c in self.C_as[1:]:
            if c is not None:
                if prev is not None and c - prev > TOL.increment:
                    total += c - prev
                prev = c
            out.append(total)
        return out


def _check_invariants(rho: np.ndarray, k: int) -> None:
    tr = np.real(np.trace(rho))
    if abs(tr - 1.0) > TOL.trace:
        raise InvariantViolation(f"step {k}: trace {tr:.15g}")
    if hermiticity_error(rho) > TOL.hermitian:
        raise InvariantViolation(f"step {k}: state lost hermiticity")
    lo = eig_hermitian(rho, vectors=False).values[0]
    if lo < -TOL.psd:
        raise InvariantViolation(f"step {k}: negative eigenvalue {lo:.3e}")


def _record(k: int, rho: np.ndarray) -> StepRecord:
    blocks = {}
    for sector in ("s", "e"):
        try:
            b, w = post_select(rho, sector)
            c = concurrence(b)
        except EmptySectorError as exc:
            b, w, c = None, exc.weight, None
        blocks[sector] = (b, w, c)
    (b_s, w_s, c_s), (b_e, w_e, c_e) = blocks["s"], blocks["e"]
    return StepRecord(k, rho, b_s, b_e, w_s, w_e, c_s, c_e, purity(rho))


def _as_state(inp) -> Tuple[np.ndarray, str]:
    if isinstance(inp, str):
        inp = InputSpec.parse(inp)
    if isinstance(inp, InputSpec):
        return inp.state(), str(inp)
    return check_joint_state(inp), "custom"


def evolve(inp: Union[str, InputSpec, np.ndarray], cfg: StepConfig, steps: int, check: bool = True) -> Trajectory:
    """Apply the step channel ``steps`` times, recording every intermediate state.

    ``inp`` is a joint density matrix or an input descriptor (``bell+``,
    ``werner:0.9712``, ...). Record 0 is the input itself.
    """
    if int(steps) != steps or steps < 1:
        raise InvalidInputError(f"steps must be a positive integer, got {steps}")
    rho, label = _as_state(inp)
    if check:
        _check_invariants(rho, 0)
    ch = step_channel(cfg)
    records = [_record(0, rho)]
    for k in range(1, int(steps) + 1):
        rho = apply_channel(ch, rho)
        if check:
            _check_invariants(rho, k)
        records.append(_record(k, rho))
    return Trajectory(records, cfg, label)


@dataclass(frozen=True)
class SweepRow:
    T: float
    theta: float
    step: int
    C_as: Optional[float]
    C_ae: Optional[float]
    N_cum: float


class SweepPointError(RuntimeError):
    def __init__(self, T, theta, cause):
        super().__init__(f"sweep point T={T!r}, theta={theta!r} failed: {cause}")
        self.T, self.theta, self.cause = T, theta, cause


def sweep(
    inp,
    T_values: Iterable[float],
    theta_values: Iterable[float],
    steps: int,
    base: StepConfig = StepConfig(),
    max_workers: Optional[int] = None,
    check: bool = True,
) -> List[SweepRow]:
    """Evolve at every (T, theta) grid point; rows ordered by (T, theta, step).

    Grid order follows the given value lists (lexicographic in their order).
    Points are independent and may run on a thread pool; output order does not
    depend on scheduling.
    """
    T_values, theta_values = list(T_values), list(theta_values)
    if not T_values or not theta_values:
        raise InvalidInputError("sweep grid must be non-empty in both T and theta")
    rho, label = _as_state(inp)
    points = list(itertools.product(T_values, theta_values))

    def run(point):
        T, theta = point
        try:
            cfg = StepConfig(base.r, T, theta, base.eta_s, base.eta_e)
            traj = evolve(rho, cfg, steps, check=check)
        except Exception as exc:  # re-raised with the grid point attached
            raise SweepPointError(T, theta, exc) from exc
        ncum = traj.n_cumulative()
        return [SweepRow(float(T), float(theta), rec.k, rec.C_as, rec.C_ae, ncum[rec.k]) for rec in traj.records]

    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            chunks = list(pool.map(run, points))
    else:
        chunks = [run(p) for p in points]
    return [row for chunk in chunks for row in chunk]
