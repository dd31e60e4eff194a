"""Simulated two-qubit polarization tomography with shot noise.

Measurement model: 36 projectors built from all pairs of the six polarization
eigenstates H, V, D, A, R, L. Each projector collects Poisson-distributed
counts with mean ``shots * p``. States are reconstructed by least-squares
linear inversion followed by clipping negative eigenvalues.

Random numbers
--------------
Draws come from numpy's Philox-4x64 counter-based generator keyed by the
integer seed. Each 64-bit raw output ``x`` becomes a uniform double
``(x >> 11) * 2**-53``. Poisson counts with mean below 50 are drawn by
sequential inversion from one uniform; larger means use a Box-Muller normal
(two uniforms) scaled to ``mean + sqrt(mean) * z``, rounded half-to-even and
clamped at 0. Monte-Carlo run ``i`` uses seed ``seed + i``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import List, Sequence, Tuple

import numpy as np

from .dynamics import concurrence
from .errors import InvalidInputError
from .linalg import as_matrix, check_density_matrix, dagger, eig_hermitian

POISSON_INVERSION_LIMIT = 50.0

_S = 1.0 / math.sqrt(2.0)
POLARIZATIONS = {
    "H": np.array([1.0, 0.0], dtype=np.complex128),
    "V": np.array([0.0, 1.0], dtype=np.complex128),
    "D": np.array([_S, _S], dtype=np.complex128),
    "A": np.array([_S, -_S], dtype=np.complex128),
    "R": np.array([_S, 1j * _S], dtype=np.complex128),
    "L": np.array([_S, -1j * _S], dtype=np.complex128),
}


@dataclass(frozen=True)
class ProjectorSet:
    labels: Tuple[str, ...]
    projectors: np.ndarray  # (36, 4, 4)

    def __len__(self):
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def gram_rank(self, threshold: float = 1e-10) -> int:
        vecs = self.projectors.reshape(len(self), -1)
        gram = vecs.conj() @ vecs.T
        vals = eig_hermitian(gram, vectors=False).values
        return int(np.sum(vals > threshold))

    @cached_property
    def inversion(self) -> np.ndarray:
        """Pseudo-inverse mapping the 36 probabilities to vec(rho)."""
        # p_k = Tr(rho P_k) = sum_ij conj(P_k)_ij rho_ij
        a = self.projectors.conj().reshape(len(self), -1)
        return np.linalg.pinv(a)


def projector_set() -> ProjectorSet:
    labels, projs = [], []
    for p, q in product(POLARIZATIONS, repeat=2):
        v = np.kron(POLARIZATIONS[p], POLARIZATIONS[q])
        labels.append(p + q)
        projs.append(np.outer(v, v.conj()))
    return ProjectorSet(tuple(labels), np.array(projs))


def expected_probs(rho, pset: ProjectorSet) -> np.ndarray:
    rho = as_matrix(rho)
    p = np.real(np.einsum("kij,ji->k", pset.projectors, rho))
    return np.clip(p, 0.0, 1.0)


class UniformStream:
    """Uniform doubles in [0, 1) from a Philox counter-based generator."""

    def __init__(self, seed: int):
        self._bits = np.random.Philox(int(seed))

    def next(self) -> float:
        x = int(self._bits.random_raw())
        return (x >> 11) * (1.0 / 9007199254740992.0)


def _poisson(mean: float, stream: UniformStream) -> int:
    if mean <= 0.0:
        return 0
    if mean < POISSON_INVERSION_LIMIT:
        u = stream.next()
        k = 0
        p = math.exp(-mean)
        cdf = p
        while u > cdf:
            k += 1
            p *= mean / k
            cdf += p
            if p == 0.0 and cdf < u:
                # cdf stalled below u by rounding
                break
        return k
    u1, u2 = stream.next(), stream.next()
    z = math.sqrt(-2.0 * math.log1p(-u1)) * math.cos(2.0 * math.pi * u2)
    return max(0, int(round(mean + math.sqrt(mean) * z)))


def sample_counts(probs: Sequence[float], shots: int, seed: int) -> np.ndarray:
    """Poisson counts with means ``shots * probs``; deterministic in ``seed``."""
    if shots < 1:
        raise InvalidInputError(f"shots must be >= 1, got {shots}")
    stream = UniformStream(seed)
    return np.array([_poisson(shots * float(p), stream) for p in probs], dtype=np.int64)


def physical_projection(m) -> np.ndarray:
    """Nearest-by-clipping density matrix: drop negative eigenvalues, renormalize."""
    m = as_matrix(m)
    m = 0.5 * (m + dagger(m))
    spec = eig_hermitian(m)
    vals = np.clip(spec.values, 0.0, None)
    if vals.sum() <= 0.0:
        raise InvalidInputError("reconstruction has no positive part")
    vals = vals / vals.sum()
    v = spec.vectors
    rho = (v * vals) @ dagger(v)
    return 0.5 * (rho + dagger(rho))


def reconstruct(counts: Sequence[float], pset: ProjectorSet, shots: float) -> np.ndarray:
    """Least-squares linear inversion of frequencies, then physical projection."""
    counts = np.asarray(counts, dtype=float)
    if counts.shape != (len(pset),):
        raise InvalidInputError(f"expected {len(pset)} counts, got shape {counts.shape}")
    if np.any(counts < 0):
        raise InvalidInputError("counts must be non-negative")
    if not np.any(counts > 0):
        raise InvalidInputError("all counts are zero")
    freqs = counts / float(shots)
    return physical_projection((pset.inversion @ freqs).reshape(4, 4))


@dataclass
class TomographyResult:
    rho_hat: np.ndarray
    mc_samples: List[np.ndarray]
    mc_concurrences: List[float]
    C_mean: float
    C_std: float
    seed: int
    shots_per_projector: int


def mc_errorbars(rho_true, shots: int, runs: int, seed: int, pset: ProjectorSet = None) -> TomographyResult:
    """Repeat sample -> reconstruct ``runs`` times and summarize the concurrence.

    ``C_std`` is the sample standard deviation (ddof=1). ``rho_hat`` is the
    reconstruction from noiseless expected counts.
    """
    if runs < 2:
        raise InvalidInputError(f"need at least 2 Monte-Carlo runs, got {runs}")
    if shots < 1:
        raise InvalidInputError(f"shots must be >= 1, got {shots}")
    rho_true = check_density_matrix(rho_true)
    pset = pset or projector_set()
    probs = expected_probs(rho_true, pset)
    rho_hat = reconstruct(shots * probs, pset, shots)
    samples, cs = [], []
    for i in range(runs):
        rho_i = reconstruct(sample_counts(probs, shots, seed + i), pset, shots)
        samples.append(rho_i)
        cs.append(concurrence(rho_i))
    arr = np.array(cs)
    return TomographyResult(rho_hat, samples, cs, float(arr.mean()), float(arr.std(ddof=1)), int(seed), int(shots))
