"""Small dense complex linear algebra.

Everything here is sized for the 10-dimensional ancilla x arm space and the
4x4 two-qubit blocks cut out of it. Matrices are plain ``complex128`` numpy
arrays; the eigen-solvers are written out by hand (cyclic Jacobi for the
Hermitian case, Hessenberg + shifted QR for the general 4x4 case).
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .constants import TOL
from .errors import InvalidInputError

ANCILLA_DIM = 2
_EPS = np.finfo(float).eps
ARM_DIM = 5


def as_matrix(m) -> np.ndarray:
    """Coerce to a finite 2-D complex array."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise InvalidInputError(f"expected a non-empty matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("matrix has non-finite entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def tensor(a, b) -> np.ndarray:
    """Kronecker product; row ``i_a * rows(b) + i_b``."""
    return np.kron(as_matrix(a), as_matrix(b))


def hermiticity_error(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - dagger(m))))


def partial_trace(rho, keep: str) -> np.ndarray:
    """Reduce a 10x10 ancilla x arm operator to the ancilla (2x2) or arm (5x5)."""
    rho = as_matrix(rho)
    n = ANCILLA_DIM * ARM_DIM
    if rho.shape != (n, n):
        raise InvalidInputError(f"partial_trace expects {n}x{n}, got {rho.shape}")
    t = rho.reshape(ANCILLA_DIM, ARM_DIM, ANCILLA_DIM, ARM_DIM)
    if keep == "ancilla":
        return np.einsum("iaja->ij", t)
    if keep == "arm":
        return np.einsum("aiaj->ij", t)
    raise InvalidInputError(f"keep must be 'ancilla' or 'arm', got {keep!r}")


@dataclass(frozen=True)
class HermitianSpectrum:
    values: np.ndarray
    vectors: Optional[np.ndarray] = None


def eig_hermitian(m, vectors: bool = True) -> HermitianSpectrum:
    """Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi.

    Eigenvalues are returned ascending; eigenvectors (if requested) are the
    matching columns of a unitary matrix.
    """
    a = as_matrix(m)
    n = a.shape[0]
    if a.shape != (n, n):
        raise InvalidInputError(f"square matrix required, got {a.shape}")
    if hermiticity_error(a) > TOL.eig_hermitian_input:
        raise InvalidInputError("matrix is not Hermitian within tolerance")
    a = 0.5 * (a + dagger(a))
    v = np.eye(n, dtype=np.complex128)
    scale = np.linalg.norm(a)
    if n > 1 and scale > 0.0:
        for _ in range(TOL.jacobi_max_sweeps):
            off = np.linalg.norm(a - np.diag(np.diag(a)))
            if off <= 1e-15 * scale:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    mag = abs(apq)
                    if mag <= 1e-300:
                        continue
                    phase = apq / mag
                    angle = 0.5 * np.arctan2(2.0 * mag, a[p, p].real - a[q, q].real)
                    c, s = np.cos(angle), np.sin(angle)
                    # g = diag(1, conj(phase)) @ [[c, -s], [s, c]]
                    g = np.array([[c, -s], [s * phase.conjugate(), c * phase.conjugate()]])
                    idx = [p, q]
                    a[:, idx] = a[:, idx] @ g
                    a[idx, :] = dagger(g) @ a[idx, :]
                    a[p, q] = a[q, p] = 0.0
                    v[:, idx] = v[:, idx] @ g
    vals = np.real(np.diag(a)).copy()
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    return HermitianSpectrum(vals, v[:, order] if vectors else None)


def _hessenberg(a: np.ndarray) -> np.ndarray:
    h = a.copy()
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1:, k].copy()
        norm_x = np.linalg.norm(x)
        if norm_x == 0.0:
            continue
        x0 = x[0]
        phase = x0 / abs(x0) if abs(x0) > 0 else 1.0
        x[0] += phase * norm_x
        x /= np.linalg.norm(x)
        h[k + 1:, :] -= 2.0 * np.outer(x, x.conj() @ h[k + 1:, :])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ x, x.conj())
        h[k + 2:, k] = 0.0
    return h


def _eig2(b: np.ndarray):
    a, bb, c, d = b[0, 0], b[0, 1], b[1, 0], b[1, 1]
    half_tr = 0.5 * (a + d)
    disc = cmath.sqrt(0.25 * (a - d) ** 2 + bb * c)
    # larger-magnitude root first, the other from the determinant (no cancellation)
    l1 = half_tr + disc if abs(half_tr + disc) >= abs(half_tr - disc) else half_tr - disc
    if l1 == 0:
        return l1, l1
    return l1, (a * d - bb * c) / l1


def _wilkinson_shift(b: np.ndarray) -> complex:
    l1, l2 = _eig2(b)
    d = b[1, 1]
    return l1 if abs(l1 - d) < abs(l2 - d) else l2


def _qr_step(h: np.ndarray, lo: int, hi: int, shift: complex) -> None:
    """One explicit single-shift QR sweep on the block h[lo:hi+1, lo:hi+1]."""
    blk = h[lo:hi + 1, lo:hi + 1] - shift * np.eye(hi - lo + 1)
    m = blk.shape[0]
    rots = []
    for k in range(m - 1):
        x, y = blk[k, k], blk[k + 1, k]
        r = np.hypot(abs(x), abs(y))
        if r == 0.0:
            g = np.eye(2, dtype=np.complex128)
        else:
            c, s = x / r, y / r
            g = np.array([[c.conjugate(), s.conjugate()], [-s, c]])
        blk[k:k + 2, :] = g @ blk[k:k + 2, :]
        rots.append(g)
    for k, g in enumerate(rots):
        blk[:, k:k + 2] = blk[:, k:k + 2] @ dagger(g)
    h[lo:hi + 1, lo:hi + 1] = blk + shift * np.eye(m)


def eig_general4(m) -> np.ndarray:
    """All four (complex) eigenvalues of a 4x4 matrix, unordered."""
    a = as_matrix(m)
    if a.shape != (4, 4):
        raise InvalidInputError(f"eig_general4 expects 4x4, got {a.shape}")
    return _eig_general(a)


def _eig_general(a: np.ndarray) -> np.ndarray:
    h = _hessenberg(a)
    n = h.shape[0]
    norm_h = np.linalg.norm(h)
    eig = np.zeros(n, dtype=np.complex128)
    hi = n - 1
    it = 0
    total = 0
    while hi >= 0:
        if hi == 0:
            eig[0] = h[0, 0]
            break
        l = hi
        while l > 0:
            sub = abs(h[l, l - 1])
            # deflate at rounding level; 1e-12 only bounds what the iteration cap accepts
            if sub <= _EPS * (abs(h[l, l]) + abs(h[l - 1, l - 1])) or sub <= _EPS * 1e-2 * norm_h:
                h[l, l - 1] = 0.0
                break
            l -= 1
        if l == hi:
            eig[hi] = h[hi, hi]
            hi -= 1
            it = 0
            continue
        if l == hi - 1:
            eig[hi - 1], eig[hi] = _eig2(h[hi - 1:hi + 1, hi - 1:hi + 1])
            hi -= 2
            it = 0
            continue
        if total >= TOL.qr_max_iter:
            sub = np.abs(np.diag(h, -1)[l:hi])
            if np.any(sub > TOL.qr_subdiag * norm_h):
                raise ArithmeticError(f"QR iteration did not converge in {TOL.qr_max_iter} steps")
            eig[l:hi + 1] = np.diag(h)[l:hi + 1]
            hi = l - 1
            continue
        if it and it % 10 == 0:
            shift = h[hi, hi] + 0.75 * abs(h[hi, hi - 1])
        else:
            shift = _wilkinson_shift(h[hi - 1:hi + 1, hi - 1:hi + 1])
        _qr_step(h, l, hi, shift)
        it += 1
        total += 1
    return eig


def trace_distance(rho, sigma) -> float:
    rho, sigma = as_matrix(rho), as_matrix(sigma)
    if rho.shape != sigma.shape:
        raise InvalidInputError(f"shape mismatch {rho.shape} vs {sigma.shape}")
    vals = eig_hermitian(rho - sigma, vectors=False).values
    return float(0.5 * np.sum(np.abs(vals)))


def purity(rho) -> float:
    rho = as_matrix(rho)
    return float(np.real(np.trace(rho @ rho)))


def fidelity_pure(psi: np.ndarray, rho) -> float:
    """<psi|rho|psi> for a normalized state vector."""
    psi = np.asarray(psi, dtype=np.complex128)
    return float(np.real(psi.conj() @ as_matrix(rho) @ psi))


def check_density_matrix(rho, tol: float = TOL.trace, psd_tol: float = TOL.psd, name: str = "rho") -> np.ndarray:
    """Validate Hermiticity, unit trace and positivity; return the array."""
    rho = as_matrix(rho)
    if rho.shape[0] != rho.shape[1]:
        raise InvalidInputError(f"{name} must be square, got {rho.shape}")
    if hermiticity_error(rho) > TOL.hermitian:
        raise InvalidInputError(f"{name} is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise InvalidInputError(f"{name} trace is {np.trace(rho).real:.12g}, not 1")
    if eig_hermitian(rho, vectors=False).values[0] < -psd_tol:
        raise InvalidInputError(f"{name} is not positive semidefinite")
    return rho


def random_density_matrix(n: int, rng: np.random.Generator, rank: Optional[int] = None) -> np.ndarray:
    """rho = G G^dag / Tr(G G^dag) with complex Gaussian G (n x rank)."""
    k = n if rank is None else rank
    g = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
    rho = g @ dagger(g)
    return rho / np.trace(rho).real


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
