"""Numerical tolerances used throughout the package.

All thresholds live here so that tests and library code agree on them.
"""
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-10
    trace: float = 1e-10
    psd: float = 1e-10
    unitary: float = 1e-12
    completeness: float = 1e-10
    # eig_hermitian refuses inputs further than this from Hermitian
    eig_hermitian_input: float = 1e-8
    jacobi_max_sweeps: int = 60
    qr_subdiag: float = 1e-12
    qr_max_iter: int = 200
    # concurrence: eigenvalues of rho*rho_tilde in [-clamp, 0) are set to 0
    clamp_negative: float = 1e-10
    # concurrence increments at or below this are treated as jitter
    increment: float = 1e-12
    empty_sector: float = 1e-12


TOL = Tolerances()
