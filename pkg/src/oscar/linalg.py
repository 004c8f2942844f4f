"""Symmetric positive-definite kernel: Cholesky, triangular solves, conditioning.

All matrix numerics in the package route through here. Factorization is
LAPACK ``potrf`` (unpivoted, lower), which also reports the failing pivot.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve
from scipy.linalg.lapack import dpotrf

from .errors import DimensionError, IrrecoverableMatrixError, NotPositiveDefiniteError

SYMMETRY_TOL = 1e-10
DEFAULT_MAX_JITTER = 1e-6
FIRST_JITTER_EXPONENT = -12


@dataclass(frozen=True)
class CholeskyFactor:
    """Lower-triangular ``l`` with ``l @ l.T`` equal to the (conditioned) matrix."""

    l: np.ndarray
    jitter_applied: float = 0.0

    @property
    def n(self) -> int:
        return self.l.shape[0]


def _as_square(sigma) -> np.ndarray:
    a = np.asarray(sigma, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def check_symmetric(a: np.ndarray, tol: float = SYMMETRY_TOL) -> None:
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    asym = float(np.max(np.abs(a - a.T))) if a.size else 0.0
    if asym > tol * scale:
        raise ValueError(f"matrix is not symmetric (max asymmetry {asym:.3e})")


def cholesky(sigma) -> CholeskyFactor:
    """Factor ``sigma = L L^T`` without any conditioning.

    Raises
    ------
    NotPositiveDefiniteError
        With the 1-based index of the first non-positive pivot.
    """
    a = _as_square(sigma)
    check_symmetric(a)
    if a.shape[0] == 0:
        raise DimensionError("empty matrix")
    c, info = dpotrf(a, lower=1, clean=1, overwrite_a=0)
    if info > 0:
        raise NotPositiveDefiniteError(int(info))
    if info < 0:
        raise ValueError(f"potrf rejected argument {-info}")
    if not np.all(np.diag(c) > 0.0):
        bad = int(np.flatnonzero(~(np.diag(c) > 0.0))[0]) + 1
        raise NotPositiveDefiniteError(bad)
    c.setflags(write=False)
    return CholeskyFactor(l=c)


def jitter_ladder(max_jitter: float = DEFAULT_MAX_JITTER) -> list[float]:
    """``[0, 1e-12, 1e-11, ...]`` up to and including ``max_jitter``."""
    ladder = [0.0]
    e = FIRST_JITTER_EXPONENT
    while True:
        lam = float(f"1e{e}")
        if lam > max_jitter * (1 + 1e-12):
            break
        ladder.append(lam)
        e += 1
    if max_jitter > 0 and ladder[-1] < max_jitter * (1 - 1e-12):
        ladder.append(float(max_jitter))
    return ladder


def factorize(sigma, max_jitter: float = DEFAULT_MAX_JITTER) -> CholeskyFactor:
    """Cholesky of ``sigma + lam*I`` for the smallest workable ``lam`` on the ladder."""
    a = _as_square(sigma)
    check_symmetric(a)
    eye = np.eye(a.shape[0])
    for lam in jitter_ladder(max_jitter):
        try:
            f = cholesky(a + lam * eye if lam else a)
        except NotPositiveDefiniteError:
            continue
        return CholeskyFactor(l=f.l, jitter_applied=lam)
    raise IrrecoverableMatrixError(
        f"matrix not positive definite even with jitter {max_jitter:g} on the diagonal"
    )


def condition_spd(sigma, max_jitter: float = DEFAULT_MAX_JITTER) -> tuple[np.ndarray, float]:
    """Return ``(sigma + lam*I, lam)`` with ``lam`` the smallest ladder value that factorizes."""
    a = _as_square(sigma)
    lam = factorize(a, max_jitter).jitter_applied
    out = a + lam * np.eye(a.shape[0]) if lam else a.copy()
    return out, lam


def _check_vector(factor: CholeskyFactor, b) -> np.ndarray:
    v = np.asarray(b, dtype=np.float64)
    if v.shape != (factor.n,):
        raise DimensionError(f"vector of shape {v.shape} does not match dimension {factor.n}")
    return v


def solve_spd(factor: CholeskyFactor, b) -> np.ndarray:
    """Solve ``(L L^T) x = b`` by a forward then a backward triangular solve."""
    return cho_solve((factor.l, True), _check_vector(factor, b), check_finite=False)


def transform_by_lt(factor: CholeskyFactor, w) -> np.ndarray:
    """``L^T w``; its squared norm is the quadratic form ``w^T Sigma w``."""
    return factor.l.T @ _check_vector(factor, w)
