"""Unconstrained tangent portfolio, Sharpe ratio and the Cholesky-space angle."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateAngleError, DegenerateRiskError, NoDirectionError, ValidationError
from .linalg import CholeskyFactor, factorize, solve_spd, transform_by_lt
from .market_data import MomentEstimate

MIN_VARIANCE = 1e-300
BUDGET_TOL = 1e-10


class BudgetDegeneracyWarning(UserWarning):
    """``1^T Sigma^-1 mu <= 0``: no positive rescaling sums to one."""


@dataclass(frozen=True)
class Portfolio:
    weights: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(w)):
            raise ValidationError("portfolio weights must be finite")
        if not np.any(w):
            raise ValidationError("portfolio weights are all zero")
        if self.normalized and abs(w.sum() - 1.0) > BUDGET_TOL:
            raise ValidationError(f"normalized portfolio sums to {w.sum()!r}")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "normalized", bool(self.normalized))


def _weights(w) -> np.ndarray:
    if isinstance(w, Portfolio):
        return w.weights
    return np.asarray(w, dtype=np.float64)


def solve_tangent(
    moments: MomentEstimate, factor: CholeskyFactor | None = None, warn: bool = True
) -> Portfolio:
    """Maximum-Sharpe portfolio in closed form, ``Sigma^-1 mu / (1^T Sigma^-1 mu)``.

    When the budget ``1^T Sigma^-1 mu`` is not positive the raw direction
    ``Sigma^-1 mu`` is returned unnormalized (flipping its sign would flip
    the Sharpe ratio) and a :class:`BudgetDegeneracyWarning` is issued.
    """
    if not np.any(moments.mu):
        raise NoDirectionError("expected returns are all zero; no tangent direction")
    if factor is None:
        factor = factorize(moments.sigma)
    x = solve_spd(factor, moments.mu)
    budget = float(x.sum())
    if budget > 0.0:
        w = x / budget
        return Portfolio(w, normalized=abs(w.sum() - 1.0) <= BUDGET_TOL)
    if warn:
        warnings.warn(
            f"tangent budget 1'Sigma^-1 mu = {budget:.3e} <= 0; keeping unnormalized direction",
            BudgetDegeneracyWarning,
            stacklevel=2,
        )
    return Portfolio(x, normalized=False)


def sharpe(w, moments: MomentEstimate) -> float:
    """``mu^T w / sqrt(w^T Sigma w)``, zero risk-free rate."""
    v = _weights(w)
    var = float(v @ moments.sigma @ v)
    if not var > MIN_VARIANCE:
        raise DegenerateRiskError(f"portfolio variance {var!r} is not positive")
    return float(moments.mu @ v) / math.sqrt(var)


def angle_to(w, ref, factor: CholeskyFactor) -> float:
    """Angle in radians between ``L^T w`` and ``L^T ref``."""
    a = transform_by_lt(factor, _weights(w))
    b = transform_by_lt(factor, _weights(ref))
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise DegenerateAngleError("transformed portfolio is the zero vector")
    cos = float(a @ b) / (na * nb)
    return math.acos(min(1.0, max(-1.0, cos)))
