"""Evaluation metrics: performance ratio, hit count, diagonal dominance, correlation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import UndefinedRatioError, ValidationError
from .oracle import OracleResult
from .selection import SparsePortfolio


@dataclass(frozen=True)
class BenchRecord:
    instance_id: str
    n: int
    k: int
    heuristic: str
    sharpe: float
    performance_pct: float | None
    hit_count: int | None
    wall_time: float
    oracle_exhausted: bool | None
    jitter: float
    dominance: float
    error: str = ""

    @property
    def hit_pct(self) -> float | None:
        if self.hit_count is None:
            return None
        return 100.0 * self.hit_count / self.k


def performance_ratio(h: SparsePortfolio | float, oracle: OracleResult | float) -> float:
    """Heuristic Sharpe as a percentage of the oracle Sharpe."""
    hs = h.sharpe if isinstance(h, SparsePortfolio) else float(h)
    os_ = oracle.sharpe if isinstance(oracle, OracleResult) else float(oracle)
    if not (math.isfinite(hs) and math.isfinite(os_)):
        raise UndefinedRatioError("non-finite Sharpe ratio")
    if not os_ > 0.0:
        raise UndefinedRatioError(f"oracle Sharpe {os_!r} is not positive")
    return 100.0 * (hs / os_)


def hit_count(h_support: Iterable[int], oracle_support: Iterable[int]) -> int:
    return len(set(h_support) & set(oracle_support))


def diagonal_dominance(sigma) -> float:
    """``m_d / (m_d + m_o)`` with ``m_d``, ``m_o`` the mean absolute diagonal and off-diagonal entries."""
    a = np.abs(np.asarray(sigma, dtype=np.float64))
    n = a.shape[0]
    if a.shape != (n, n) or n < 2:
        raise ValidationError("diagonal dominance needs a square matrix with n >= 2")
    diag = np.trace(a)
    m_d = diag / n
    m_o = (a.sum() - diag) / (n * n - n)
    return float(m_d / (m_d + m_o))


def pearson_correlation(xs: Sequence[float], ys: Sequence[float]) -> float:
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or x.size < 3:
        raise ValidationError("pearson correlation needs two equal-length sequences of length >= 3")
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise ValidationError("pearson correlation undefined for a constant sequence")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))
