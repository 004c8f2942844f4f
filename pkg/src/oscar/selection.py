"""OSCAR asset selection and the four baseline selection heuristics.

Every heuristic ends the same way: the chosen support is re-optimized with
the closed-form tangent solve on the sub-instance (sub-vector of ``mu``,
principal submatrix of ``Sigma``) and embedded back into length ``n``.
Ties in any ranking go to the lower asset index.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .errors import OscarError, SubsetError, ValidationError
from .linalg import factorize, transform_by_lt
from .market_data import MomentEstimate
from .tangent import sharpe, solve_tangent


@dataclass(frozen=True)
class SelectionOrder:
    ranked_assets: np.ndarray
    scores: np.ndarray

    def prefix(self, k: int) -> tuple[int, ...]:
        return tuple(int(i) for i in self.ranked_assets[:k])


@dataclass(frozen=True)
class SparsePortfolio:
    """Weights that are exactly zero off ``support`` (sorted ascending)."""

    support: tuple[int, ...]
    weights: np.ndarray
    sharpe: float
    heuristic: str
    wall_time: float = 0.0
    normalized: bool = True
    jitter: float = 0.0
    trace: tuple[int, ...] = ()
    notes: tuple[str, ...] = field(default=())

    @property
    def k(self) -> int:
        return len(self.support)


def rank_descending(scores: np.ndarray) -> np.ndarray:
    """Indices by score descending, ties by ascending index."""
    scores = np.asarray(scores, dtype=np.float64)
    return np.lexsort((np.arange(scores.size), -scores))


def _check_k(moments: MomentEstimate, k: int) -> None:
    if not 1 <= k <= moments.n:
        raise ValidationError(f"k={k} outside 1..{moments.n}")


def _tangent_on(moments: MomentEstimate, universe: Sequence[int]):
    sub = moments.subset(universe)
    try:
        f = factorize(sub.sigma)
        p = solve_tangent(sub, f, warn=False)
    except OscarError as exc:
        raise SubsetError(universe, exc) from exc
    return p, f.jitter_applied


def reoptimize(
    moments: MomentEstimate, support: Sequence[int], heuristic: str = "", **extra
) -> SparsePortfolio:
    """Tangent portfolio restricted to ``support``, embedded into length ``n``."""
    idx = tuple(sorted(int(i) for i in support))
    p, jitter = _tangent_on(moments, idx)
    w = np.zeros(moments.n)
    w[list(idx)] = p.weights
    w.setflags(write=False)
    notes = tuple(extra.pop("notes", ()))
    if not p.normalized:
        notes += ("degenerate budget on selected subset; weights left unnormalized",)
    return SparsePortfolio(
        support=idx,
        weights=w,
        sharpe=sharpe(w, moments),
        heuristic=heuristic,
        normalized=p.normalized,
        jitter=max(jitter, extra.pop("jitter", 0.0)),
        notes=notes,
        **extra,
    )


def _timed(fn):
    def run(moments: MomentEstimate, k: int) -> SparsePortfolio:
        _check_k(moments, k)
        t0 = time.perf_counter()
        out = fn(moments, k)
        elapsed = time.perf_counter() - t0
        return replace(out, wall_time=elapsed)

    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    run.__wrapped__ = fn
    return run


def _full_direction(moments: MomentEstimate):
    f = factorize(moments.sigma)
    w_hat = solve_tangent(moments, f, warn=False)
    return f, w_hat


def oscar_order(moments: MomentEstimate) -> SelectionOrder:
    """Rank assets by ``|L^T w_hat|`` descending, ``w_hat`` the full tangent portfolio.

    The ranking does not depend on ``k``; a k-selection is the length-k prefix.
    """
    f, w_hat = _full_direction(moments)
    scores = np.abs(transform_by_lt(f, w_hat.weights))
    return SelectionOrder(rank_descending(scores), scores)


@_timed
def select_oscar(moments: MomentEstimate, k: int) -> SparsePortfolio:
    """Optimize, select the top-k of ``|L^T w_hat|``, re-optimize."""
    f, w_hat = _full_direction(moments)
    scores = np.abs(transform_by_lt(f, w_hat.weights))
    chosen = rank_descending(scores)[:k]
    return reoptimize(moments, chosen, "OSCAR", jitter=f.jitter_applied)


def individual_sharpe(moments: MomentEstimate) -> tuple[np.ndarray, np.ndarray]:
    """Per-asset ``mu_i / sqrt(Sigma_ii)`` and a mask of zero-variance assets.

    Zero-variance assets score ``+inf`` / ``-inf`` by the sign of ``mu_i``
    (zero when ``mu_i`` is zero).
    """
    var = np.diag(moments.sigma)
    flat = ~(var > 0.0)
    scores = np.empty(moments.n)
    scores[~flat] = moments.mu[~flat] / np.sqrt(var[~flat])
    scores[flat] = np.sign(moments.mu[flat]) * np.where(moments.mu[flat] != 0, np.inf, 0.0)
    return scores, flat


@_timed
def select_topk_sharpe(moments: MomentEstimate, k: int) -> SparsePortfolio:
    """Top-k assets by individual Sharpe ratio, then re-optimize."""
    scores, flat = individual_sharpe(moments)
    chosen = rank_descending(scores)[:k]
    notes = ()
    if np.any(flat):
        names = [moments.tickers[i] for i in np.flatnonzero(flat)]
        notes = (f"zero-variance assets ranked at +/-inf: {names}",)
    return reoptimize(moments, chosen, "SR", notes=notes)


@_timed
def select_topk_weight(moments: MomentEstimate, k: int) -> SparsePortfolio:
    """Top-k assets by ``|w_hat_i|`` of the full tangent portfolio, then re-optimize."""
    f, w_hat = _full_direction(moments)
    chosen = rank_descending(np.abs(w_hat.weights))[:k]
    return reoptimize(moments, chosen, "W", jitter=f.jitter_applied)


@_timed
def select_forward(moments: MomentEstimate, k: int) -> SparsePortfolio:
    """Repeatedly solve on the not-yet-selected assets and take the largest ``|w_i|``."""
    remaining = list(range(moments.n))
    picked: list[int] = []
    jitter = 0.0
    for _ in range(k):
        p, lam = _tangent_on(moments, remaining)
        jitter = max(jitter, lam)
        j = int(rank_descending(np.abs(p.weights))[0])
        picked.append(remaining.pop(j))
    return reoptimize(moments, picked, "F", jitter=jitter, trace=tuple(picked))


@_timed
def select_backward(moments: MomentEstimate, k: int) -> SparsePortfolio:
    """Repeatedly solve on the surviving assets and discard the smallest ``|w_i|``."""
    universe = list(range(moments.n))
    discarded: list[int] = []
    jitter = 0.0
    while len(universe) > k:
        p, lam = _tangent_on(moments, universe)
        jitter = max(jitter, lam)
        j = int(rank_descending(-np.abs(p.weights))[0])
        discarded.append(universe.pop(j))
    return reoptimize(moments, universe, "B", jitter=jitter, trace=tuple(discarded))


HEURISTICS: dict[str, Callable[[MomentEstimate, int], SparsePortfolio]] = {
    "OSCAR": select_oscar,
    "SR": select_topk_sharpe,
    "W": select_topk_weight,
    "F": select_forward,
    "B": select_backward,
}
