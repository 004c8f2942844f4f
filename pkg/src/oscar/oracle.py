"""Exhaustive ground truth: enumerate every k-subset and re-optimize on each.

Subsets are visited in lexicographic order in fixed-size chunks. Each chunk
is scored in one batched Cholesky; a chunk containing a non-factorizable
principal submatrix falls back to per-subset conditioning. The winning subset
is re-solved through :func:`oscar.selection.reoptimize` so its weights and
Sharpe ratio are produced by exactly the same code path as the heuristics.
"""

from __future__ import annotations

import itertools
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import OscarError, ValidationError
from .linalg import factorize, solve_spd
from .market_data import MomentEstimate
from .selection import SparsePortfolio, reoptimize

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 300.0
CHUNK = 4096
RATIONALE = (
    "exhaustive enumeration of all C(n,k) supports with closed-form re-optimization; "
    "exhausted results cannot be beaten by any k-sparse portfolio"
)


@dataclass(frozen=True)
class OracleResult:
    best: SparsePortfolio
    subsets_evaluated: int
    exhausted: bool
    budget_seconds: float
    total_subsets: int
    skipped: tuple[tuple[int, ...], ...] = ()
    rationale: str = field(default=RATIONALE)

    @property
    def sharpe(self) -> float:
        return self.best.sharpe


@dataclass(frozen=True)
class _Candidate:
    score: float
    subset: tuple[int, ...]

    def beats(self, other: "_Candidate | None") -> bool:
        if other is None:
            return True
        if self.score != other.score:
            return self.score > other.score
        return self.subset < other.subset


def best_of(a: "_Candidate | None", b: "_Candidate | None") -> "_Candidate | None":
    """Associative reduction: higher Sharpe wins, ties go to the lexicographically smaller subset."""
    if b is None:
        return a
    return b if b.beats(a) else a


def subset_count(n: int, k: int) -> int:
    return math.comb(n, k)


def _score_one(moments: MomentEstimate, subset: tuple[int, ...]) -> float:
    sub = moments.subset(subset)
    f = factorize(sub.sigma)
    x = solve_spd(f, sub.mu)
    return math.sqrt(max(float(sub.mu @ x), 0.0))


def _score_chunk(moments, combos, skipped) -> _Candidate | None:
    idx = np.asarray(combos, dtype=np.intp)
    mats = moments.sigma[idx[:, :, None], idx[:, None, :]]
    vecs = moments.mu[idx]
    try:
        chol = np.linalg.cholesky(mats)
    except np.linalg.LinAlgError:
        chol = None
    if chol is not None:
        z = np.linalg.solve(chol, vecs[:, :, None])[:, :, 0]
        scores = np.sqrt(np.einsum("ij,ij->i", z, z))
        i = int(np.argmax(scores))
        return _Candidate(float(scores[i]), tuple(combos[i]))
    best = None
    for c in combos:
        try:
            s = _score_one(moments, tuple(c))
        except OscarError as exc:
            log.warning("oracle skipped subset %s: %s", c, exc)
            skipped.append(tuple(c))
            continue
        best = best_of(best, _Candidate(s, tuple(c)))
    return best


def solve_exact(
    moments: MomentEstimate, k: int, budget: float = DEFAULT_BUDGET, chunk: int = CHUNK
) -> OracleResult:
    """Best k-subset by exhaustive search, stopping early when ``budget`` seconds elapse.

    The budget is checked between chunks, so a run can overshoot by one chunk.
    """
    n = moments.n
    if not 1 <= k <= n:
        raise ValidationError(f"k={k} outside 1..{n}")
    if not np.any(moments.mu):
        raise ValidationError("expected returns are all zero")
    total = subset_count(n, k)
    deadline = time.monotonic() + budget
    best: _Candidate | None = None
    skipped: list[tuple[int, ...]] = []
    evaluated = 0
    it = itertools.combinations(range(n), k)
    while True:
        combos = list(itertools.islice(it, chunk))
        if not combos:
            break
        best = best_of(best, _score_chunk(moments, combos, skipped))
        evaluated += len(combos)
        if evaluated < total and time.monotonic() > deadline:
            log.warning("oracle budget %.1fs exhausted after %d/%d subsets", budget, evaluated, total)
            break
    if best is None:
        raise OscarError(f"oracle found no factorizable {k}-subset")
    return OracleResult(
        best=reoptimize(moments, best.subset, "EXACT"),
        subsets_evaluated=evaluated,
        exhausted=evaluated == total,
        budget_seconds=budget,
        total_subsets=total,
        skipped=tuple(skipped),
    )
