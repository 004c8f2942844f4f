"""Price ingestion, cleaning, returns and moment estimation."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DataError, DataFormatError, EmptyUniverseError, ValidationError


@dataclass(frozen=True)
class PricePanel:
    """Close prices, rows are dates and columns are tickers. Missing cells are NaN."""

    dates: tuple[date, ...]
    tickers: tuple[str, ...]
    prices: np.ndarray
    dropped: tuple[str, ...] = ()

    def __post_init__(self):
        if len(set(self.tickers)) != len(self.tickers):
            dupes = sorted({t for t in self.tickers if self.tickers.count(t) > 1})
            raise ValidationError(f"duplicate tickers: {dupes}")
        if self.prices.shape != (len(self.dates), len(self.tickers)):
            raise ValidationError(
                f"price matrix shape {self.prices.shape} != "
                f"({len(self.dates)} dates, {len(self.tickers)} tickers)"
            )
        for a, b in zip(self.dates, self.dates[1:]):
            if not a < b:
                raise ValidationError(f"dates not strictly increasing at {b.isoformat()}")


@dataclass(frozen=True)
class ReturnPanel:
    dates: tuple[date, ...]
    tickers: tuple[str, ...]
    returns: np.ndarray

    def __post_init__(self):
        if self.returns.ndim != 2 or self.returns.shape[1] != len(self.tickers):
            raise ValidationError("return matrix columns do not match tickers")
        if self.returns.shape[0] != len(self.dates):
            raise ValidationError("return matrix rows do not match dates")
        if not np.all(np.isfinite(self.returns)):
            raise DataError("returns contain non-finite entries")


@dataclass(frozen=True)
class MomentEstimate:
    """Expected returns ``mu`` and covariance ``sigma`` for ``n`` assets.

    ``sigma`` is symmetrized as ``(S + S^T) / 2`` on construction. Positive
    definiteness is not checked here; :func:`oscar.linalg.factorize` handles it.
    """

    mu: np.ndarray
    sigma: np.ndarray
    tickers: tuple[str, ...] = field(default=())

    def __post_init__(self):
        mu = np.array(self.mu, dtype=np.float64).reshape(-1)
        sigma = np.array(self.sigma, dtype=np.float64)
        if sigma.ndim != 2 or sigma.shape != (mu.size, mu.size):
            raise ValidationError(f"sigma shape {sigma.shape} does not match mu length {mu.size}")
        if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(sigma))):
            raise ValidationError("moments contain non-finite values")
        sigma = 0.5 * (sigma + sigma.T)
        tickers = tuple(self.tickers) if self.tickers else tuple(f"A{i}" for i in range(mu.size))
        if len(tickers) != mu.size:
            raise ValidationError("ticker count does not match mu length")
        mu.setflags(write=False)
        sigma.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "tickers", tickers)

    @property
    def n(self) -> int:
        return self.mu.size

    def subset(self, indices: Sequence[int]) -> "MomentEstimate":
        idx = np.asarray(indices, dtype=np.intp)
        return MomentEstimate(
            self.mu[idx], self.sigma[np.ix_(idx, idx)], tuple(self.tickers[i] for i in idx)
        )

    def excess(self, rf: float) -> "MomentEstimate":
        """Subtract a constant per-period risk-free rate from ``mu``."""
        if rf == 0:
            return self
        return MomentEstimate(self.mu - rf, self.sigma, self.tickers)


def _parse_float(text: str, row: int, column: int) -> float:
    text = text.strip()
    if text == "":
        return math.nan
    try:
        value = float(text)
    except ValueError:
        raise DataFormatError(f"not a number: {text!r}", row=row, column=column) from None
    if not math.isfinite(value):
        raise DataFormatError(f"non-finite value {text!r}", row=row, column=column)
    return value


def load_prices(path) -> PricePanel:
    """Read a wide CSV ``date,<ticker>,...``; empty cells are missing prices.

    Rows are returned sorted by date; columns keep file order. Row numbers in
    errors are 1-based file lines.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError("empty file", row=1) from None
        if len(header) < 2:
            raise DataFormatError("header needs a date column and at least one ticker", row=1)
        tickers = [h.strip() for h in header[1:]]
        for j, t in enumerate(tickers, start=2):
            if not t:
                raise DataFormatError("empty ticker name", row=1, column=j)
        if len(set(tickers)) != len(tickers):
            dupes = sorted({t for t in tickers if tickers.count(t) > 1})
            raise ValidationError(f"duplicate ticker header: {dupes}")

        rows: list[tuple[date, list[float], int]] = []
        for lineno, rec in enumerate(reader, start=2):
            if not rec or all(not c.strip() for c in rec):
                continue
            if len(rec) != len(header):
                raise DataFormatError(
                    f"expected {len(header)} fields, found {len(rec)}", row=lineno
                )
            try:
                d = date.fromisoformat(rec[0].strip())
            except ValueError:
                raise DataFormatError(f"bad ISO date {rec[0]!r}", row=lineno, column=1) from None
            vals = [_parse_float(c, lineno, j) for j, c in enumerate(rec[1:], start=2)]
            rows.append((d, vals, lineno))

    if not rows:
        raise DataFormatError("no data rows", row=2)
    rows.sort(key=lambda r: r[0])
    for (d0, _, _), (d1, _, line) in zip(rows, rows[1:]):
        if d0 == d1:
            raise ValidationError(f"duplicate date {d1.isoformat()} (row {line})")
    prices = np.array([r[1] for r in rows], dtype=np.float64)
    return PricePanel(tuple(r[0] for r in rows), tuple(tickers), prices)


def drop_incomplete_assets(panel: PricePanel) -> PricePanel:
    """Keep only assets priced on every date; the rest go to ``dropped``."""
    complete = ~np.any(np.isnan(panel.prices), axis=0)
    if not np.any(complete):
        raise EmptyUniverseError("every asset has at least one missing price")
    keep = np.flatnonzero(complete)
    dropped = tuple(t for t, ok in zip(panel.tickers, complete) if not ok)
    return PricePanel(
        panel.dates,
        tuple(panel.tickers[i] for i in keep),
        panel.prices[:, keep].copy(),
        dropped=panel.dropped + dropped,
    )


def compute_returns(panel: PricePanel) -> ReturnPanel:
    """Simple returns ``p[t+1] / p[t] - 1``."""
    p = panel.prices
    if len(panel.dates) < 3:
        raise DataError(f"need at least 3 dates, got {len(panel.dates)}")
    if np.any(np.isnan(p)):
        raise DataError("panel has missing prices; drop incomplete assets first")
    bad = np.argwhere(p <= 0.0)
    if bad.size:
        t, i = bad[0]
        raise DataError(
            f"non-positive price {p[t, i]!r} for {panel.tickers[i]} on {panel.dates[t].isoformat()}"
        )
    returns = p[1:] / p[:-1] - 1.0
    return ReturnPanel(panel.dates[1:], panel.tickers, returns)


def estimate_moments(returns: ReturnPanel) -> MomentEstimate:
    """Sample means and unbiased sample covariance (divisor rows - 1)."""
    r = returns.returns
    if r.shape[0] < 2:
        raise DataError(f"need at least 2 return rows, got {r.shape[0]}")
    mu = r.mean(axis=0)
    centered = r - mu
    sigma = centered.T @ centered / (r.shape[0] - 1)
    return MomentEstimate(mu, sigma, returns.tickers)
