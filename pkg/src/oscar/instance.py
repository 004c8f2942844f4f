"""Canonical instance JSON: the exchange format between ingest and bench."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DataFormatError, ValidationError
from .linalg import factorize
from .market_data import (
    MomentEstimate,
    compute_returns,
    drop_incomplete_assets,
    estimate_moments,
    load_prices,
)


@dataclass(frozen=True)
class Instance:
    instance_id: str
    moments: MomentEstimate
    meta: dict = field(default_factory=dict)


def ingest_prices(path) -> Instance:
    """CSV prices -> cleaned returns -> moments, with estimation metadata."""
    path = Path(path)
    panel = drop_incomplete_assets(load_prices(path))
    returns = compute_returns(panel)
    moments = estimate_moments(returns)
    jitter = factorize(moments.sigma).jitter_applied
    meta = {
        "rows": int(returns.returns.shape[0]),
        "dropped": list(panel.dropped),
        "jitter": jitter,
    }
    return Instance(path.stem, moments, meta)


def to_json(inst: Instance) -> str:
    doc = {
        "tickers": list(inst.moments.tickers),
        "mu": inst.moments.mu.tolist(),
        "sigma": inst.moments.sigma.tolist(),
        "meta": inst.meta,
    }
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


def write_instance(inst: Instance, path) -> None:
    Path(path).write_text(to_json(inst))


def read_instance(path) -> Instance:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: invalid JSON: {exc.msg}", row=exc.lineno, column=exc.colno) from None
    for key in ("tickers", "mu", "sigma"):
        if key not in doc:
            raise ValidationError(f"{path}: instance is missing {key!r}")
    moments = MomentEstimate(doc["mu"], doc["sigma"], tuple(doc["tickers"]))
    meta = doc.get("meta", {})
    meta.setdefault("rows", None)
    meta.setdefault("dropped", [])
    meta.setdefault("jitter", 0.0)
    return Instance(path.stem, moments, meta)
