"""Benchmark harness: run heuristics against the exact oracle and write reports."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .errors import OscarError, SpecError
from .instance import Instance
from .linalg import factorize
from .metrics import BenchRecord, diagonal_dominance, hit_count, performance_ratio
from .oracle import DEFAULT_BUDGET, OracleResult, solve_exact, subset_count
from .selection import HEURISTICS

log = logging.getLogger(__name__)

HEURISTIC_ORDER = ("SR", "W", "F", "B", "OSCAR")
RECORD_COLUMNS = (
    "instance_id", "n", "k", "heuristic", "sharpe", "performance_pct", "hit_count",
    "wall_time_s", "oracle_exhausted", "jitter", "dominance",
)
TIME_COLUMNS = ("wall_time_s",)
DEFAULT_MAX_SUBSETS = 5_000_000


def resolve_k(n: int, ks: Sequence[int] = (), fractions: Sequence[float] = ()) -> list[int]:
    """Absolute k values plus ``ceil(f * n)`` for each fraction, sorted and deduplicated.

    Fractions are taken at their decimal value, so ``0.1 * 50`` is exactly 5.
    """
    out = set()
    for k in ks:
        if not 1 <= int(k) <= n:
            raise SpecError(f"k={k} outside 1..{n}")
        out.add(int(k))
    for f in fractions:
        exact = Fraction(str(f))
        if not 0 < exact <= 1:
            raise SpecError(f"k fraction {f} outside (0, 1]")
        out.add(max(1, math.ceil(exact * n)))
    if not out:
        raise SpecError("no cardinality given; use --k or --k-frac")
    return sorted(out)


@dataclass
class BenchConfig:
    ks: tuple[int, ...] = ()
    k_fracs: tuple[float, ...] = ()
    heuristics: tuple[str, ...] = HEURISTIC_ORDER
    oracle: bool = True
    oracle_budget: float = DEFAULT_BUDGET
    max_subsets: int = DEFAULT_MAX_SUBSETS
    force: bool = False
    rf: float = 0.0
    seed: int = 0
    jobs: int = 1
    inputs: tuple[str, ...] = ()

    def __post_init__(self):
        bad = [h for h in self.heuristics if h not in HEURISTICS]
        if bad or not self.heuristics:
            raise SpecError(f"unknown or empty heuristics {bad}; choose from {list(HEURISTICS)}")
        if self.jobs < 1:
            raise SpecError("--jobs must be >= 1")

    def digest(self) -> str:
        doc = asdict(self)
        doc.pop("jobs")
        blob = json.dumps(doc, sort_keys=True, default=list).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class BenchResult:
    records: list[BenchRecord]
    failures: list[str] = field(default_factory=list)
    config_hash: str = ""
    oracle_runs: dict = field(default_factory=dict)


def _cell(inst: Instance, k: int, cfg: BenchConfig, jitter: float, dominance: float):
    m = inst.moments
    recs: list[BenchRecord] = []
    failures: list[str] = []
    oracle: OracleResult | None = None
    if cfg.oracle:
        try:
            oracle = solve_exact(m, k, cfg.oracle_budget)
        except OscarError as exc:
            failures.append(f"{inst.instance_id} k={k} EXACT: {exc}")
        else:
            recs.append(BenchRecord(
                inst.instance_id, m.n, k, "EXACT", oracle.sharpe,
                100.0 if oracle.exhausted else None, k, 0.0, oracle.exhausted, jitter, dominance,
            ))
    for name in HEURISTIC_ORDER:
        if name not in cfg.heuristics:
            continue
        try:
            h = HEURISTICS[name](m, k)
        except OscarError as exc:
            failures.append(f"{inst.instance_id} k={k} {name}: {exc}")
            recs.append(BenchRecord(inst.instance_id, m.n, k, name, math.nan, None, None,
                                    0.0, None, jitter, dominance, error=str(exc)))
            continue
        perf = hits = None
        err = ""
        if oracle is not None:
            hits = hit_count(h.support, oracle.best.support)
            try:
                perf = performance_ratio(h, oracle)
            except OscarError as exc:
                err = str(exc)
                failures.append(f"{inst.instance_id} k={k} {name}: {exc}")
        recs.append(BenchRecord(
            inst.instance_id, m.n, k, name, h.sharpe, perf, hits, h.wall_time,
            None if oracle is None else oracle.exhausted, max(jitter, h.jitter), dominance, err,
        ))
    return recs, failures, oracle


def check_oracle_guard(instances: Sequence[Instance], cfg: BenchConfig) -> None:
    if not cfg.oracle or cfg.force:
        return
    for inst in instances:
        for k in resolve_k(inst.moments.n, cfg.ks, cfg.k_fracs):
            count = subset_count(inst.moments.n, k)
            if count > cfg.max_subsets:
                raise SpecError(
                    f"{inst.instance_id}: exact oracle would enumerate C({inst.moments.n},{k}) = "
                    f"{count:,} subsets (limit {cfg.max_subsets:,}); pass --force or --no-oracle"
                )


def run_bench(instances: Sequence[Instance], cfg: BenchConfig) -> BenchResult:
    check_oracle_guard(instances, cfg)
    jobs = []
    for inst in instances:
        m = inst.moments.excess(cfg.rf)
        inst = Instance(inst.instance_id, m, inst.meta)
        jitter = factorize(m.sigma).jitter_applied
        dom = diagonal_dominance(m.sigma) if m.n >= 2 else 1.0
        for k in resolve_k(m.n, cfg.ks, cfg.k_fracs):
            jobs.append((inst, k, jitter, dom))

    def run(job):
        inst, k, jitter, dom = job
        return _cell(inst, k, cfg, jitter, dom)

    if cfg.jobs > 1:
        with ThreadPoolExecutor(cfg.jobs) as pool:
            outputs = list(pool.map(run, jobs))
    else:
        outputs = [run(j) for j in jobs]

    result = BenchResult(records=[], config_hash=cfg.digest())
    for (inst, k, _, _), (recs, fails, oracle) in zip(jobs, outputs):
        result.records.extend(recs)
        result.failures.extend(fails)
        if oracle is not None:
            result.oracle_runs[(inst.instance_id, k)] = {
                "subsets_evaluated": oracle.subsets_evaluated,
                "total_subsets": oracle.total_subsets,
                "exhausted": oracle.exhausted,
                "skipped": [list(s) for s in oracle.skipped],
                "support": list(oracle.best.support),
            }
    order = {h: i for i, h in enumerate(HEURISTIC_ORDER + ("EXACT",))}
    result.records.sort(key=lambda r: (r.instance_id, r.k, order[r.heuristic]))
    return result


# --- report writers -------------------------------------------------------------

def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return "nan" if math.isnan(x) else repr(x)
    return str(x)


def record_row(r: BenchRecord) -> list[str]:
    return [
        r.instance_id, str(r.n), str(r.k), r.heuristic, _fmt(r.sharpe), _fmt(r.performance_pct),
        _fmt(r.hit_count), _fmt(r.wall_time), _fmt(r.oracle_exhausted), _fmt(r.jitter),
        _fmt(r.dominance),
    ]


def records_csv(records: Sequence[BenchRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RECORD_COLUMNS)
    for r in records:
        w.writerow(record_row(r))
    return buf.getvalue()


def records_jsonl(records: Sequence[BenchRecord], config_hash: str, seed: int) -> str:
    lines = []
    for r in records:
        doc = dict(zip(RECORD_COLUMNS, (
            r.instance_id, r.n, r.k, r.heuristic, r.sharpe, r.performance_pct, r.hit_count,
            r.wall_time, r.oracle_exhausted, r.jitter, r.dominance,
        )))
        doc["sharpe"] = None if math.isnan(r.sharpe) else r.sharpe
        doc["hit_pct"] = r.hit_pct
        doc["error"] = r.error
        doc["config_hash"] = config_hash
        doc["seed"] = seed
        lines.append(json.dumps(doc, sort_keys=False))
    return "\n".join(lines) + ("\n" if lines else "")


def _by(records):
    table = {}
    for r in records:
        table[(r.instance_id, r.k, r.heuristic)] = r
    return table


def table1_text(records: Sequence[BenchRecord], exhausted_label=True) -> str:
    """Time and performance per (instance, heuristic) cell, one block per k.

    Each cell is two lines: time above performance.
    """
    cells = _by(records)
    instances = sorted({(r.instance_id, r.n) for r in records})
    ks_by_inst = {i: sorted({r.k for r in records if r.instance_id == i}) for i, _ in instances}
    heur = [h for h in HEURISTIC_ORDER if any(r.heuristic == h for r in records)]
    has_exact = any(r.heuristic == "EXACT" for r in records)
    cols = heur + (["EXACT"] if has_exact else [])
    width = 11
    out = []
    if has_exact:
        ex = [r for r in records if r.heuristic == "EXACT"]
        label = ("exhausted-exact" if all(r.oracle_exhausted for r in ex)
                 else "best-found within budget (some cells not exhausted)")
        out.append(f"performance denominator: {label} enumeration oracle")
        out.append("")
    depth = max((len(v) for v in ks_by_inst.values()), default=0)
    for pos in range(depth):
        out.append(f"k block #{pos + 1}")
        out.append(f"{'Data':<20}{'N':>5}{'k':>5}  " + "".join(f"{c:>{width}}" for c in cols))
        for inst, n in instances:
            ks = ks_by_inst[inst]
            if pos >= len(ks):
                continue
            k = ks[pos]
            top, bottom = [], []
            for c in cols:
                r = cells.get((inst, k, c))
                if r is None:
                    top.append(""); bottom.append("")
                elif c == "EXACT":
                    top.append("exhausted" if r.oracle_exhausted else "budget")
                    bottom.append("100.00%" if r.oracle_exhausted else "")
                else:
                    top.append(f"{r.wall_time:.4f}s")
                    bottom.append("fail" if r.performance_pct is None and r.error
                                  else ("" if r.performance_pct is None else f"{r.performance_pct:.2f}%"))
            out.append(f"{inst:<20}{n:>5}{k:>5}  " + "".join(f"{t:>{width}}" for t in top))
            out.append(f"{'':<30}" + "".join(f"{b:>{width}}" for b in bottom))
        out.append("")
    return "\n".join(out)


def table2_text(records: Sequence[BenchRecord]) -> str:
    cells = _by(records)
    heur = [h for h in HEURISTIC_ORDER if any(r.heuristic == h for r in records)]
    keys = sorted({(r.instance_id, r.n, r.k) for r in records})
    out = [f"{'Data':<20}{'N':>5}{'k':>5}  " + "".join(f"{h:>8}" for h in heur)]
    for inst, n, k in keys:
        vals = []
        for h in heur:
            r = cells.get((inst, k, h))
            vals.append("" if r is None or r.hit_count is None else str(r.hit_count))
        out.append(f"{inst:<20}{n:>5}{k:>5}  " + "".join(f"{v:>8}" for v in vals))
    return "\n".join(out) + "\n"


def scatter_csv(records: Sequence[BenchRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("heuristic", "instance_id", "k", "wall_time_s", "performance_pct"))
    for r in records:
        if r.heuristic == "EXACT":
            continue
        w.writerow((r.heuristic, r.instance_id, r.k, _fmt(r.wall_time), _fmt(r.performance_pct)))
    return buf.getvalue()


def write_reports(result: BenchResult, out_dir, seed: int) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "records.csv": records_csv(result.records),
        "records.jsonl": records_jsonl(result.records, result.config_hash, seed),
        "table1.txt": table1_text(result.records),
        "table2.txt": table2_text(result.records),
        "scatter.csv": scatter_csv(result.records),
        "summary.json": json.dumps({
            "config_hash": result.config_hash,
            "seed": seed,
            "records": len(result.records),
            "failures": result.failures,
            "oracle": [
                {"instance_id": i, "k": k, **v}
                for (i, k), v in sorted(result.oracle_runs.items())
            ],
        }, indent=1) + "\n",
    }
    paths = {}
    for name, text in files.items():
        p = out / name
        p.write_text(text)
        paths[name] = p
    return paths
