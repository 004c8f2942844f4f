"""Command-line entry point: ``oscar {ingest,bench,sweep,solve}``.

Exit codes: 0 success, 1 cell failures under ``--strict``, 2 input error,
3 internal error. ``OSCAR_LOG`` sets the log level (default WARNING).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from pathlib import Path

from .bench import BenchConfig, HEURISTIC_ORDER, resolve_k, run_bench, write_reports
from .errors import OscarError
from .instance import Instance, ingest_prices, read_instance, to_json
from .selection import HEURISTICS
from .synth import STRUCTURES, SynthSpec, dominance_sweep, generate

log = logging.getLogger("oscar")

EXIT_OK, EXIT_PARTIAL, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


def _csv_list(cast):
    def parse(text):
        try:
            return [cast(t) for t in text.split(",") if t.strip()]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    return parse


def parse_synth(text: str, seed: int) -> SynthSpec:
    """``structure=factor,n=14,rho=0.3,factors=3,idio=3.0,index=0``."""
    kw: dict = {"seed": seed}
    casts = {"n": int, "rho": float, "factors": int, "idio": float, "index": int,
             "seed": int, "structure": str}
    for part in text.split(","):
        if not part.strip():
            continue
        key, _, value = part.partition("=")
        key = key.strip()
        if key not in casts:
            raise OscarError(f"unknown synth key {key!r}; known: {sorted(casts)}")
        kw["idio_scale" if key == "idio" else key] = casts[key](value.strip())
    if "n" not in kw:
        raise OscarError("synth spec needs n=<assets>")
    return SynthSpec(**kw)


def load_instances(args) -> list[Instance]:
    instances = []
    for path in args.input or []:
        p = Path(path)
        if not p.exists():
            raise OscarError(f"input not found: {p}")
        instances.append(ingest_prices(p) if p.suffix.lower() == ".csv" else read_instance(p))
    if getattr(args, "synth", None):
        base = parse_synth(args.synth, args.seed)
        for i in range(args.instances):
            spec = SynthSpec(**{**base.__dict__, "index": base.index + i})
            sid = f"{spec.structure}-n{spec.n}-s{spec.seed}-i{spec.index}"
            instances.append(Instance(sid, generate(spec), {"rows": None, "dropped": [], "jitter": 0.0}))
    if not instances:
        raise OscarError("no input; give --input FILE or --synth SPEC")
    return instances


def cmd_ingest(args) -> int:
    inst = ingest_prices(args.input[0])
    text = to_json(inst)
    if args.out:
        out = Path(args.out)
        if out.suffix.lower() != ".json":
            out.mkdir(parents=True, exist_ok=True)
            out = out / f"{inst.instance_id}.json"
        out.write_text(text)
        print(out)
    else:
        sys.stdout.write(text)
    if args.dropped_report:
        Path(args.dropped_report).write_text(json.dumps(inst.meta["dropped"]) + "\n")
    return EXIT_OK


def _config(args) -> BenchConfig:
    return BenchConfig(
        ks=tuple(args.k or ()), k_fracs=tuple(args.k_frac or ()),
        heuristics=tuple(args.heuristics), oracle=args.oracle,
        oracle_budget=args.oracle_budget, max_subsets=args.max_subsets, force=args.force,
        rf=args.rf, seed=args.seed, jobs=args.jobs,
        inputs=tuple(args.input or ()) + ((f"synth:{args.synth}x{args.instances}",) if args.synth else ()),
    )


def cmd_bench(args) -> int:
    cfg = _config(args)
    instances = load_instances(args)
    result = run_bench(instances, cfg)
    paths = write_reports(result, args.out, cfg.seed)
    sys.stdout.write(paths["table1.txt"].read_text())
    if result.failures:
        print(f"{len(result.failures)} cell failure(s):", file=sys.stderr)
        for f in result.failures:
            print(f"  {f}", file=sys.stderr)
        return EXIT_PARTIAL if args.strict else EXIT_OK
    return EXIT_OK


def cmd_sweep(args) -> int:
    res = dominance_sweep(
        args.n, args.k[0] if args.k else 4, args.rhos, args.seeds,
        base_seed=args.seed, budget=args.oracle_budget, jobs=args.jobs,
    )
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("rho", "seed", "dominance", "performance_pct", "oracle_exhausted"))
    for r in res.rows:
        w.writerow((repr(r.rho), r.seed, repr(r.dominance),
                    "" if r.performance_pct is None else repr(r.performance_pct),
                    "true" if r.oracle_exhausted else "false"))
    summary = {
        "n": args.n, "k": args.k[0] if args.k else 4, "seed": args.seed,
        "correlation": res.correlation,
        "per_rho_mean": {repr(k): v for k, v in res.per_rho_mean.items()},
        "excluded": [list(e) for e in res.excluded],
    }
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "sweep.csv").write_text(buf.getvalue())
    (out / "sweep_summary.json").write_text(json.dumps(summary, indent=1) + "\n")
    print(json.dumps(summary, indent=1))
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = load_instances(args)[0]
    m = inst.moments.excess(args.rf)
    k = resolve_k(m.n, args.k or (), args.k_frac or ())[0]
    p = HEURISTICS[args.heuristic](m, k)
    warnings_out = list(p.notes)
    if p.jitter:
        warnings_out.append(f"covariance conditioned with jitter {p.jitter:g}")
    doc = {
        "instance_id": inst.instance_id,
        "heuristic": args.heuristic,
        "k": k,
        "support": [m.tickers[i] for i in p.support],
        "weights": {m.tickers[i]: float(p.weights[i]) for i in p.support},
        "sharpe": p.sharpe,
        "normalized": p.normalized,
        "wall_time": p.wall_time,
        "warnings": warnings_out,
    }
    print(json.dumps(doc, indent=1))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oscar", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, multi_input=True):
        p.add_argument("--input", action="append", metavar="FILE",
                       help="price CSV or instance JSON (repeatable)" if multi_input else "price CSV")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--rf", type=float, default=0.0, help="per-period risk-free rate subtracted from mu")

    def with_k(p):
        p.add_argument("--k", type=_csv_list(int), help="absolute cardinalities, e.g. 3,5")
        p.add_argument("--k-frac", type=_csv_list(float), help="fractions of n, rounded up, e.g. 0.05,0.1")

    def with_synth(p):
        p.add_argument("--synth", metavar="SPEC",
                       help=f"synthetic instance, e.g. structure=factor,n=14 (structures: {', '.join(STRUCTURES)})")
        p.add_argument("--instances", type=int, default=1, help="number of synthetic instances")

    p = sub.add_parser("ingest", help="price CSV -> instance JSON")
    common(p, multi_input=False)
    p.add_argument("--out", help="output JSON file or directory (default stdout)")
    p.add_argument("--dropped-report", metavar="FILE", help="write dropped tickers as a JSON list")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("bench", help="run heuristics against the exact oracle")
    common(p)
    with_k(p)
    with_synth(p)
    p.add_argument("--heuristics", type=_csv_list(str), default=list(HEURISTIC_ORDER))
    p.add_argument("--oracle", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--oracle-budget", type=float, default=300.0, metavar="SECONDS")
    p.add_argument("--max-subsets", type=int, default=5_000_000)
    p.add_argument("--force", action="store_true", help="run the oracle past the subset-count guard")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="bench_out")
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("sweep", help="diagonal-dominance vs OSCAR performance sweep")
    p.add_argument("--n", type=int, default=14)
    p.add_argument("--k", type=_csv_list(int))
    p.add_argument("--rhos", type=_csv_list(float), default=[0.0, 0.3, 0.6, 0.9])
    p.add_argument("--seeds", type=int, default=30, help="instances per rho")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--oracle-budget", type=float, default=300.0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="sweep_out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("solve", help="one heuristic on one instance, JSON to stdout")
    common(p)
    with_k(p)
    with_synth(p)
    p.add_argument("--heuristic", choices=list(HEURISTICS), default="OSCAR")
    p.set_defaults(func=cmd_solve)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("OSCAR_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    if args.command == "ingest" and not args.input:
        print("oscar ingest: --input is required", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (OscarError, OSError) as exc:
        print(f"oscar {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception:
        log.exception("internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
