"""Command-line front end: ``bleaq {list-problems,run,aggregate,compare,report}``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import bench
from .reference import reference_row
from .testbed import get_problem, parse_dims, problem_ids

DEFAULTS = {"algo": "bleaq", "runs": 31, "seed": 0, "format": "md", "workers": 1}


def _problems(values) -> list[str]:
    out = []
    for v in values or []:
        out.extend(p for p in v.split(",") if p)
    return out


def _settings(args: argparse.Namespace) -> dict:
    """Merge defaults, the JSON config file and explicit flags (flags win)."""
    merged = dict(DEFAULTS)
    merged["config"] = {}
    if getattr(args, "config", None):
        data = json.loads(Path(args.config).read_text())
        unknown = set(data) - {"problem", "algo", "runs", "seed", "dims", "out", "format", "workers", "config"}
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        merged.update(data)
    for key in ("algo", "runs", "seed", "dims", "out", "format", "workers"):
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    if getattr(args, "problem", None):
        merged["problem"] = _problems(args.problem)
    elif isinstance(merged.get("problem"), str):
        merged["problem"] = _problems([merged["problem"]])
    return merged


def cmd_list_problems(args) -> int:
    dims = parse_dims(args.dims) if args.dims else None
    entries = []
    for pid in problem_ids():
        problem, oracle = get_problem(pid, dims if pid.startswith("SMD") else None)
        entry = problem.describe()
        entry["exact_mapping"] = oracle is not None
        entries.append(entry)
    if args.format == "json":
        print(json.dumps(entries, indent=1))
        return 0
    header = ["id", "n_upper", "n_lower", "n_upper_constraints", "n_lower_constraints", "F*", "f*", "dims"]
    rows = []
    for e in entries:
        opt = e["known_optimum"] or {}
        dims_text = ",".join(f"{k}={v}" for k, v in e["dims"].items())
        rows.append([e["id"], e["n_upper"], e["n_lower"], e["n_upper_constraints"], e["n_lower_constraints"],
                     opt.get("F"), opt.get("f"), dims_text])
    print(bench._render(header, rows, args.format), end="")
    return 0


def cmd_run(args) -> int:
    s = _settings(args)
    if not s.get("problem"):
        raise ValueError("--problem is required")
    spec = bench.ExperimentSpec(
        problems=tuple(s["problem"]),
        algorithm=s["algo"],
        runs=int(s["runs"]),
        seed=int(s["seed"]),
        overrides=dict(s["config"]),
        dims=parse_dims(s["dims"]) if s.get("dims") else None,
        fmt=s["format"],
        out_dir=s.get("out"),
    )

    def progress(report):
        acc = report.accuracy or {}
        print(f"{report.problem['id']} seed={report.config['seed']} {report.termination} "
              f"ul_acc={acc.get('ul', float('nan')):.6g} ll_acc={acc.get('ll', float('nan')):.6g} "
              f"ul_fe={report.counters['ul_fe']} ll_fe={report.counters['ll_fe']}",
              file=sys.stderr, flush=True)

    reports = bench.run_experiment(spec, workers=int(s["workers"]), progress=progress)
    rows = bench.aggregate_all(reports)
    for row in rows:
        print(bench.format_row_summary(row))
    if spec.out_dir is not None:
        bench.emit_tables(rows, spec.fmt, Path(spec.out_dir) / "tables", reports)
    return 0


def cmd_aggregate(args) -> int:
    reports = bench.load_reports(args.out)
    if not reports:
        raise ValueError(f"no run reports found in {args.out}")
    rows = bench.aggregate_all(reports)
    bench.emit_tables(rows, args.format, Path(args.out) / "tables", reports)
    print(bench.rows_to_text(rows, args.format), end="")
    return 0


def cmd_compare(args) -> int:
    base = {r.problem: r for r in bench.aggregate_all(bench.load_reports(args.baseline))}
    cand = {r.problem: r for r in bench.aggregate_all(bench.load_reports(args.candidate))}
    shared = [p for p in cand if p in base]
    if not shared:
        raise ValueError("baseline and candidate share no problems")
    savings = {p: bench.savings_ratio(base[p], cand[p]) for p in shared}
    header, body = bench.fe_table([cand[p] for p in shared], savings)
    print(bench._render(header, body, args.format), end="")
    if args.out:
        bench.emit_tables([cand[p] for p in shared], args.format, args.out, savings=savings)
    return 0


def cmd_report(args) -> int:
    if args.out and bench.load_reports(args.out):
        rows = bench.aggregate_all(bench.load_reports(args.out))
        header, body = bench.reference_table(rows)
    else:
        pids = _problems(args.problem) or problem_ids()
        header = ["problem", "median_ul_acc", "median_ll_acc", "median_ll_fe", "median_ul_fe"]
        body = []
        for pid in pids:
            ref = reference_row(pid.upper(), args.algo or "bleaq")
            if ref:
                body.append([pid.upper()] + [ref.get(h) for h in header[1:]])
    print(bench._render(header, body, args.format), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bleaq", description="Bilevel evolutionary benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list-problems", help="show the problem catalog")
    p.add_argument("--dims", help="SMD dimensions p,q,r[,s]")
    p.add_argument("--format", choices=bench.FORMATS, default="md")
    p.set_defaults(func=cmd_list_problems)

    p = sub.add_parser("run", help="run seeded trials and aggregate them")
    p.add_argument("--problem", action="append", help="problem id(s), repeatable or comma separated")
    p.add_argument("--algo", choices=bench.ALGORITHMS)
    p.add_argument("--runs", type=int)
    p.add_argument("--seed", type=int, help="base seed; run i uses seed + i")
    p.add_argument("--dims", help="SMD dimensions p,q,r[,s]")
    p.add_argument("--out", help="output directory for run reports and tables")
    p.add_argument("--format", choices=bench.FORMATS)
    p.add_argument("--workers", type=int, help="parallel worker processes")
    p.add_argument("--config", help="JSON file mirroring these flags; 'config' holds solver overrides")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("aggregate", help="aggregate stored run reports into tables")
    p.add_argument("--out", required=True, help="directory holding run reports")
    p.add_argument("--format", choices=bench.FORMATS, default="md")
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("compare", help="FE savings of a candidate over a baseline")
    p.add_argument("--baseline", required=True, help="directory with baseline (e.g. nested) reports")
    p.add_argument("--candidate", required=True, help="directory with candidate reports")
    p.add_argument("--out", help="directory for the savings tables")
    p.add_argument("--format", choices=bench.FORMATS, default="md")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("report", help="published reference figures, next to measured ones when available")
    p.add_argument("--problem", action="append")
    p.add_argument("--algo", choices=bench.ALGORITHMS)
    p.add_argument("--out", help="directory holding run reports")
    p.add_argument("--format", choices=bench.FORMATS, default="md")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
