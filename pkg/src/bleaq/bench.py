"""Benchmark harness: seeded repeated runs, order-statistic aggregation, savings ratios
and table/trace emission."""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Callable, Optional, Sequence

from .algorithm import BleaqConfig, RunReport, run
from .nested import run_nested
from .reference import TP_MEAN_LL_COMPARISON, TP_MEAN_LL_COMPARISON_COLUMNS, reference_row
from .testbed import SmdDims, get_problem

ALGORITHMS = ("bleaq", "nested")
FORMATS = ("csv", "json", "md")


@dataclass(frozen=True)
class ExperimentSpec:
    problems: tuple
    algorithm: str = "bleaq"
    runs: int = 31
    seed: int = 0
    overrides: dict = field(default_factory=dict)
    dims: Optional[SmdDims] = None
    fmt: str = "json"
    out_dir: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "problems", tuple(p.strip().upper() for p in self.problems))
        if not self.problems:
            raise ValueError("at least one problem is required")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}")
        if self.fmt not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}")
        for pid in self.problems:
            get_problem(pid, self.dims)  # unknown ids and bad dims fail here, before any run
        self.config()

    def seeds(self) -> list[int]:
        return [self.seed + i for i in range(self.runs)]

    def config(self, seed: Optional[int] = None) -> BleaqConfig:
        cfg = BleaqConfig().with_overrides(**self.overrides)
        return cfg if seed is None else cfg.with_overrides(seed=seed)


def report_filename(report: RunReport) -> str:
    return f"{report.problem['id']}_{report.algorithm}_seed{report.config['seed']}.json"


def _run_one(task: tuple) -> RunReport:
    pid, dims, algorithm, config = task
    problem, _ = get_problem(pid, dims)
    return (run if algorithm == "bleaq" else run_nested)(problem, config)


def run_experiment(
    spec: ExperimentSpec,
    workers: int = 1,
    progress: Optional[Callable[[RunReport], None]] = None,
) -> list[RunReport]:
    """Run every (problem, seed) pair; reports come back in (problem, seed) order.

    With ``out_dir`` set each report is written to ``out_dir/runs/`` as JSON.
    Non-converged runs are kept and flagged by their ``converged`` field.
    """
    tasks = [(pid, spec.dims, spec.algorithm, spec.config(s)) for pid in spec.problems for s in spec.seeds()]
    run_dir = None
    if spec.out_dir is not None:
        run_dir = Path(spec.out_dir) / "runs"
        run_dir.mkdir(parents=True, exist_ok=True)

    def finish(report: RunReport) -> RunReport:
        if run_dir is not None:
            (run_dir / report_filename(report)).write_text(report.to_json(indent=1))
        if progress is not None:
            progress(report)
        return report

    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            return [finish(r) for r in pool.map(_run_one, tasks)]
    return [finish(_run_one(t)) for t in tasks]


def load_reports(directory) -> list[RunReport]:
    """All RunReport JSON files under ``directory`` (or its ``runs/`` subdirectory), sorted by name."""
    directory = Path(directory)
    if (directory / "runs").is_dir():
        directory = directory / "runs"
    return [RunReport.from_dict(json.loads(p.read_text())) for p in sorted(directory.glob("*.json"))]


def lower_median(values: Sequence[float]) -> float:
    """Median; for an even count the lower of the two middle elements."""
    if not values:
        raise ValueError("median of an empty sequence")
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


@dataclass
class AggregateRow:
    problem: str
    algorithm: str
    runs: int
    failed: int
    best_ul_fe: int
    median_ul_fe: int
    mean_ul_fe: float
    worst_ul_fe: int
    best_ll_fe: int
    median_ll_fe: int
    mean_ll_fe: float
    worst_ll_fe: int
    median_ul_acc: Optional[float]
    mean_ul_acc: Optional[float]
    median_ll_acc: Optional[float]
    mean_ll_acc: Optional[float]
    acc_excluded: int
    median_ll_calls: int
    mean_ll_calls: float
    median_ll_fe_per_call: float
    mean_ll_fe_per_call: float


def aggregate(reports: Sequence[RunReport]) -> AggregateRow:
    """Order statistics of one problem/algorithm group.

    Failed (non-converged) runs count towards FE statistics but not towards accuracy.
    """
    if not reports:
        raise ValueError("aggregate needs at least one report")
    ids = {(r.problem["id"], r.algorithm) for r in reports}
    if len(ids) != 1:
        raise ValueError(f"reports mix problems or algorithms: {sorted(ids)}")
    (pid, algorithm), = ids
    ul = [r.counters["ul_fe"] for r in reports]
    ll = [r.counters["ll_fe"] for r in reports]
    calls = [r.counters["ll_calls"] for r in reports]
    ok = [r for r in reports if r.converged and r.accuracy is not None]
    ul_acc = [float(r.accuracy["ul"]) for r in ok]
    ll_acc = [float(r.accuracy["ll"]) for r in ok]
    has_opt = any(r.accuracy is not None for r in reports)

    def acc(stat, values):
        return stat(values) if values else None

    return AggregateRow(
        problem=pid,
        algorithm=algorithm,
        runs=len(reports),
        failed=sum(not r.converged for r in reports),
        best_ul_fe=min(ul),
        median_ul_fe=lower_median(ul),
        mean_ul_fe=statistics.fmean(ul),
        worst_ul_fe=max(ul),
        best_ll_fe=min(ll),
        median_ll_fe=lower_median(ll),
        mean_ll_fe=statistics.fmean(ll),
        worst_ll_fe=max(ll),
        median_ul_acc=acc(lower_median, ul_acc),
        mean_ul_acc=acc(statistics.fmean, ul_acc),
        median_ll_acc=acc(lower_median, ll_acc),
        mean_ll_acc=acc(statistics.fmean, ll_acc),
        acc_excluded=len(reports) - len(ok) if has_opt else 0,
        median_ll_calls=lower_median(calls),
        mean_ll_calls=statistics.fmean(calls),
        median_ll_fe_per_call=lower_median(ll) / max(1, lower_median(calls)),
        mean_ll_fe_per_call=statistics.fmean(ll) / max(1e-300, statistics.fmean(calls)),
    )


def aggregate_all(reports: Sequence[RunReport]) -> list[AggregateRow]:
    """One row per (problem, algorithm) group, in first-seen order."""
    groups: dict = {}
    for r in reports:
        groups.setdefault((r.problem["id"], r.algorithm), []).append(r)
    return [aggregate(g) for g in groups.values()]


@dataclass(frozen=True)
class SavingsRatio:
    problem: str
    median_ll: float
    median_ul: float
    mean_ll: float
    mean_ul: float


def savings_ratio(baseline: AggregateRow, candidate: AggregateRow) -> SavingsRatio:
    """Baseline FE divided by candidate FE for medians and means at both levels."""
    if baseline.problem != candidate.problem:
        raise ValueError("savings ratios compare rows of the same problem")
    return SavingsRatio(
        candidate.problem,
        baseline.median_ll_fe / candidate.median_ll_fe,
        baseline.median_ul_fe / candidate.median_ul_fe,
        baseline.mean_ll_fe / candidate.mean_ll_fe,
        baseline.mean_ul_fe / candidate.mean_ul_fe,
    )


def with_savings(value: float, ratio: float) -> str:
    """``"110366 (15.35)"``-style cell."""
    number = f"{value:.0f}" if float(value).is_integer() else f"{value:.2f}"
    return f"{number} ({ratio:.2f})"


# --- emission -------------------------------------------------------------------------

def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _render(header: list[str], rows: list[list], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([dict(zip(header, r)) for r in rows], indent=1) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows([[_cell(v) for v in r] for r in rows])
        return buf.getvalue()
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    for r in rows:
        lines.append("| " + " | ".join(_md_cell(v) for v in r) + " |")
    return "\n".join(lines) + "\n"


def _md_cell(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.6f}" if abs(value) < 1.0 else f"{value:.2f}"
    return str(value)


def rows_to_text(rows: Sequence[AggregateRow], fmt: str) -> str:
    header = [f.name for f in fields(AggregateRow)]
    return _render(header, [[getattr(r, h) for h in header] for r in rows], fmt)


def _convert(text: str, annotation: str):
    if text == "":
        return None
    if "int" in annotation:
        return int(text)
    if "float" in annotation:
        return float(text)
    return text


def rows_from_csv(text: str) -> list[AggregateRow]:
    """Inverse of ``rows_to_text(rows, "csv")``."""
    types = {f.name: str(f.type) for f in fields(AggregateRow)}
    reader = csv.DictReader(io.StringIO(text))
    return [AggregateRow(**{k: _convert(v, types[k]) for k, v in rec.items()}) for rec in reader]


def fe_table(rows: Sequence[AggregateRow], savings: Optional[dict] = None) -> tuple[list[str], list[list]]:
    """Best/median/mean/worst FE per level; median and mean carry savings when given."""
    header = ["problem", "best_ll_fe", "best_ul_fe", "median_ll_fe", "median_ul_fe",
              "mean_ll_fe", "mean_ul_fe", "worst_ll_fe", "worst_ul_fe"]
    out = []
    for r in rows:
        s = (savings or {}).get(r.problem)
        med_ll, med_ul, mean_ll, mean_ul = r.median_ll_fe, r.median_ul_fe, r.mean_ll_fe, r.mean_ul_fe
        if s is not None:
            med_ll, med_ul = with_savings(med_ll, s.median_ll), with_savings(med_ul, s.median_ul)
            mean_ll, mean_ul = with_savings(mean_ll, s.mean_ll), with_savings(mean_ul, s.mean_ul)
        out.append([r.problem, r.best_ll_fe, r.best_ul_fe, med_ll, med_ul, mean_ll, mean_ul,
                    r.worst_ll_fe, r.worst_ul_fe])
    return header, out


def accuracy_table(rows: Sequence[AggregateRow]) -> tuple[list[str], list[list]]:
    header = ["problem", "median_ul_acc", "median_ll_acc", "median_ll_calls", "mean_ul_acc",
              "mean_ll_acc", "mean_ll_calls", "median_ll_fe_per_call", "mean_ll_fe_per_call",
              "acc_excluded"]
    return header, [[getattr(r, h) for h in header] for r in rows]


def reference_table(rows: Sequence[AggregateRow]) -> tuple[list[str], list[list]]:
    """Measured medians next to the published ones (FE magnitudes are not comparable)."""
    header = ["problem", "algorithm", "median_ul_acc", "published_median_ul_acc", "median_ll_acc",
              "published_median_ll_acc", "median_ll_fe", "published_median_ll_fe"]
    out = []
    for r in rows:
        ref = reference_row(r.problem, r.algorithm)
        out.append([r.problem, r.algorithm, r.median_ul_acc, ref.get("median_ul_acc"), r.median_ll_acc,
                    ref.get("median_ll_acc"), r.median_ll_fe, ref.get("median_ll_fe")])
    return header, out


def comparison_table(rows: Sequence[AggregateRow]) -> tuple[list[str], list[list]]:
    """Mean LL FE of our runs beside the published mean LL FE of four methods (TP problems)."""
    header = ["problem", "mean_ll_fe"] + [f"published_{c}" for c in TP_MEAN_LL_COMPARISON_COLUMNS]
    out = []
    for r in rows:
        published = TP_MEAN_LL_COMPARISON.get(r.problem)
        if published is not None:
            out.append([r.problem, r.mean_ll_fe, *published])
    return header, out


TRACE_COLUMNS = ("generation", "elite_F", "elite_f", "alpha_u", "ul_fe", "ll_fe", "ll_calls", "psi_mse", "branch")


def trace_csv(report: RunReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    for row in report.trace:
        writer.writerow([_cell(row[c]) for c in TRACE_COLUMNS])
    return buf.getvalue()


def emit_tables(
    rows: Sequence[AggregateRow],
    fmt: str,
    path,
    reports: Sequence[RunReport] = (),
    savings: Optional[dict] = None,
) -> list[Path]:
    """Write summary, FE, accuracy, reference and comparison tables to ``path``, plus one
    convergence trace CSV and one mapping-snapshot JSON per report.

    Everything is rendered first; if writing fails, files already written are removed.
    """
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}")
    files = {f"summary.{fmt}": rows_to_text(rows, fmt)}
    for name, (header, body) in {
        "fe": fe_table(rows, savings),
        "accuracy": accuracy_table(rows),
        "reference": reference_table(rows),
        "comparison": comparison_table(rows),
    }.items():
        if body:
            files[f"{name}.{fmt}"] = _render(header, body, fmt)
    for r in reports:
        stem = report_filename(r)[: -len(".json")]
        files[f"traces/{stem}.csv"] = trace_csv(r)
        snaps = list(r.psi_snapshots)
        if r.psi_model is not None:
            snaps.append({"generation": "final", "model": r.psi_model})
        files[f"psi/{stem}.json"] = json.dumps(snaps, indent=1, sort_keys=True) + "\n"

    root = Path(path)
    written: list[Path] = []
    try:
        root.mkdir(parents=True, exist_ok=True)
        for rel, text in files.items():
            target = root / rel
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(text)
            written.append(target)
    except OSError:
        for p in written:
            p.unlink(missing_ok=True)
        raise
    return written


def format_row_summary(row: AggregateRow) -> str:
    """One human-readable line per aggregate row."""
    def num(v):
        return "-" if v is None or (isinstance(v, float) and math.isnan(v)) else f"{v:.6f}"
    return (f"{row.problem:<5} {row.algorithm:<6} runs={row.runs} failed={row.failed} "
            f"median_ul_acc={num(row.median_ul_acc)} median_ll_acc={num(row.median_ll_acc)} "
            f"median_ul_fe={row.median_ul_fe} median_ll_fe={row.median_ll_fe}")

