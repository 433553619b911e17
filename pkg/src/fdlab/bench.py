"""Benchmark harness: experiment matrices over (instance x configuration),
repeated runs with median/CoV aggregation, CSV/JSON emission, and ratio
tables.

A configuration fully determines the search trajectory, so the trajectory
columns (nodes, backtracks, solutions, restoration counters) must agree
across repetitions; only the timings vary.
"""

from __future__ import annotations

import csv
import json
import time
import warnings
from dataclasses import dataclass, field

from .model import BOOL_NATIVE, SUM_NATIVE, ModelError
from .problems import Instance, build, check_solution
from .restore import RestoreMode
from .search import minimize, solve
from .stats import cov, median, nodes_per_second

#: Exact emission order for both CSV and JSON.
CSV_COLUMNS = [
    "model",
    "instance",
    "extended",
    "bool_mode",
    "sum_mode",
    "restore",
    "rec_dist",
    "adapt_dist",
    "queue",
    "bnb",
    "runs",
    "nodes",
    "backtracks",
    "solutions",
    "setup_ms_median",
    "solve_ms_median",
    "cov",
    "nps",
    "bytes_copied",
    "trail_entries",
    "snapshots",
    "recomputations",
]

_TRAJECTORY_FIELDS = (
    "nodes",
    "backtracks",
    "solutions",
    "bytes_copied",
    "trail_entries",
    "snapshots",
    "recomputations",
)


@dataclass(frozen=True)
class RunConfig:
    """One experiment cell; deterministic, no seeds involved."""

    instance: Instance
    bool_mode: str = BOOL_NATIVE
    sum_mode: str = SUM_NATIVE
    restore: RestoreMode = RestoreMode.trail()
    queue: str = "fifo"
    bnb: str = "tighten"
    runs: int = 5

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be at least 1")


@dataclass
class RunRecord:
    """Aggregated result of one configuration, ready for emission."""

    model: str
    instance: str
    extended: bool
    bool_mode: str
    sum_mode: str
    restore: str
    rec_dist: int | None
    adapt_dist: int | None
    queue: str
    bnb: str
    runs: int
    nodes: int = 0
    backtracks: int = 0
    solutions: int = 0
    setup_ms_median: float = 0.0
    solve_ms_median: float = 0.0
    cov: float = 0.0
    nps: float = 0.0
    bytes_copied: int = 0
    trail_entries: int = 0
    snapshots: int = 0
    recomputations: int = 0
    error: str | None = None

    @classmethod
    def from_config(cls, config):
        inst = config.instance
        mode = config.restore
        is_cr = mode.variant == "copy-recompute"
        return cls(
            model=inst.problem,
            instance=",".join(str(p) for p in inst.params),
            extended=inst.extended,
            bool_mode=config.bool_mode,
            sum_mode=config.sum_mode,
            restore=mode.variant,
            rec_dist=mode.distance if is_cr else None,
            adapt_dist=mode.adaptive if is_cr else None,
            queue=config.queue,
            bnb=config.bnb if inst.is_optimization else "",
            runs=config.runs,
        )


def run_once(config):
    """Build and solve one configuration once; returns (stats, failure).

    ``failure`` is None on success, otherwise a description (no solution
    found, or a solution the independent checker rejected).
    """
    inst = config.instance
    t0 = time.perf_counter()
    model = build(inst, bool_mode=config.bool_mode, sum_mode=config.sum_mode)
    build_ms = (time.perf_counter() - t0) * 1e3
    if inst.is_optimization:
        best, stats = minimize(
            model,
            bnb=config.bnb,
            restore=config.restore,
            queue=config.queue,
            build_ms=build_ms,
        )
        if best is None:
            return stats, "infeasible"
        bad = check_solution(inst, best.values)
    else:
        sols, stats = solve(
            model,
            mode="first",
            restore=config.restore,
            queue=config.queue,
            build_ms=build_ms,
        )
        if not sols:
            return stats, "infeasible"
        bad = check_solution(inst, sols[0].values)
    return stats, (f"checker rejected solution: {bad}" if bad else None)


def run_matrix(configs):
    """Execute each configuration ``runs`` times and aggregate.

    A configuration that fails to build (or whose solution fails the
    checker) yields a record with ``error`` set; the matrix continues.
    Infeasible instances are reported in the record, not as errors.
    """
    records = []
    for config in configs:
        record = RunRecord.from_config(config)
        setup_times = []
        solve_times = []
        reference = None
        try:
            for _ in range(config.runs):
                stats, failure = run_once(config)
                if failure and failure != "infeasible":
                    raise ModelError(failure)
                fields = (
                    stats.nodes,
                    stats.backtracks,
                    stats.solutions,
                    stats.restore.bytes_copied,
                    stats.restore.trail_entries,
                    stats.restore.snapshots_taken,
                    stats.restore.recomputations,
                )
                if reference is None:
                    reference = fields
                else:
                    assert fields == reference, (
                        "non-deterministic trajectory for "
                        f"{config.instance}: {fields} != {reference}"
                    )
                setup_times.append(stats.setup_ms)
                solve_times.append(stats.solve_ms)
        except (ModelError, ValueError) as exc:
            record.error = str(exc)
            records.append(record)
            continue
        for name, value in zip(_TRAJECTORY_FIELDS, reference):
            setattr(record, name, value)
        record.setup_ms_median = median(setup_times)
        record.solve_ms_median = median(solve_times)
        record.cov = cov(solve_times)
        record.nps = nodes_per_second(record.nodes, record.solve_ms_median)
        records.append(record)
    return records


def ratio_report(records, numerator, denominator):
    """Pair records per (model, instance, extended) and report the ratio of
    median solve times, keyed by backtracks.

    ``numerator`` and ``denominator`` are predicates over RunRecord.
    Unmatched pairs are omitted with a warning.
    """

    def index(pred):
        out = {}
        for r in records:
            if r.error is None and pred(r):
                out[(r.model, r.instance, r.extended)] = r
        return out

    nums = index(numerator)
    dens = index(denominator)
    rows = []
    for key in sorted(set(nums) | set(dens)):
        if key not in nums or key not in dens:
            warnings.warn(f"ratio_report: unmatched pair for {key}", stacklevel=2)
            continue
        num, den = nums[key], dens[key]
        if den.solve_ms_median == 0:
            warnings.warn(f"ratio_report: zero denominator for {key}", stacklevel=2)
            continue
        rows.append(
            {
                "model": num.model,
                "instance": num.instance,
                "backtracks": num.backtracks,
                "ratio": num.solve_ms_median / den.solve_ms_median,
            }
        )
    rows.sort(key=lambda r: r["backtracks"])
    return rows


def _row(record):
    return {col: getattr(record, col) for col in CSV_COLUMNS}


def emit(records, format="csv", path=None, stream=None):
    """Write records in deterministic (input) order as CSV or JSON."""
    if not records:
        raise ValueError("no records to emit")
    if format not in ("csv", "json"):
        raise ValueError(f"unknown format {format!r}")
    rows = [_row(r) for r in records]
    if format == "json":
        text = json.dumps(rows, indent=2) + "\n"
    else:
        import io

        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(
                {k: ("" if v is None else v) for k, v in row.items()}
            )
        text = buf.getvalue()
    if path is not None:
        with open(path, "w") as f:
            f.write(text)
    if stream is not None:
        stream.write(text)
    return text


def load_records(path, format="json"):
    """Read back emitted records (the inverse of :func:`emit`)."""
    if format == "json":
        with open(path) as f:
            rows = json.load(f)
    elif format == "csv":
        with open(path, newline="") as f:
            rows = [_coerce_csv_row(row) for row in csv.DictReader(f)]
    else:
        raise ValueError(f"unknown format {format!r}")
    return [RunRecord(**row) for row in rows]


def _coerce_csv_row(row):
    out = dict(row)
    out["extended"] = row["extended"] == "True"
    for col in ("rec_dist", "adapt_dist"):
        out[col] = int(row[col]) if row[col] else None
    for col in (
        "runs",
        "nodes",
        "backtracks",
        "solutions",
        "bytes_copied",
        "trail_entries",
        "snapshots",
        "recomputations",
    ):
        out[col] = int(row[col])
    for col in ("setup_ms_median", "solve_ms_median", "cov", "nps"):
        out[col] = float(row[col])
    return out
