"""Command-line harness.

Subcommands:
  run     solve one instance under an explicit configuration
  table2  dump the builders' variable/constraint counts (and the extended
          variable counts) for every catalogued instance
  table3  dump the bundled reference backtrack counts (informational only)
  sweep   run one of the preset experiment matrices

Exit codes: 0 ok, 1 infeasible, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from .bench import RunConfig, emit, run_matrix
from .data import table_rows
from .model import BOOL_INT, BOOL_NATIVE, SUM_DECOMPOSED, SUM_NATIVE, ModelError
from .problems import Instance, counts, parse_instance
from .restore import RestoreMode

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_CONFIG = 2

_BOOL_MODES = {"native": BOOL_NATIVE, "int": BOOL_INT}
_SUM_MODES = {"native": SUM_NATIVE, "decomposed": SUM_DECOMPOSED}


def _restore_mode(args):
    if args.restore == "trail":
        return RestoreMode.trail()
    if args.restore == "copy":
        return RestoreMode.copy()
    return RestoreMode.copy_recompute(args.rec_dist, args.adapt_dist)


def _add_run_options(parser):
    parser.add_argument(
        "--restore", choices=["trail", "copy", "copy-recompute"], default="trail"
    )
    parser.add_argument("--rec-dist", type=int, default=8, metavar="N")
    parser.add_argument("--adapt-dist", type=int, default=2, metavar="N")
    parser.add_argument(
        "--queue", choices=["fifo", "priority", "reversed"], default="fifo"
    )
    parser.add_argument(
        "--sum-eq", choices=["native", "decomposed"], default="native"
    )
    parser.add_argument(
        "--bool-vars", choices=["native", "int"], default="native"
    )
    parser.add_argument("--bnb", choices=["post", "tighten"], default="tighten")
    parser.add_argument(
        "--ext", action="store_true", help="use the padded (extended) model"
    )
    parser.add_argument("--runs", type=int, default=5, metavar="K")


def _add_output_options(parser):
    parser.add_argument("--out", metavar="FILE")
    parser.add_argument("--format", choices=["csv", "json"], default="csv")


def _emit(records, args):
    emit(
        records,
        format=args.format,
        path=args.out,
        stream=None if args.out else sys.stdout,
    )


def cmd_run(args):
    instance = parse_instance(args.model)
    if args.ext:
        instance = Instance(instance.problem, instance.params, extended=True)
    config = RunConfig(
        instance,
        bool_mode=_BOOL_MODES[args.bool_vars],
        sum_mode=_SUM_MODES[args.sum_eq],
        restore=_restore_mode(args),
        queue=args.queue,
        bnb=args.bnb,
        runs=args.runs,
    )
    records = run_matrix([config])
    record = records[0]
    if record.error is not None:
        print(f"error: {record.error}", file=sys.stderr)
        return EXIT_CONFIG
    _emit(records, args)
    return EXIT_OK if record.solutions > 0 else EXIT_INFEASIBLE


def cmd_table2(args):
    writer = csv.writer(args.out and open(args.out, "w", newline="") or sys.stdout)
    writer.writerow(
        ["model", "instance", "variables", "constraints", "constraints_decomposed"]
    )
    for row in table_rows("table2"):
        instance = parse_instance(f"{row['model']}:{row['instance']}")
        got = counts(instance)
        writer.writerow(
            [
                row["model"],
                row["instance"],
                got.variables,
                got.constraints_native,
                got.constraints_decomposed,
            ]
        )
    writer.writerow(["model", "instance", "variables", "variables_extended"])
    for row in table_rows("table4"):
        normal = parse_instance(f"{row['model']}:{row['instance']}")
        extended = Instance(normal.problem, normal.params, extended=True)
        writer.writerow(
            [
                row["model"],
                row["instance"],
                counts(normal).variables,
                counts(extended).variables,
            ]
        )
    return EXIT_OK


def cmd_table3(args):
    table = table_rows("table3")
    out = open(args.out, "w") if args.out else sys.stdout
    if args.format == "json":
        json.dump(
            {"note": "reference data from another solver; not asserted", "rows": table},
            out,
            indent=2,
        )
        out.write("\n")
    else:
        print("# reference backtrack counts from another solver; not asserted", file=out)
        writer = csv.writer(out)
        writer.writerow(["model", "instance", "backtracks"])
        for row in table:
            writer.writerow([row["model"], row["instance"], row["backtracks"]])
    return EXIT_OK


#: Small instances used by the preset sweeps so a full matrix stays fast.
_SWEEP_INSTANCES = {
    "boolint": ["golfers:2,3,3", "golfers:2,4,4", "bibd:7,3,2", "bibd:7,3,10"],
    "copy": ["queens:8", "golomb:7", "magic:4", "golfers:2,4,4", "bibd:7,3,2"],
    "trail": ["queens:8", "golomb:7", "magic:4", "golfers:2,4,4", "bibd:7,3,2"],
    "manyvars": ["queens:8", "queens:10", "golfers:2,3,3", "golfers:2,4,4"],
}


def _sweep_configs(suite, runs):
    instances = [parse_instance(s) for s in _SWEEP_INSTANCES[suite]]
    configs = []
    if suite == "boolint":
        for inst in instances:
            for mode in (BOOL_NATIVE, BOOL_INT):
                configs.append(RunConfig(inst, bool_mode=mode, runs=runs))
    elif suite == "copy":
        for inst in instances:
            for dist in (1, 2, 8, 16, 32):
                configs.append(
                    RunConfig(
                        inst, restore=RestoreMode.copy_recompute(dist), runs=runs
                    )
                )
    elif suite == "trail":
        for inst in instances:
            for mode in (RestoreMode.trail(), RestoreMode.copy()):
                configs.append(RunConfig(inst, restore=mode, runs=runs))
    else:  # manyvars
        for inst in instances:
            for extended in (False, True):
                variant = Instance(inst.problem, inst.params, extended)
                for mode in (RestoreMode.trail(), RestoreMode.copy()):
                    configs.append(RunConfig(variant, restore=mode, runs=runs))
    return configs


def cmd_sweep(args):
    records = run_matrix(_sweep_configs(args.suite, args.runs))
    _emit(records, args)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fdlab", description="finite-domain solver benchmark harness"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="solve one instance")
    p_run.add_argument("--model", required=True, metavar="NAME:PARAMS")
    _add_run_options(p_run)
    _add_output_options(p_run)
    p_run.set_defaults(func=cmd_run)

    p_t2 = sub.add_parser("table2", help="dump model-size counts")
    p_t2.add_argument("--out", metavar="FILE")
    p_t2.set_defaults(func=cmd_table2)

    p_t3 = sub.add_parser("table3", help="dump reference backtrack counts")
    p_t3.add_argument("--out", metavar="FILE")
    p_t3.add_argument("--format", choices=["csv", "json"], default="csv")
    p_t3.set_defaults(func=cmd_table3)

    p_sweep = sub.add_parser("sweep", help="run a preset experiment matrix")
    p_sweep.add_argument(
        "--suite",
        required=True,
        choices=["boolint", "copy", "trail", "manyvars"],
    )
    p_sweep.add_argument("--runs", type=int, default=5, metavar="K")
    _add_output_options(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ModelError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
