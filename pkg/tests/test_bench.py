import csv
import io
import json
import math
import random

import pytest

from fdlab.bench import (
    CSV_COLUMNS,
    RunConfig,
    RunRecord,
    emit,
    load_records,
    ratio_report,
    run_matrix,
)
from fdlab.cli import main
from fdlab.problems import Instance, parse_instance
from fdlab.restore import RestoreMode
from fdlab.stats import cov, median, nodes_per_second


def test_median_example():
    assert median([10, 11, 12, 13, 100]) == 12


def test_cov_direct_formula():
    values = [10.0, 12.0, 9.0, 11.0]
    mean = sum(values) / len(values)
    stddev = math.sqrt(sum((v - mean) ** 2 for v in values) / len(values))
    assert cov(values) == pytest.approx(stddev / mean, rel=1e-12)
    assert cov([5.0]) == 0.0
    assert cov([0.0, 0.0]) == 0.0


def test_nps_definitional():
    assert nodes_per_second(500, 250.0) == pytest.approx(2000.0)


def test_run_config_validates_runs():
    with pytest.raises(ValueError):
        RunConfig(parse_instance("queens:4"), runs=0)


def test_matrix_restore_trajectory_invariance():
    inst = parse_instance("queens:8")
    records = run_matrix(
        [
            RunConfig(inst, restore=RestoreMode.trail(), runs=1),
            RunConfig(inst, restore=RestoreMode.copy(), runs=1),
            RunConfig(inst, restore=RestoreMode.copy_recompute(8), runs=1),
        ]
    )
    assert len(records) == 3
    assert len({(r.nodes, r.backtracks, r.solutions) for r in records}) == 1
    assert records[0].trail_entries > 0
    assert records[1].bytes_copied > 0
    assert records[2].recomputations > 0


def test_matrix_bool_mode_invariance():
    inst = parse_instance("golfers:2,4,4")
    records = run_matrix(
        [
            RunConfig(inst, bool_mode="native", runs=1),
            RunConfig(inst, bool_mode="int", runs=1),
        ]
    )
    assert records[0].backtracks == records[1].backtracks
    assert records[0].nodes == records[1].nodes


def test_matrix_continues_past_build_failure():
    records = run_matrix(
        [
            RunConfig(Instance("bibd", (8, 3, 1)), runs=1),  # bad divisibility
            RunConfig(parse_instance("queens:4"), runs=1),
        ]
    )
    assert records[0].error is not None
    assert records[1].error is None and records[1].solutions == 1


def test_matrix_reports_infeasible_without_error():
    (record,) = run_matrix([RunConfig(parse_instance("queens:3"), runs=1)])
    assert record.error is None
    assert record.solutions == 0


def test_repeated_runs_aggregate():
    (record,) = run_matrix([RunConfig(parse_instance("queens:6"), runs=5)])
    assert record.runs == 5
    assert record.solve_ms_median > 0
    assert record.cov >= 0
    assert record.nps == pytest.approx(
        record.nodes / (record.solve_ms_median / 1e3)
    )


def _sample_records():
    return run_matrix(
        [
            RunConfig(parse_instance("queens:6"), runs=1),
            RunConfig(parse_instance("queens:6"), restore=RestoreMode.copy(), runs=1),
        ]
    )


def test_emit_csv_columns_exact():
    records = _sample_records()
    text = emit(records, "csv")
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == CSV_COLUMNS
    assert len(rows) == 1 + len(records)


def test_emit_rejects_empty_and_unknown():
    with pytest.raises(ValueError):
        emit([], "csv")
    with pytest.raises(ValueError):
        emit(_sample_records(), "xml")


def test_json_round_trip(tmp_path):
    records = _sample_records()
    path = tmp_path / "records.json"
    emit(records, "json", path=str(path))
    assert load_records(str(path), "json") == records


def test_csv_round_trip(tmp_path):
    records = _sample_records()
    path = tmp_path / "records.csv"
    emit(records, "csv", path=str(path))
    assert load_records(str(path), "csv") == records


def _record(**kw):
    base = dict(
        model="queens",
        instance="6",
        extended=False,
        bool_mode="native",
        sum_mode="native",
        restore="trail",
        rec_dist=None,
        adapt_dist=None,
        queue="fifo",
        bnb="",
        runs=1,
        backtracks=10,
        solve_ms_median=100.0,
    )
    base.update(kw)
    return RunRecord(**base)


def test_ratio_report_examples():
    records = [
        _record(restore="trail", solve_ms_median=100.0),
        _record(restore="copy", solve_ms_median=100.0),
        _record(instance="8", restore="trail", solve_ms_median=200.0, backtracks=30),
        _record(instance="8", restore="copy", solve_ms_median=100.0, backtracks=30),
    ]
    rows = ratio_report(
        records, lambda r: r.restore == "trail", lambda r: r.restore == "copy"
    )
    assert [(r["backtracks"], r["ratio"]) for r in rows] == [(10, 1.0), (30, 2.0)]


def test_ratio_report_warns_on_unmatched():
    records = [_record(restore="trail")]
    with pytest.warns(UserWarning):
        rows = ratio_report(
            records, lambda r: r.restore == "trail", lambda r: r.restore == "copy"
        )
    assert rows == []


# -- CLI ----------------------------------------------------------------


def test_cli_run_ok(tmp_path, capsys):
    out = tmp_path / "run.csv"
    code = main(
        ["run", "--model", "queens:6", "--runs", "1", "--out", str(out)]
    )
    assert code == 0
    with open(out, newline="") as f:
        rows = list(csv.DictReader(f))
    assert rows[0]["model"] == "queens"
    assert int(rows[0]["solutions"]) == 1


def test_cli_run_full_flags(capsys):
    code = main(
        [
            "run", "--model", "golomb:5", "--restore", "copy-recompute",
            "--rec-dist", "4", "--adapt-dist", "2", "--queue", "priority",
            "--sum-eq", "decomposed", "--bnb", "post", "--runs", "1",
            "--format", "json",
        ]
    )
    assert code == 0
    (row,) = json.loads(capsys.readouterr().out)
    assert row["restore"] == "copy-recompute"
    assert row["rec_dist"] == 4
    assert row["bnb"] == "post"


def test_cli_infeasible_exit_code(capsys):
    assert main(["run", "--model", "queens:3", "--runs", "1"]) == 1


def test_cli_config_error_exit_code(capsys):
    assert main(["run", "--model", "sudoku:9"]) == 2
    assert main(["run", "--model", "queens:0"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["run", "--model", "queens:6", "--queue", "sideways"])
    assert exc.value.code == 2


def test_cli_table2_matches_bundled_counts(capsys):
    from fdlab.data import table_rows

    assert main(["table2"]) == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    second_header = rows.index(
        ["model", "instance", "variables", "variables_extended"]
    )
    sizes = {(r[0], r[1]): r[2:] for r in rows[1:second_header]}
    extended = {(r[0], r[1]): r[2:] for r in rows[second_header + 1 :]}
    for row in table_rows("table2"):
        assert sizes[(row["model"], row["instance"])] == [
            str(row["variables"]),
            str(row["constraints"]),
            str(row["constraints_decomposed"]),
        ]
    for row in table_rows("table4"):
        assert extended[(row["model"], row["instance"])] == [
            str(row["variables"]),
            str(row["variables_extended"]),
        ]


def test_cli_table3_marked_informational(capsys):
    assert main(["table3"]) == 0
    out = capsys.readouterr().out
    assert "not asserted" in out
    assert "399498" in out  # golfers 2,10,4 reference row


def test_cli_sweep_runs_suite(capsys):
    assert main(["sweep", "--suite", "trail", "--runs", "1"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert {r["restore"] for r in rows} == {"trail", "copy"}
