import csv
import io
import json
from pathlib import Path

import pytest

from sparse_series.cli import main
from sparse_series.criteria import (
    PASS,
    CheckpointSchedule,
    ConditionRow,
    CriterionReport,
    check_theorem_main,
    witness_search,
)
from sparse_series.errors import InvalidInput
from sparse_series.report import parse_report, render_report
from sparse_series.sequences import indicator_sequence, power_support

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="module")
def cube_report(Q2):
    H = 10**4 + 1
    a = indicator_sequence(Q2, power_support(3, H), H)
    return check_theorem_main(Q2, a, None, CheckpointSchedule.geometric(10, 10**4, z="sqrt-u"))


def test_empty_report_renders_valid_json():
    report = CriterionReport("main", ())
    data = json.loads(render_report(report, "json"))
    assert data["rows"] == [] and data["schema"] == "sparse-series-report/1"


def test_single_row_csv():
    report = CriterionReport("main", (ConditionRow("(i)", "x_n -> infinity", "schedule", (), PASS),))
    rows = list(csv.reader(io.StringIO(render_report(report, "csv").decode())))
    assert rows[0] == ["condition_id", "verdict", "rule", "x", "ratio_lo", "ratio_hi"]
    assert len(rows) == 2 and rows[1][:2] == ["(i)", PASS]


def test_duplicate_condition_rejected():
    row = ConditionRow("(i)", "", "schedule", (), PASS)
    with pytest.raises(InvalidInput):
        CriterionReport("main", (row, row))


def test_json_round_trip(cube_report):
    blob = render_report(cube_report, "json")
    back = parse_report(blob)
    assert back == cube_report
    assert render_report(back, "json") == blob


def test_intervals_serialized_as_decimal_pairs(cube_report):
    data = json.loads(render_report(cube_report, "json"))
    ratio = data["rows"][1]["checkpoints"][0]["ratio"]
    assert isinstance(ratio, list) and len(ratio) == 2 and all(isinstance(v, str) for v in ratio)


def test_rendering_is_deterministic(Q2, cube_report):
    H = 10**4 + 1
    a = indicator_sequence(Q2, power_support(3, H), H)
    again = check_theorem_main(Q2, a, None, CheckpointSchedule.geometric(10, 10**4, z="sqrt-u"))
    for fmt in ("json", "csv", "text"):
        assert render_report(again, fmt) == render_report(cube_report, fmt)


def test_text_lists_witnesses_sorted(Q2):
    H = 200
    a = indicator_sequence(Q2, power_support(3, H), H)
    ws = witness_search(Q2, a, None, 5, 50)
    report = CriterionReport("norm-witness", (), tuple(reversed(ws)))
    text = render_report(report, "text").decode()
    lines = [ln for ln in text.splitlines() if ln.strip().startswith("u=")]
    assert [ln.split()[0] for ln in lines] == [f"u={u}" for u in range(1, 6)]


def test_unknown_format():
    with pytest.raises(InvalidInput):
        render_report(CriterionReport("main", ()), "xml")


# -- command line --------------------------------------------------------------

def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_command(capsys):
    code, out, _ = run(capsys, "classify", "--minpoly", "x^2-2x-1")
    assert code == 0
    assert json.loads(out)["kind"] == "Pisot"


def test_unknown_flag_is_usage_error(capsys):
    code, _, err = run(capsys, "classify", "--bogus")
    assert code == 1 and "unrecognized" in err


def test_missing_subcommand(capsys):
    assert run(capsys)[0] == 1


def test_invalid_base_is_usage_error(capsys):
    code, _, err = run(capsys, "classify", "--minpoly", "x^2+1")
    assert code == 1 and "NoRealRootAboveOne" in err


def test_horizon_problem_exits_two(capsys):
    code, _, err = run(capsys, "stats", "--t", "2", "--seq", "cubes", "--horizon", "50", "--x", "100")
    assert code == 2 and "HorizonInsufficient" in err


def test_check_command_writes_report(capsys, tmp_path):
    out = tmp_path / "report.json"
    code, _, _ = run(capsys, "check", "--theorem", "rational", "--t", "2", "--a", "fiber:sigma",
                     "--schedule", "geometric:1e3:1e5", "--out", str(out))
    assert code == 0
    report = parse_report(out.read_bytes())
    assert report.theorem == "rational"
    assert {r.condition_id for r in report.rows} == {"(i)", "(iii)", "(iv-1)", "(iv-3)", "(v)"}


def test_config_file_and_flag_override(capsys, tmp_path):
    conf = tmp_path / "conf.json"
    conf.write_text(json.dumps({"t": 2, "a": "cubes", "horizon": 300, "precision": 64}))
    code, out, _ = run(capsys, "eval", "--config", str(conf))
    assert code == 0
    assert json.loads(out)["precision"] == 64
    code, out, _ = run(capsys, "eval", "--config", str(conf), "--precision", "100")
    assert json.loads(out)["precision"] == 100


def test_bad_config_key(capsys, tmp_path):
    conf = tmp_path / "conf.json"
    conf.write_text(json.dumps({"colour": "red"}))
    assert run(capsys, "eval", "--config", str(conf))[0] == 1


def test_thread_cap_validated(capsys, monkeypatch):
    monkeypatch.setenv("SPARSE_SERIES_THREADS", "zero")
    code, _, err = run(capsys, "eval", "--t", "2", "--a", "cubes", "--horizon", "100")
    assert code == 1 and "SPARSE_SERIES_THREADS" in err
    monkeypatch.setenv("SPARSE_SERIES_THREADS", "1")
    assert run(capsys, "eval", "--t", "2", "--a", "cubes", "--horizon", "100")[0] == 0


def test_sieve_and_build_seq(capsys, tmp_path):
    table = tmp_path / "phi.bin"
    code, out, _ = run(capsys, "sieve", "--function", "phi", "--horizon", "1000", "--out", str(table))
    assert code == 0 and table.stat().st_size == 16 + 8 * 999
    seq = tmp_path / "a.jsonl"
    code, _, _ = run(capsys, "build-seq", "--t", "2", "--seq", "fiber:phi", "--horizon", "100", "--out", str(seq))
    assert code == 0
    code, out, _ = run(capsys, "stats", "--t", "2", "--seq", f"file:{seq}", "--x", "50", "--z", "3")
    assert code == 0 and json.loads(out)["N_count"] > 0


def test_digits_command(capsys, tmp_path):
    rle = tmp_path / "cubes.txt"
    code, out, _ = run(capsys, "digits", "--t", "2", "--g", "power:3", "--P", "1000", "--out", str(rle))
    summary = json.loads(out)
    assert code == 0 and summary["nonzero_digits"] == 10 and summary["carries"] == 0
    assert rle.read_text().startswith("# base=2 P=1000")


def test_witness_command_matches_golden_text(capsys):
    code, out, _ = run(capsys, "witness", "--t", "2", "--a", "cubes", "--u-max", "5", "--N-max", "50",
                       "--horizon", "200", "--format", "text")
    assert code == 0
    assert out == (DATA / "witness_report.txt").read_text()


def test_witness_command_reports_failures(capsys):
    code, out, _ = run(capsys, "witness", "--t", "2", "--a", "ones", "--u-max", "3", "--N-max", "20")
    assert code == 0
    data = json.loads(out)
    assert data["metadata"]["failing_u"] == [1, 2, 3]
