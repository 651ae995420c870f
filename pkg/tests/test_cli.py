from __future__ import annotations

import json
import subprocess
import sys

import pytest

from orgmine import export
from orgmine.cli import main
from sample_logs import CONSISTENT_ROWS, rows_csv, worked_csv


@pytest.fixture
def worked_file(tmp_path):
    path = tmp_path / "worked.csv"
    path.write_bytes(worked_csv())
    return path


@pytest.fixture
def consistent_file(tmp_path):
    path = tmp_path / "consistent.csv"
    path.write_bytes(rows_csv(CONSISTENT_ROWS))
    return path


WORKED_COLS = ["--case-col", "CaseID", "--activity-col", "Activity", "--actor-col", "Actor"]


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_stats(capsys, worked_file):
    code, out, _ = run(capsys, "stats", worked_file, *WORKED_COLS)
    assert code == 0
    assert out.strip() == "events=19 cases=6 actors=5 activities=5"


def test_similar_task_csv(capsys, consistent_file):
    code, out, _ = run(capsys, "similar-task", consistent_file)
    assert code == 0
    matrix = export.read_csv_matrix(out.encode())
    # six decimals are written; the published value is rounded to three
    assert round(matrix["Matt"]["Brad"], 3) == 0.719
    assert "0.719092" in out


@pytest.mark.parametrize("engine", ["reference", "tabular", "graph"])
def test_similar_task_engines_agree(capsys, consistent_file, engine):
    code, out, _ = run(capsys, "similar-task", consistent_file, "--engine", engine)
    assert code == 0
    assert export.read_csv_matrix(out.encode())["Britney"]["Joan"] == pytest.approx(0.671, abs=1e-3)


def test_similar_task_dot(capsys, consistent_file):
    code, out, _ = run(capsys, "similar-task", consistent_file, "--format", "dot")
    assert code == 0
    assert out.startswith("// kind=similar_task\ngraph similar_task {")
    assert '  "George";' in out
    edge_lines = [ln for ln in out.splitlines() if "--" in ln]
    assert edge_lines and not [ln for ln in edge_lines if "George" in ln]


def test_similar_task_json_round_trip(capsys, consistent_file, tmp_path):
    target = tmp_path / "st.json"
    code, out, _ = run(capsys, "similar-task", consistent_file, "--format", "json", "-o", target)
    assert code == 0 and out == ""
    s = export.from_json(target.read_bytes())
    assert s.value("Matt", "Brad") == pytest.approx(0.719, abs=1e-3)
    assert export.to_json(s) == target.read_bytes()


def test_sub_contract_csv(capsys, worked_file):
    code, out, _ = run(capsys, "sub-contract", worked_file, *WORKED_COLS)
    assert code == 0
    assert "# beta=0.5 depth=5 require_distinct_activities=false" in out
    assert "# normalizer=6.5" in out
    matrix = export.read_csv_matrix(out.encode())
    assert f"{matrix['Matt']['Britney']:.6f}" == "0.153846"
    assert f"{matrix['Brad']['Joan']:.6f}" == "0.153846"


def test_sub_contract_flag_same_on_worked_example(capsys, worked_file):
    _, plain, _ = run(capsys, "sub-contract", worked_file, *WORKED_COLS)
    _, flagged, _ = run(capsys, "sub-contract", worked_file, *WORKED_COLS, "--distinct-activities")
    strip = lambda text: [ln for ln in text.splitlines() if not ln.startswith("#")]
    assert strip(plain) == strip(flagged)


@pytest.mark.parametrize("engine", ["tabular", "graph"])
def test_sub_contract_engines(capsys, worked_file, engine):
    _, ref, _ = run(capsys, "sub-contract", worked_file, *WORKED_COLS, "--format", "json")
    code, out, _ = run(capsys, "sub-contract", worked_file, *WORKED_COLS, "--format", "json", "--engine", engine)
    assert code == 0
    assert out == ref


def test_sub_contract_short_cases_dot(capsys, tmp_path):
    path = tmp_path / "short.csv"
    path.write_bytes(rows_csv([("1", "A", "x"), ("1", "B", "y"), ("2", "A", "z")]))
    code, out, _ = run(capsys, "sub-contract", path, "--format", "dot")
    assert code == 0
    assert "digraph sub_contract {" in out
    assert "->" not in out
    assert all(f'"{a}";' in out for a in "xyz")


def test_missing_file_exit_2(capsys, tmp_path):
    code, _, err = run(capsys, "stats", tmp_path / "nope.csv")
    assert code == 2
    assert err.startswith("error:")


def test_missing_column_exit_2(capsys, worked_file):
    code, _, err = run(capsys, "stats", worked_file)
    assert code == 2
    assert "MissingColumn" in err


def test_malformed_and_lenient(capsys, tmp_path):
    path = tmp_path / "bad.csv"
    path.write_bytes(b"case,activity,actor\n1,A,x\n1,,y\n1,C,z\n")
    code, _, err = run(capsys, "stats", path)
    assert code == 2 and "MalformedRow" in err
    code, out, err = run(capsys, "stats", path, "--lenient")
    assert code == 0
    assert out.strip() == "events=2 cases=1 actors=2 activities=2"
    assert "skipped 1" in err


def test_bad_params_exit_2(capsys, worked_file):
    assert run(capsys, "sub-contract", worked_file, *WORKED_COLS, "--beta", "2")[0] == 2
    assert run(capsys, "sub-contract", worked_file, *WORKED_COLS, "--depth", "0")[0] == 2


def test_bench_three_engines(capsys, worked_file):
    code, out, _ = run(capsys, "bench", worked_file, *WORKED_COLS, "--runs", "2", "--warmup", "0")
    assert code == 0
    doc = json.loads(out)
    assert [r["engine"] for r in doc["results"]] == ["reference", "tabular", "graph"]
    assert doc["config"]["runs"] == 2


def test_bench_default_runs(capsys, worked_file):
    code, out, _ = run(capsys, "bench", worked_file, *WORKED_COLS, "--engines", "reference")
    assert code == 0
    doc = json.loads(out)
    assert doc["config"]["runs"] == 5
    assert all(len(p["runs_ns"]) == 5 for p in doc["measurements"][0]["phases"].values())


def test_bench_csv_and_compare(capsys, worked_file):
    code, out, err = run(
        capsys, "bench", worked_file, *WORKED_COLS, "--engines", "tabular,graph",
        "--algorithm", "sub-contract", "--chunks", "10,19", "--runs", "1", "--format", "csv", "--compare",
    )
    assert code == 0
    assert "# config.chunk_sizes=10 19" in out
    assert "faster" in err and "detection" in err


def test_bench_invalid_chunk_exit_2(capsys, worked_file):
    code, _, err = run(capsys, "bench", worked_file, *WORKED_COLS, "--chunks", "50")
    assert code == 2
    assert "SizeOutOfRange" in err


def test_bench_unknown_engine_exit_2(capsys, worked_file):
    assert run(capsys, "bench", worked_file, *WORKED_COLS, "--engines", "reference,oracle")[0] == 2


def test_bpi_preset(capsys, tmp_path):
    path = tmp_path / "bpi.csv"
    path.write_text(
        "Incident_ID;DateStamp;IncidentActivity_Number;IncidentActivity_Type;Assignment_Group\n"
        "IM1;07-01-2013 08:17:17;001;Open;TEAM1\n"
        "IM1;07-01-2013 08:18:17;002;Reassignment;TEAM2\n"
        "IM2;07-01-2013 08:19:17;003;Open;TEAM1\n"
    )
    code, out, _ = run(capsys, "stats", path, "--preset", "bpi2014")
    assert code == 0
    assert out.strip() == "events=3 cases=2 actors=2 activities=2"


def test_headerless_indices(capsys, tmp_path):
    path = tmp_path / "plain.csv"
    path.write_text("x;1;A\n")
    code, out, _ = run(capsys, "stats", path, "--no-header", "--delimiter", ";",
                       "--case-col", "1", "--activity-col", "2", "--actor-col", "0")
    assert code == 0 and out.strip() == "events=1 cases=1 actors=1 activities=1"
    assert run(capsys, "stats", path, "--no-header", "--case-col", "case")[0] == 2


def test_synthetic_input(capsys):
    code, out, _ = run(capsys, "stats", "synthetic:500:7")
    assert code == 0 and out.startswith("events=500 ")
    assert run(capsys, "stats", "synthetic:lots")[0] == 2


def test_outputs_are_deterministic(capsys, worked_file):
    for argv in (
        ["similar-task", worked_file, *WORKED_COLS, "--format", "json"],
        ["sub-contract", worked_file, *WORKED_COLS, "--format", "dot"],
        ["sub-contract", worked_file, *WORKED_COLS, "--format", "csv", "--engine", "graph"],
    ):
        first = run(capsys, *argv)[1]
        assert run(capsys, *argv)[1] == first


def test_subprocess_stdin_and_exit_codes():
    proc = subprocess.run(
        [sys.executable, "-m", "orgmine", "sub-contract", "-", *WORKED_COLS],
        input=worked_csv(), capture_output=True, check=False,
    )
    assert proc.returncode == 0
    assert b"0.153846" in proc.stdout
    proc = subprocess.run(
        [sys.executable, "-m", "orgmine", "stats", "-"], input=b"case,activity,actor\n",
        capture_output=True, check=False,
    )
    assert proc.returncode == 2
    assert b"EmptyLog" in proc.stderr
