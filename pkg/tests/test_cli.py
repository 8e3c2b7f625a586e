import csv
import io
import json
import os
import subprocess
import sys

import pytest

from gowers import checks
from gowers.cli import BENCH_HEADER, VERIFY_HEADER, main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_norm_lebesgue_file(tmp_path, capsys):
    path = tmp_path / "lebesgue.json"
    path.write_text('{"variant": "lebesgue", "d": 1}')
    code, out, _ = run(["norm", "--spec", str(path), "--k", "3", "--M", "8"], capsys)
    assert code == 0
    norms = json.loads(out)["report"]["norms"]
    assert [norms[f"U{k}"]["values"] for k in (1, 2, 3)] == [[1.0]] * 3


def test_norm_schedule_csv(capsys):
    code, out, _ = run(["norm", "--spec", '{"variant": "dirac"}', "--k", "2", "--M", "4,8,16",
                        "--format", "csv"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    u2 = [r for r in rows if r["k"] == "2"]
    assert [float(r["value"]) for r in u2] == pytest.approx([9 ** .25, 17 ** .25, 33 ** .25])
    assert {r["verdict"] for r in u2} == {"growing"}


def test_norm_payload_deterministic(tmp_path, capsys):
    argv = ["norm", "--spec", '{"variant": "self_similar", "base": 3, "digits": [0, 2], "depth": 4}',
            "--k", "3", "--M", "4,6"]
    reports = []
    for name in ("a.json", "b.json"):
        out_path = tmp_path / name
        assert main(argv + ["--out", str(out_path)]) == 0
        reports.append(json.loads(out_path.read_text()))
    assert reports[0]["report"] == reports[1]["report"]
    assert "timing" in reports[0]
    assert sorted(os.listdir(tmp_path)) == ["a.json", "b.json"]


def test_tower_command(capsys):
    code, out, _ = run(["tower", "--spec", '{"variant": "dirac"}', "--k", "2", "--M", "2",
                        "--format", "csv"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [int(r["elements"]) for r in rows] == [5, 25, 125]
    assert float(rows[1]["plancherel_mass"]) == 5.0


def test_verify_all_passes(capsys):
    code, out, _ = run(["verify", "--suite", "all", "--seed", "7", "--N", "16", "--k", "2"], capsys)
    assert code == 0
    lines = [json.loads(line) for line in out.splitlines()]
    assert len(lines) == 3 * len(checks.SUITES)
    assert all(r["status"] == "pass" for r in lines)


def test_verify_csv_header(capsys):
    code, out, _ = run(["verify", "--suite", "gcs", "--format", "csv", "--trials", "1"], capsys)
    assert code == 0
    assert out.splitlines()[0] == ",".join(VERIFY_HEADER)


def test_verify_failure_exit_code(monkeypatch, capsys):
    def failing(*args, **kwargs):
        return [checks.CheckResult("gcs", checks.FAIL, 2.0, 1e-9, 1, "x")]

    monkeypatch.setattr(checks, "run_suite", failing)
    code, _, _ = run(["verify"], capsys)
    assert code == 2


def test_oracle_command(capsys):
    spec = '{"variant": "trig", "coeffs": [{"k": 0, "c": 1}, {"k": 1, "c": 0.5}, {"k": -1, "c": 0.5}]}'
    code, out, _ = run(["oracle", "--spec", spec, "--N", "16", "--k", "3"], capsys)
    assert code == 0
    rep = json.loads(out)["report"]
    assert rep["relative_difference"] < 1e-12


def test_bench_csv(capsys):
    code, out, _ = run(["bench", "--M", "4,8", "--k", "2", "--repeat", "1"], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == BENCH_HEADER
    assert [r[0] for r in rows[1:]] == ["naive", "fft", "naive", "fft"]
    assert all(float(r[-1]) <= 1e-12 for r in rows[1:])


@pytest.mark.parametrize("argv,needle", [
    (["norm", "--k", "2"], "required"),
    (["norm", "--spec", "{}", "--k", "0", "--M", "4"], "positive"),
    (["norm", "--spec", '{"variant": "atomic", "atoms": [{"w": 1, "x": [2]}]}', "--k", "2",
      "--M", "4"], "spec.atoms"),
    (["norm", "--spec", "not json", "--k", "2", "--M", "4"], "valid JSON"),
    (["norm", "--spec", '{"variant": "dirac"}', "--k", "3", "--M", "64", "--budget", "1000"],
     "budget allows 1000"),
    (["frobnicate"], "invalid choice"),
])
def test_usage_errors_exit_one(argv, needle, capsys):
    code, _, err = run(argv, capsys)
    assert code == 1
    assert needle in err


def test_budget_env(monkeypatch, capsys):
    monkeypatch.setenv("GM_BUDGET_ELEMENTS", "100")
    code, _, err = run(["norm", "--spec", '{"variant": "dirac"}', "--k", "2", "--M", "8"], capsys)
    assert code == 1 and "289" in err
    code, _, _ = run(["norm", "--spec", '{"variant": "dirac"}', "--k", "2", "--M", "8",
                      "--budget", "1000"], capsys)
    assert code == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gowers", "norm", "--spec",
                           '{"variant": "lebesgue"}', "--k", "1", "--M", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["report"]["norms"]["U1"]["values"] == [1.0]
