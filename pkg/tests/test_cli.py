import json
import os
import subprocess
import sys

import pytest

from entbroadcast.cli import fmt, main, render


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_state_werner(capsys):
    code, out, _ = run(capsys, "state", "--family", "werner", "--p", "1", "--alpha2", "0.5")
    assert code == 0
    assert "TF = 1\n" in out and "DC = 2 (unclamped)" in out and "inseparable" in out


def test_state_belldiag(capsys):
    code, out, _ = run(capsys, "state", "--family", "belldiag", "--c", "0,0,0")
    assert code == 0
    assert "TF = 0.5\n" in out and "-> separable" in out


def test_state_random_json(capsys):
    code, out, _ = run(capsys, "state", "--family", "random", "--seed", "3", "--format", "json")
    rows = json.loads(out)
    assert code == 0 and len(rows) == 1 and "purity" in rows[0]


@pytest.mark.parametrize(
    "argv",
    [
        ["state", "--family", "werner", "--p", "1.2", "--alpha2", "0.5"],
        ["state", "--family", "belldiag", "--c", "0,0,1.5"],
        ["report", "--family", "belldiag", "--c", "1,1,1"],
    ],
)
def test_out_of_range(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == ""
    assert "parameter out of range" in err and err.count("\n") == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["state", "--bogus"],
        ["frobnicate"],
        ["report", "--family", "werner", "--p", "0.9", "--alpha2", "0.5", "--cloner", "local", "--copies", "3"],
        ["range", "--family", "werner"],
        ["state", "--family", "werner", "--p", "0.5"],
        ["scatter", "--samples", "0"],
    ],
)
def test_validation_failures(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and err.startswith("entbroadcast: error:") and err.count("\n") == 1


@pytest.mark.parametrize(
    "argv,want",
    [
        (["--family", "werner", "--alpha2", "0.4", "--cloner", "local"], "p in (0.76, 1]"),
        (["--family", "werner", "--p", "0.85", "--cloner", "nonlocal"], "alpha2 in (0.06, 0.94)"),
        (["--family", "werner", "--alpha2", "0.2", "--copies", "5"], "p in NA"),
        (["--family", "belldiag", "--c", "_,-0.56,0.56"], "c1 in (0.55, 1]"),
        (["--family", "belldiag", "--c=-0.875,-0.875,0", "--vary", "c3", "--cloner", "local"], "c3 in [-1, -0.75]"),
    ],
)
def test_range(capsys, argv, want):
    code, out, _ = run(capsys, "range", *argv)
    assert code == 0 and want in out


def test_range_csv(tmp_path, capsys):
    path = tmp_path / "r.csv"
    code, _, _ = run(capsys, "range", "--family", "werner", "--alpha2", "0.2", "--copies", "5", "--out", str(path))
    lines = path.read_text().splitlines()
    assert code == 0 and lines[0].startswith("family,")
    row = dict(zip(lines[0].split(","), lines[1].split(",")))
    assert row["range"] == "NA" and row["sum_tf_max"] == "NA"


def test_report(capsys):
    code, out, _ = run(capsys, "report", "--family", "werner", "--p", "0.9", "--alpha2", "0.5", "--cloner", "local")
    assert code == 0 and "broadcast_ok = true" in out


def test_tables_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert run(capsys, "tables", "--which", "1", "A5", "--out", str(d))[0] == 0
    names = sorted(os.listdir(a))
    assert names == ["calibration.csv", "calibration_summary.csv", "table_1.csv", "table_A5.csv"]
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()
    head = (a / "table_1.csv").read_text().splitlines()[0].split(",")
    assert head[:14] == [
        "family", "fixed_param_name", "fixed_param_value", "n_copies", "cloner", "range_lo", "range_hi",
        "paper_range_lo", "paper_range_hi", "sum_tf_max", "sum_dc_max", "paper_sum_tf", "paper_sum_dc", "dc_variant",
    ]
    assert ",NA," in (a / "table_A5.csv").read_text()


def test_tables_json_matches_csv_fields(tmp_path, capsys):
    run(capsys, "tables", "--which", "2", "--out", str(tmp_path), "--format", "json")
    run(capsys, "tables", "--which", "2", "--out", str(tmp_path))
    rows = json.loads((tmp_path / "table_2.json").read_text())
    head = (tmp_path / "table_2.csv").read_text().splitlines()[0].split(",")
    assert isinstance(rows, list) and all(list(r) == head for r in rows)


def test_scatter_and_plot(tmp_path, capsys):
    out = tmp_path / "sc" / "s.csv"
    argv = ["scatter", "--samples", "200", "--seed", "42", "--out", str(out), "--emit-plot"]
    assert run(capsys, *argv)[0] == 0
    first = out.read_bytes()
    assert run(capsys, *argv)[0] == 0
    assert out.read_bytes() == first
    script = (tmp_path / "sc" / "s_plot.py").read_text()
    assert "'s.csv'" in script and str(tmp_path) not in script
    compile(script, "s_plot.py", "exec")


def test_surface(tmp_path, capsys):
    out = tmp_path / "surf.csv"
    assert run(capsys, "surface", "--grid", "10", "--cloner", "local", "--out", str(out), "--emit-plot")[0] == 0
    assert len(out.read_text().splitlines()) == 101
    assert (tmp_path / "surf_plot.py").exists()


def test_no_partial_files_on_error(tmp_path, capsys):
    out = tmp_path / "s.json"
    code, _, err = run(capsys, "scatter", "--samples", "10", "--format", "json", "--emit-plot", "--out", str(out))
    assert code == 2 and "--emit-plot" in err
    assert not os.listdir(tmp_path)


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"family": "werner", "p": 1.0, "alpha2": 0.5, "cloner": "local"}))
    code, out, _ = run(capsys, "report", "--config", str(cfg))
    assert code == 0 and "cloner = local" in out
    # flags win over the file
    code, out, _ = run(capsys, "report", "--config", str(cfg), "--cloner", "nonlocal")
    assert "cloner = nonlocal" in out
    cfg.write_text(json.dumps({"p": 2.0}))
    code, _, err = run(capsys, "report", "--config", str(cfg))
    assert code == 2 and "parameter out of range" in err
    cfg.write_text(json.dumps({"colour": "red"}))
    assert run(capsys, "report", "--config", str(cfg))[0] == 2


def test_formatting():
    assert fmt(None) == "NA" and fmt(float("nan")) == "NA"
    assert fmt(1 / 3) == "0.333333" and fmt(True) == "true" and fmt(3) == "3"
    text = render([{"a": 1.0, "b": None}], ["a", "b"])
    assert text == "a,b\n1,NA\n"


def test_module_entry_point():
    r = subprocess.run(
        [sys.executable, "-m", "entbroadcast", "state", "--family", "werner", "--p", "1.2", "--alpha2", "0.5"],
        capture_output=True,
        text=True,
    )
    assert r.returncode == 2 and "parameter out of range" in r.stderr
