import csv
import io
import json
import subprocess
import sys

import pytest

from krein.cli import run


@pytest.fixture
def files(tmp_path):
    m = tmp_path / "m.json"
    m.write_text(json.dumps({"atoms": [{"x": 0, "w": 1}], "inf": 0}))
    two = tmp_path / "two.json"
    two.write_text(json.dumps({"atoms": [{"x": 0, "w": 0.5}, {"x": 1, "w": 0.5}]}))
    s = tmp_path / "s.json"
    s.write_text(json.dumps({"sign": 1, "intervals": [[0, 1]]}))
    pts = tmp_path / "p.csv"
    pts.write_text("x\n1\n0.5\n")
    k = tmp_path / "k.json"
    k.write_text(json.dumps({"intervals": [[1, 2]]}))
    return {"m": str(m), "two": str(two), "s": str(s), "p": str(pts), "k": str(k), "dir": tmp_path}


def _json(capsys):
    return json.loads(capsys.readouterr().out)


def _csv(capsys):
    return list(csv.DictReader(io.StringIO(capsys.readouterr().out)))


def test_measure_reports_norm(files, capsys):
    assert run(["measure", "--measure", files["m"]]) == 0
    out = _json(capsys)
    assert out["valid"] and out["norm"] == pytest.approx(0.3183098861837907)


def test_shift_to_pair_and_criteria(files, capsys):
    assert run(["shift", "to-pair", "--shift", files["s"], "--lambda", "1"]) == 0
    out = _json(capsys)
    assert out["mu"]["atoms"] == [{"x": 0.0, "w": 1.0}] and out["nu"]["atoms"] == [{"x": 1.0, "w": 1.0}]
    assert run(["shift", "criteria", "--shift", files["s"], "--x", "0,1"]) == 0
    out = _json(capsys)
    assert out["0.0"]["mu"]["verdict"] == "atom" and out["1.0"]["support_side"] == "nu_side"


def test_shift_from_pair_recovers_interval(files, capsys):
    assert run(["shift", "from-pair", "--measure", files["m"], "--lambda", "1"]) == 0
    out = _json(capsys)
    assert out["intervals"][0] == pytest.approx([0.0, 1.0])


def test_family_and_classify(files, capsys):
    assert run(["family", "--measure", files["m"], "--lambda", "1"]) == 0
    atom = _json(capsys)["measure"]["atoms"][0]
    assert atom["x"] == pytest.approx(1.0) and atom["w"] == pytest.approx(1.0)
    assert run(["classify", "--measure", files["m"], "--lambda", "1", "--points", files["p"]]) == 0
    rows = _csv(capsys)
    assert [r["kind"] for r in rows] == ["atom", "no_atom"]


def test_transform_csv(files, capsys):
    assert run(["transform", "--measure", files["m"], "--kind", "poisson", "--x", "1", "--steps", "3"]) == 0
    rows = _csv(capsys)
    assert len(rows) == 3


def test_oracle_compare_and_tolerance(files, capsys):
    assert run(["oracle", "compare", "--measure", files["two"], "--lambda", "1"]) == 0
    out = _json(capsys)
    assert out["ok"] and out["worst"] < 1e-12


def test_check_t55_and_construct(files, capsys):
    assert run(["check", "t55", "--k", files["k"], "--y", "0"]) == 0
    assert _json(capsys)["verdict"] == "passes"
    assert run(["construct", "wellmixed", "--a", "0,2", "--b", "1,3"]) == 0
    capsys.readouterr()
    assert run(["construct", "cantor", "--depth", "3"]) == 0
    capsys.readouterr()


def test_repro_example_3_4(capsys):
    assert run(["repro", "example-3.4"]) == 0
    assert all(r["status"] == "PASS" for r in _csv(capsys))


def test_output_file_and_determinism(files, capsys):
    outs = []
    for name in ("a.json", "b.json"):
        path = files["dir"] / name
        assert run(["oracle", "compare", "--measure", files["two"], "--lambda", "2", "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_errors_exit_with_code_two(files, capsys):
    assert run(["measure", "--measure", str(files["dir"] / "missing.json")]) == 2
    err = json.loads(capsys.readouterr().err)
    assert "error" in err
    with pytest.raises(SystemExit) as exc:
        run(["measure", "--bogus"])
    assert exc.value.code == 2
    assert run(["shift", "to-pair", "--shift", files["s"], "--lambda", "-1"]) == 2


def test_console_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "krein.cli", "measure", "--measure", files["m"]],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["valid"]


def test_sweep_accepts_inline_spec(capsys):
    assert run(["sweep", "--spec", '{"depth": 4}', "--lambdas", "2"]) == 0
    row = _csv(capsys)[0]
    assert row["verdict"] == "pure_point" and row["confirmed"] == "16"
