import json

import pytest

from support import GOLDEN

from tagc.cli import main

IMPLICIT = str(GOLDEN / "implicit_flow.hll")
CREEP = str(GOLDEN / "label_creep.hll")


def test_run_failstop_exit_code(capsys):
    assert main(["run", IMPLICIT]) == 1
    assert capsys.readouterr().out.strip() == "FailStop: IfcWriteViolation"


def test_run_compiled_with_trace(capsys):
    assert main(["run", CREEP, "--compiled", "--trace", "--passes", "all"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[-1] == "Terminate: 3@P"
    assert out[0].startswith("call ")


def test_compile_and_run_dump(tmp_path, capsys):
    dump, dot = tmp_path / "p.rtlt", tmp_path / "p.dot"
    assert main(["compile", CREEP, "-o", str(dump), "--dot", str(dot)]) == 0
    assert "digraph main" in dot.read_text()
    assert main(["run", str(dump)]) == 0
    assert capsys.readouterr().out.strip() == "Terminate: 3@P"


def test_opt_reports_on_stderr(capsys):
    assert main(["opt", CREEP, "--passes", "deadcode,cse"]) == 0
    err = json.loads(capsys.readouterr().err)
    assert set(err) == {"deadcode", "cse"}


def test_usage_errors(tmp_path, capsys):
    assert main(["run", str(tmp_path / "missing.hll")]) == 3
    bad = tmp_path / "bad.hll"
    bad.write_text("fun main() tag P { x = }")
    assert main(["run", str(bad)]) == 3
    assert "bad.hll:1:" in capsys.readouterr().err
    assert main(["compile", CREEP, "--passes", "inline"]) == 3
    with pytest.raises(SystemExit) as ei:
        main(["run", CREEP, "--policy", "nope"])
    assert ei.value.code == 3


def test_diff_campaign(capsys, monkeypatch):
    assert main(["diff", "--policy", "taint", "--seeds", "20", "--passes", "cse"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["seeds"] == 20 and "cse" in rep["pipelines"]
    monkeypatch.setenv("TAGC_SEED", "100")
    assert main(["diff", "--seeds", "5", "--fuel", "500"]) == 0


def test_diff_mutant_exit_code(capsys):
    assert main(["diff", "--seeds", "60", "--passes", "deadcode-noguard", "--no-shrink"]) == 2


def test_diff_single_program(capsys):
    assert main(["diff", "--program", CREEP, "--passes", "all"]) == 0
    assert json.loads(capsys.readouterr().out)["kind"] == "agree"


def test_validate_and_dispatch(capsys):
    assert main(["validate", "--policy", "unit"]) == 0
    assert json.loads(capsys.readouterr().out)["findings"] == []
    assert main(["validate", "--lowered"]) == 0
    capsys.readouterr()
    assert main(["dump-dispatch"]) == 0
    assert "ITwhileSplit" in capsys.readouterr().out
