import json
import subprocess
import sys

import pytest

from conftest import BENCH, FIXTURES, TRANSCRIPTS
from hybridgen.cli import main
from hybridgen.model import read_model_file


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def common(tmp_path):
    return ["--transcripts", TRANSCRIPTS, "--workspace", tmp_path]


def test_validate(capsys):
    code, out, _ = run(capsys, "validate", BENCH / "shop" / "model.cmdl")
    assert code == 0 and out.strip().endswith(": ok")
    code, out, _ = run(capsys, "validate", FIXTURES / "models" / "cyclic.cmdl")
    assert code == 0 and len(out.strip().splitlines()) == 1 and "CyclicInheritance" in out


def test_validate_syntax_error(capsys, tmp_path):
    bad = tmp_path / "bad.cmdl"
    bad.write_text("package p { class A {\n")
    code, _, err = run(capsys, "validate", bad)
    assert code == 1 and "bad.cmdl" in err


def test_decompose_and_skeleton(capsys, tmp_path, no_network):
    problem = BENCH / "employee"
    annotated = tmp_path / "annotated.cmdl"
    # the shipped transcripts were recorded at the evaluation temperature
    code, _, _ = run(capsys, *common(tmp_path), "--temperature", "0.8", "decompose", problem / "model.cmdl", problem / "requirement.txt", "-o", annotated)
    assert code == 0
    model = read_model_file(annotated)
    assert all(o.spec.summary for _, o in model.operations())
    assert (tmp_path / "decompose" / "llm" / "01-decompose.response.txt").is_file()
    code, out, _ = run(capsys, *common(tmp_path), "skeleton", annotated)
    assert code == 0 and (tmp_path / "skeleton" / "src" / "Employee.mo").is_file()
    assert len(out.splitlines()) == 3


def test_skeleton_needs_annotations(capsys, tmp_path):
    code, _, err = run(capsys, *common(tmp_path), "skeleton", BENCH / "employee" / "model.cmdl")
    assert code == 1 and "without a specification" in err


def test_run_prints_record(capsys, tmp_path, no_network):
    code, out, _ = run(capsys, "run", BENCH / "employee", "--sample", "1", *common(tmp_path))
    assert code == 0
    record = json.loads(out)
    assert record["passed"] and record["sampleIndex"] == 1
    assert json.loads((tmp_path / "employee" / "1" / "repair.json").read_text())["history"] == [[0, 1], [1, 0]]


def test_run_replay_miss_exits_2(capsys, tmp_path):
    code, out, _ = run(capsys, "run", BENCH / "employee", "--model", "someone-else", *common(tmp_path))
    assert code == 2
    assert "provider failure" in json.loads(out)["reason"]


def test_eval_writes_report(capsys, tmp_path, no_network):
    code, out, _ = run(
        capsys, *common(tmp_path), "eval", BENCH / "employee", "--approach", "iecoregen", "--approach", "base-r",
        "--n", "5", "--k", "1", "--k", "3",
    )
    assert code == 0
    assert out == (tmp_path / "report" / "report.txt").read_text()
    assert "| iecoregen " in out and "| base-r " in out
    assert (tmp_path / "iecoregen" / "employee" / "0" / "record.json").is_file()


def test_config_errors_exit_1(capsys, tmp_path):
    code, _, err = run(capsys, *common(tmp_path), "eval", BENCH, "--n", "2", "--k", "3")
    assert code == 1 and "configuration error" in err
    code, _, err = run(capsys, "--transcripts", tmp_path / "none", "run", BENCH / "employee")
    assert code == 1


def test_global_flags_after_subcommand(capsys, tmp_path):
    code, out, _ = run(capsys, "run", BENCH / "employee", "--no-decompose", *common(tmp_path))
    assert code == 0
    assert not list((tmp_path / "employee" / "0" / "llm").glob("*decompose*"))


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "hybridgen.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "eval" in res.stdout
    res = subprocess.run([sys.executable, "-m", "hybridgen.cli", "frobnicate"], capture_output=True, text=True)
    assert res.returncode == 2
