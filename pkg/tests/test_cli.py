"""CLI subcommands: exit codes, file outputs, human summaries."""

import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from conftest import CORPUS, STUB_ORACLE, corpus_source
from veriloop.cli import main

ORACLE_CMD = f"{sys.executable} {STUB_ORACLE} counter"


@pytest.fixture()
def workdir(tmp_path, monkeypatch):
    shutil.copy(CORPUS / "counter_buggy.v", tmp_path / "counter_buggy.v")
    shutil.copy(CORPUS / "counter_fixed.v", tmp_path / "counter_fixed.v")
    (tmp_path / "seed.json").write_text(json.dumps(
        [{"reset": "0x1", "in": "0x00"}, {"reset": "0x0", "in": "0x00"},
         {"reset": "0x0", "in": "0x00"}]))
    monkeypatch.chdir(tmp_path)
    return tmp_path


def test_parse_ok(workdir, capsys):
    assert main(["parse", "counter_buggy.v"]) == 0
    assert "module 'top'" in capsys.readouterr().out


def test_parse_diagnoses_bad_input(workdir, capsys):
    Path("broken.v").write_text("module m (input wire a\nendmodule")
    assert main(["parse", "broken.v"]) == 1
    out = capsys.readouterr().out
    assert "broken.v:" in out and "error" in out


def test_parse_with_port_spec(workdir, capsys):
    Path("ports.json").write_text(json.dumps([
        {"name": "clock", "direction": "input", "width": 1},
        {"name": "reset", "direction": "input", "width": 1},
        {"name": "in", "direction": "input", "width": 8},
        {"name": "out", "direction": "output", "width": 2},
    ]))
    assert main(["parse", "counter_buggy.v", "--ports", "ports.json"]) == 1
    assert "width 1 ≠ 2" in capsys.readouterr().out


def test_usage_error_exits_2(workdir):
    assert main(["no-such-command"]) == 2
    assert main([]) == 2


def test_missing_file_exits_2(workdir, capsys):
    assert main(["parse", "nothere.v"]) == 2
    assert "error" in capsys.readouterr().err


def test_instrument_outputs(workdir):
    assert main(["instrument", "counter_buggy.v", "-o", "inst.v",
                 "--map", "map.json"]) == 0
    text = Path("inst.v").read_text()
    assert '$display("B_1");' in text
    data = json.loads(Path("map.json").read_text())
    assert set(data) == {f"B_{i}" for i in range(1, 8)}


def test_simulate_trace(workdir, capsys):
    assert main(["simulate", "counter_buggy.v", "seed.json",
                 "-o", "trace.jsonl"]) == 0
    lines = Path("trace.jsonl").read_text().strip().splitlines()
    assert len(lines) == 3
    first = json.loads(lines[0])
    assert first["branches"] == ["B_1"]
    assert first["cycle"] == 0


def test_simulate_accepts_instrumented_file(workdir):
    shutil.copy(CORPUS / "counter_buggy_instrumented.v", "inst.v")
    assert main(["simulate", "inst.v", "seed.json", "-o", "t.jsonl"]) == 0
    assert json.loads(Path("t.jsonl").read_text().splitlines()[0])[
        "branches"] == ["B_1"]


def test_concolic_full_coverage(workdir, capsys):
    rc = main(["concolic", "counter_buggy.v", "--seed", "seed.json",
               "-o", "full.json", "--coverage", "cov.json"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "coverage 100.0%" in out
    cov = json.loads(Path("cov.json").read_text())
    assert cov["coverage_pct"] == 100.0
    full = json.loads(Path("full.json").read_text())
    assert any(e["provenance"].startswith("directed(B_3@1)") for e in full)


def test_diff_fail_and_pass(workdir, capsys):
    assert main(["concolic", "counter_buggy.v", "--seed", "seed.json",
                 "-o", "full.json", "--coverage", "cov.json"]) == 0
    rc = main(["diff", "counter_buggy.v", "full.json",
               "--oracle", ORACLE_CMD, "--jobs", "4", "-o", "verdict.json"])
    assert rc == 1
    verdict = json.loads(Path("verdict.json").read_text())
    assert verdict["passed"] is False
    assert verdict["mismatches"][0]["first_divergent_cycle"] >= 1

    rc = main(["diff", "counter_fixed.v", "full.json",
               "--oracle", ORACLE_CMD, "--jobs", "4", "-o", "v2.json"])
    assert rc == 0
    assert json.loads(Path("v2.json").read_text())["passed"] is True


def test_prompt_from_verdict(workdir):
    main(["concolic", "counter_buggy.v", "--seed", "seed.json",
          "-o", "full.json", "--coverage", "cov.json"])
    main(["diff", "counter_buggy.v", "full.json", "--oracle", ORACLE_CMD,
          "-o", "verdict.json"])
    assert main(["prompt", "trace-debug", "--code", "counter_buggy.v",
                 "--report", "verdict.json", "-o", "dbg"]) == 0
    text = Path("dbg.md").read_text()
    assert "## Trace Feedback" in text
    assert json.loads(Path("dbg.json").read_text())["kind"] == "trace-debug"


def test_prompt_redundancy(workdir):
    shutil.copy(CORPUS / "deadarm.v", "deadarm.v")
    Path("dead_seed.json").write_text(json.dumps(
        [{"reset": "0x1", "x": "0x0"}, {"reset": "0x0", "x": "0x1"}]))
    main(["concolic", "deadarm.v", "--seed", "dead_seed.json",
          "-o", "dfull.json", "--coverage", "dcov.json"])
    assert main(["prompt", "redundancy", "--code", "deadarm.v",
                 "--coverage", "dcov.json", "-o", "red"]) == 0
    assert "B_2: potentially unreachable" in Path("red.md").read_text()


def test_metrics_csv(workdir, capsys):
    Path("results.csv").write_text("problem,n,c\na,10,3\nb,10,10\n")
    assert main(["metrics", "results.csv", "--k", "1", "--k", "5",
                 "--fpr-passed", "25", "--fpr-correct", "18",
                 "-o", "m.json"]) == 0
    data = json.loads(Path("m.json").read_text())
    assert data["fpr"] == 0.28
    assert abs(data["pass@5"] - (1 + 11 / 12) / 2) < 1e-12


def test_metrics_all_correct_rows(workdir):
    Path("results.csv").write_text("problem,n,c\na,10,10\nb,10,10\n")
    assert main(["metrics", "results.csv", "--k", "5", "-o", "m.json"]) == 0
    assert json.loads(Path("m.json").read_text())["pass@5"] == 1.0


def test_loop_manifest_end_to_end(workdir):
    responses = (corpus_source("counter_buggy") + "\n===\n"
                 + corpus_source("counter_fixed"))
    Path("responses.txt").write_text(responses)
    Path("ports.json").write_text(json.dumps([
        {"name": "clock", "direction": "input", "width": 1},
        {"name": "reset", "direction": "input", "width": 1},
        {"name": "in", "direction": "input", "width": 8},
        {"name": "out", "direction": "output", "width": 1},
    ]))
    broken = corpus_source("counter_buggy").replace(
        "counter <= 8'h00;", "counter <= 8'h00", 1)
    Path("broken.v").write_text(broken)
    Path("manifest.json").write_text(json.dumps({
        "problem": "counter",
        "rtl": "broken.v",
        "port_spec": "ports.json",
        "seeds": "seed.json",
        "oracle": {"command": ORACLE_CMD.split()},
        "client": {"kind": "mock", "responses": "responses.txt"},
        "out_dir": "out",
    }))
    assert main(["loop", "manifest.json", "--jobs", "4"]) == 0
    outcome = json.loads(Path("out/outcome.json").read_text())
    assert outcome["status"] == "verified"
    assert Path("out/final.v").exists()
    assert any(p.name.endswith("trace-debug.md")
               for p in Path("out").iterdir())


def test_console_script_entry_point(workdir):
    proc = subprocess.run(["veriloop", "parse", "counter_buggy.v"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "module 'top'" in proc.stdout
