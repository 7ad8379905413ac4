"""Shared fixtures: corpus designs, oracle commands, seed vectors."""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

from veriloop import InputVector, instrument, parse_module

TESTS = Path(__file__).parent
CORPUS = TESTS / "corpus"
BAD = TESTS / "bad"
STUB_ORACLE = Path(__file__).resolve().parents[1] / "src" / "veriloop" / "stub_oracle.py"

# Clean (uninstrumented) corpus designs; the instrumented listing is a
# fixture for instrumentation tests, not a corpus member.
CORPUS_FILES = sorted(p for p in CORPUS.glob("*.v")
                      if "instrumented" not in p.name)


def corpus_source(name: str) -> str:
    return (CORPUS / f"{name}.v").read_text()


def corpus_module(name: str):
    return parse_module(corpus_source(name))


def corpus_design(name: str):
    return instrument(corpus_module(name))


def oracle_cmd(model: str) -> tuple[str, ...]:
    """Stub oracle invocation (direct file: skips package import cost)."""
    return (sys.executable, str(STUB_ORACLE), model)


def counter_seed(cycles: int = 3) -> InputVector:
    rows = [{"reset": 1, "in": 0}] + [{"reset": 0, "in": 0}] * (cycles - 1)
    return InputVector(tuple(rows))


@pytest.fixture(scope="session")
def buggy_counter():
    return corpus_design("counter_buggy")


@pytest.fixture(scope="session")
def fixed_counter():
    return corpus_design("counter_fixed")


# ---------------------------------------------------------------------------
# Acceptance reporting: one line per criterion at the end of the run.

_ACCEPTANCE: dict[str, str] = {}


def record_criterion(nodeid: str, outcome: str) -> None:
    name = nodeid.split("::")[-1]
    if name.startswith("test_criterion_"):
        key = name[len("test_criterion_"):]
        _ACCEPTANCE[key] = outcome


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        record_criterion(report.nodeid,
                         "PASS" if report.passed else "FAIL")
    elif report.when == "setup" and report.skipped \
            and "test_acceptance" in report.nodeid:
        record_criterion(report.nodeid, "SKIP")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    def sort_key(item):
        head = item[0].split("_")[0]
        return (int(head) if head.isdigit() else 99, item[0])
    for key, outcome in sorted(_ACCEPTANCE.items(), key=sort_key):
        terminalreporter.write_line(f"criterion {key}: {outcome}")
