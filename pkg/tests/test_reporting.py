"""Prompt artifacts, the section splitter, and exact-rational metrics."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import corpus_design, corpus_source, counter_seed, oracle_cmd
from veriloop import BranchId, InputVector
from veriloop.concolic import BranchCoverage, CoverageReport, explore
from veriloop.oracle import ModelSpec, differential_check
from veriloop.reporting import (
    FprInput,
    MetricError,
    PassAtKInput,
    PromptArtifact,
    build_coverage_message,
    build_redundancy_prompt,
    build_syntax_debug_prompt,
    build_trace_debug_prompt,
    fpr,
    metrics_summary,
    pass_at_k,
    split_sections,
)


@pytest.fixture(scope="module")
def counter_mismatch(buggy_counter):
    vec = InputVector(({"reset": 1, "in": 0}, {"reset": 0, "in": 2},
                       {"reset": 0, "in": 0}))
    verdict = differential_check(buggy_counter, ModelSpec(oracle_cmd("counter")),
                                 [vec])
    return verdict.mismatches[0]


def test_trace_debug_prompt_has_exactly_three_sections(counter_mismatch):
    code = corpus_source("counter_buggy")
    artifact = build_trace_debug_prompt(code, counter_mismatch)
    sections = artifact.sections()
    named = [k for k in sections if k]
    assert named == ["Original Code", "Verification Failure Report",
                     "Trace Feedback"]


def test_trace_debug_prompt_shows_divergence(counter_mismatch):
    artifact = build_trace_debug_prompt(corpus_source("counter_buggy"),
                                        counter_mismatch)
    sections = artifact.sections()
    report = sections["Verification Failure Report"]
    assert "First divergent cycle: 1" in report
    assert "Expected out=0x1, Got out=0x0" in report
    feedback = sections["Trace Feedback"]
    # the cycle where the counter reached 1 while out stayed low is visible
    assert "counter=0x1 out=0x0" in feedback
    assert "Execution Paths: B_3, B_7" in feedback


def test_trace_debug_prompt_zero_cycle_trace(counter_mismatch):
    import dataclasses

    from veriloop.simulator import Trace
    empty = dataclasses.replace(counter_mismatch,
                                dut_trace=Trace((), ""), diffs={"out": (1, 0)})
    artifact = build_trace_debug_prompt("module m (); endmodule", empty)
    assert "no cycles" in artifact.sections()["Trace Feedback"]


def test_syntax_debug_prompt_sections():
    from veriloop import try_parse
    code = "module m (input wire a output reg q);\nendmodule"
    _, diags = try_parse(code)
    artifact = build_syntax_debug_prompt(code, diags, "m.v")
    sections = artifact.sections()
    assert "Original Code" in sections
    assert "Compiler Diagnostics" in sections
    assert "m.v:1:" in sections["Compiler Diagnostics"]
    assert artifact.kind == "syntax-debug"


def test_redundancy_prompt_names_candidates():
    design = corpus_design("deadarm")
    seed = InputVector(({"reset": 1, "x": 0}, {"reset": 0, "x": 1}))
    result = explore(design, [seed])
    artifact = build_redundancy_prompt(corpus_source("deadarm"),
                                       result.coverage, design.branch_map)
    assert artifact.kind == "redundancy"
    body = artifact.sections()["Coverage Report"]
    assert "B_2: potentially unreachable" in body
    assert "x > 8'hff" in body
    instructions = artifact.sections()["Instructions"]
    assert "without altering the functionality" in instructions
    assert "FSM default states" in instructions


def test_redundancy_prompt_noop_when_nothing_flagged(buggy_counter):
    result = explore(buggy_counter, [counter_seed()])
    artifact = build_redundancy_prompt(corpus_source("counter_buggy"),
                                       result.coverage,
                                       buggy_counter.branch_map)
    assert artifact.kind == "no-op"
    assert artifact.data["candidates"] == []


def test_unknown_branches_are_not_candidates():
    report = CoverageReport({
        BranchId(1): BranchCoverage(3, "reachable"),
        BranchId(2): BranchCoverage(0, "unknown"),
        BranchId(3): BranchCoverage(0, "potentially-unreachable"),
    }, 33.3)
    artifact = build_redundancy_prompt("module m (); endmodule", report)
    assert [c["branch"] for c in artifact.data["candidates"]] == ["B_3"]


def test_coverage_message_uses_reference_tags():
    artifact = build_coverage_message("def step(): ...", 60.0,
                                      ["S_2", "S_3"])
    assert artifact.kind == "coverage-message"
    assert "S_2" in artifact.text and "S_3" in artifact.text
    assert "60.0%" in artifact.text


def test_splitter_roundtrip_for_every_kind(counter_mismatch, buggy_counter):
    result = explore(buggy_counter, [counter_seed()])
    artifacts = [
        build_syntax_debug_prompt("module", []),
        build_trace_debug_prompt("code", counter_mismatch),
        build_redundancy_prompt("code", result.coverage,
                                buggy_counter.branch_map),
        build_coverage_message("code", 50.0, ["S_1"]),
    ]
    for artifact in artifacts:
        sections = split_sections(artifact.text)
        for name, body in sections.items():
            if name:
                assert f"## {name}" in artifact.text
                first_line = body.splitlines()[0] if body else ""
                assert first_line in artifact.text


def test_artifact_save_writes_md_and_sidecar(tmp_path, counter_mismatch):
    artifact = build_trace_debug_prompt("code", counter_mismatch)
    md, sidecar = artifact.save(tmp_path / "artifact")
    assert md.read_text() == artifact.text
    import json
    data = json.loads(sidecar.read_text())
    assert data["kind"] == "trace-debug"
    assert data["first_divergent_cycle"] == 1


def test_prompt_kind_is_validated():
    with pytest.raises(ValueError):
        PromptArtifact("telepathy", "text")


# ---------------------------------------------------------------------------
# Metrics


def test_pass_at_k_all_correct():
    assert pass_at_k([PassAtKInput(10, 10, 1)]) == 1


def test_pass_at_k_none_correct():
    assert pass_at_k([PassAtKInput(10, 0, 10)]) == 0


def test_pass_at_k_exact_fraction():
    value = pass_at_k([PassAtKInput(10, 3, 5)])
    assert value == Fraction(11, 12)
    assert abs(float(value) - 0.9166666666666666) < 1e-12


def test_pass_at_k_mean_over_problems():
    value = pass_at_k([PassAtKInput(10, 10, 1), PassAtKInput(10, 0, 1)])
    assert value == Fraction(1, 2)


def test_pass_at_k_validates_inputs():
    with pytest.raises(MetricError):
        PassAtKInput(10, 11, 1)
    with pytest.raises(MetricError):
        PassAtKInput(10, 5, 0)
    with pytest.raises(MetricError):
        PassAtKInput(10, 5, 11)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 20), st.data())
def test_pass_at_k_monotone_in_k_and_c(n, data):
    c = data.draw(st.integers(0, n))
    k = data.draw(st.integers(1, n))
    base = pass_at_k([PassAtKInput(n, c, k)])
    if k < n:
        assert pass_at_k([PassAtKInput(n, c, k + 1)]) >= base
    if c < n:
        assert pass_at_k([PassAtKInput(n, c + 1, k)]) >= base


def test_fpr_exact():
    assert fpr(FprInput(25, 18)) == Fraction(7, 25)
    assert float(fpr(FprInput(25, 18))) == 0.28


def test_fpr_perfect_filter():
    assert fpr(FprInput(7, 7)) == 0


def test_fpr_undefined_when_nothing_passed():
    with pytest.raises(MetricError, match="undefined"):
        fpr(FprInput(0, 0))


def test_fpr_validates_inputs():
    with pytest.raises(MetricError):
        FprInput(3, 4)


def test_metrics_summary_shape():
    rows = [("p1", 10, 3), ("p2", 10, 10)]
    summary = metrics_summary(rows, [1, 5], FprInput(25, 18))
    assert set(summary) == {"pass@1", "pass@5", "fpr"}
    assert summary["fpr"] == 0.28
    assert summary["pass@1"] == pytest.approx((0.3 + 1.0) / 2)
