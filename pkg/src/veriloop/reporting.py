"""Feedback artifacts and evaluation metrics.

Prompts are plain text with fixed ``## ``-prefixed section headers so
tests and downstream clients can address sections positionally.  Metrics
are computed in exact rational arithmetic.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .cfg import BranchMap
from .concolic import CoverageReport
from .diagnostics import Diagnostic, VeriloopError
from .oracle import MismatchReport
from .simulator import format_value

PROMPT_KINDS = ("syntax-debug", "trace-debug", "redundancy",
                "coverage-message", "no-op")


@dataclass(frozen=True)
class PromptArtifact:
    kind: str
    text: str
    data: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in PROMPT_KINDS:
            raise ValueError(f"unknown prompt kind {self.kind!r}")

    def sections(self) -> dict:
        return split_sections(self.text)

    def save(self, base: str | Path) -> tuple[Path, Path]:
        """Write ``<base>.md`` plus a ``<base>.json`` sidecar."""
        base = Path(base)
        md = base.with_suffix(".md")
        sidecar = base.with_suffix(".json")
        md.write_text(self.text)
        sidecar.write_text(json.dumps({"kind": self.kind, **self.data},
                                      indent=2) + "\n")
        return md, sidecar


def split_sections(text: str) -> dict:
    """Split rendered prompt text on ``## `` headers.  Text before the first
    header lands under the empty key."""
    sections: dict = {}
    current = ""
    lines: list[str] = []
    for line in text.splitlines():
        if line.startswith("## "):
            if current or lines:
                sections[current] = "\n".join(lines).strip()
            current = line[3:].strip()
            lines = []
        else:
            lines.append(line)
    sections[current] = "\n".join(lines).strip()
    return sections


def _code_block(code: str) -> str:
    return f"```verilog\n{code.rstrip()}\n```"


def build_syntax_debug_prompt(code: str, diagnostics: list[Diagnostic],
                              filename: str = "design.v") -> PromptArtifact:
    """Pairs the failing source with its compiler diagnostics."""
    diag_lines = [d.render(filename) for d in diagnostics]
    text = "\n".join([
        "The following Verilog module fails to compile.",
        "",
        "## Original Code",
        _code_block(code),
        "",
        "## Compiler Diagnostics",
        *diag_lines,
        "",
        "## Instructions",
        "Fix every diagnostic above and return the complete corrected",
        "module. Keep the module name and port list unchanged unless a",
        "diagnostic says otherwise. Return only Verilog code.",
    ])
    return PromptArtifact("syntax-debug", text, {
        "diagnostics": [{"line": d.pos.line, "column": d.pos.column,
                         "message": d.message} for d in diagnostics],
    })


def _trace_feedback_lines(report: MismatchReport) -> list[str]:
    lines: list[str] = []
    if not report.dut_trace.records:
        return ["no cycles"]
    for record in report.dut_trace.records:
        lines.append(f"Cycle {record.cycle}:")
        branches = ", ".join(str(b) for b in record.branches) or "(none)"
        lines.append(f"  Execution Paths: {branches}")
        regs = " ".join(f"{name}={format_value(value)}"
                        for name, value in record.registers.items())
        lines.append(f"  Internal State Snapshots: {regs or '(none)'}")
    return lines


def build_trace_debug_prompt(code: str, report: MismatchReport) -> PromptArtifact:
    """Exactly three sections: the code, the failure report, and the
    cycle-by-cycle trace feedback."""
    vector_rows = [f"  cycle {n}: " + " ".join(
        f"{k}={format_value(v)}" for k, v in sorted(row.items()))
        for n, row in enumerate(report.vector.cycles)]
    diff_lines = [
        f"Expected {name}={format_value(exp)}, Got {name}={format_value(obs)}"
        for name, (exp, obs) in sorted(report.diffs.items())]
    text = "\n".join([
        "The module below passes compilation but behaves incorrectly.",
        "Analyze the trace, find the cycle where the internal state diverges"
        " from the intent, and return the complete fixed module.",
        "",
        "## Original Code",
        _code_block(code),
        "",
        "## Verification Failure Report",
        "Failing input vector:",
        *vector_rows,
        f"First divergent cycle: {report.first_divergent_cycle}",
        *diff_lines,
        "",
        "## Trace Feedback",
        *_trace_feedback_lines(report),
    ])
    return PromptArtifact("trace-debug", text, {
        "first_divergent_cycle": report.first_divergent_cycle,
        "diffs": {k: {"expected": e, "observed": o}
                  for k, (e, o) in report.diffs.items()},
        "vector": report.vector.to_json(),
        "trace": [json.loads(r.to_json_line())
                  for r in report.dut_trace.records],
    })


def build_redundancy_prompt(code: str, report: CoverageReport,
                            branch_map: BranchMap | None = None,
                            ) -> PromptArtifact:
    """Candidate dead branches for semantic pruning.

    Branches classified ``unknown`` are not candidates.  Downgrades to a
    no-op artifact when nothing is potentially unreachable.
    """
    candidates = report.classified("potentially-unreachable")
    if not candidates:
        return PromptArtifact("no-op", "## Coverage Report\nNo potentially"
                              " unreachable branches; nothing to prune.\n",
                              {"candidates": []})
    lines = []
    data = []
    for b in candidates:
        hits = report.branches[b].hits
        if branch_map is not None and b in branch_map:
            entry = branch_map.entries[b]
            lines.append(f"{b}: potentially unreachable (hits={hits}),"
                         f" line {entry.pos.line},"
                         f" condition: {entry.condition_text}")
            data.append({"branch": str(b), "line": entry.pos.line,
                         "condition": entry.condition_text})
        else:
            lines.append(f"{b}: potentially unreachable (hits={hits})")
            data.append({"branch": str(b)})
    reachable = ", ".join(str(b) for b in report.classified("reachable"))
    text = "\n".join([
        "Concolic exploration could not reach the branches listed below;",
        "every attempted path constraint toward them was unsatisfiable.",
        "",
        "## Original Code",
        _code_block(code),
        "",
        "## Coverage Report",
        f"Overall branch coverage: {report.coverage_pct:.1f}%",
        f"Reachable branches: {reachable or '(none)'}",
        "Potentially unreachable branches:",
        *lines,
        "",
        "## Instructions",
        "Remove the logic behind the potentially unreachable branches",
        "without altering the functionality of any reachable branch.",
        "Warning: defensive logic such as FSM default states can be falsely",
        "flagged as unreachable; keep anything the design intent requires",
        "for safety. Return the complete pruned module.",
    ])
    return PromptArtifact("redundancy", text, {
        "coverage_pct": report.coverage_pct,
        "candidates": data,
    })


def build_coverage_message(code: str, coverage_pct: float,
                           uncovered_labels: list[str]) -> PromptArtifact:
    """Seed-refinement feedback: uncovered reference-side regions.

    Same renderer shape as the redundancy prompt, but the uncovered items
    are opaque reference-model tags rather than branch ids.
    """
    if not uncovered_labels:
        return PromptArtifact("no-op", "## Coverage Report\nAll reference"
                              " regions covered; no refinement needed.\n",
                              {"uncovered": []})
    text = "\n".join([
        "The current test inputs leave parts of the reference model"
        " unexercised.",
        "",
        "## Original Code",
        _code_block(code),
        "",
        "## Coverage Report",
        f"Overall coverage: {coverage_pct:.1f}%",
        "Uncovered regions:",
        *[f"  {label}" for label in uncovered_labels],
        "",
        "## Instructions",
        "Extend the test inputs so the uncovered regions above are",
        "exercised. Return only the new input sequence.",
    ])
    return PromptArtifact("coverage-message", text, {
        "coverage_pct": coverage_pct,
        "uncovered": list(uncovered_labels),
    })


# ---------------------------------------------------------------------------
# Metrics


class MetricError(VeriloopError):
    pass


@dataclass(frozen=True)
class PassAtKInput:
    n: int
    c: int
    k: int

    def __post_init__(self):
        if not 0 <= self.c <= self.n:
            raise MetricError(f"need 0 <= c <= n, got c={self.c} n={self.n}")
        if not 1 <= self.k <= self.n:
            raise MetricError(f"need 1 <= k <= n, got k={self.k} n={self.n}")


@dataclass(frozen=True)
class FprInput:
    passed: int
    correct: int

    def __post_init__(self):
        if not 0 <= self.correct <= self.passed:
            raise MetricError(
                f"need 0 <= correct <= passed, got {self.correct}/{self.passed}")


def pass_at_k(problems: list[PassAtKInput]) -> Fraction:
    """Mean over problems of 1 - C(n-c, k)/C(n, k), exactly."""
    if not problems:
        raise MetricError("pass_at_k needs at least one problem")
    total = Fraction(0)
    for p in problems:
        total += 1 - Fraction(math.comb(p.n - p.c, p.k), math.comb(p.n, p.k))
    return total / len(problems)


def fpr(data: FprInput) -> Fraction:
    """1 - correct/passed; undefined when nothing passed."""
    if data.passed == 0:
        raise MetricError("FPR undefined (no passing designs)")
    return 1 - Fraction(data.correct, data.passed)


def metrics_summary(problems: list[tuple[str, int, int]], ks: list[int],
                    fpr_input: FprInput | None = None) -> dict:
    """JSON-ready summary for the CLI: {"pass@1": ..., "fpr": ...}."""
    out: dict = {}
    for k in ks:
        rows = [PassAtKInput(n, c, k) for _, n, c in problems if k <= n]
        if not rows:
            raise MetricError(f"no problems with n >= k={k}")
        out[f"pass@{k}"] = float(pass_at_k(rows))
    if fpr_input is not None:
        out["fpr"] = float(fpr(fpr_input))
    return out
