"""The closed repair loop: parse, syntax-repair, instrument, explore,
differential-check, feed trace prompts back, and prune redundancies.

Phases per iteration: (1) parse + interface check, looping syntax-debug
prompts until clean; (2) instrument; (3) concolic exploration; (4)
differential check — a failure sends a trace-debug prompt, replaces the
RTL with the client's response, and re-enters phase 1; (5) once verified,
mechanical trial deletion of potentially-unreachable branches, each
removal re-verified before it sticks.  Completion clients are pluggable:
a scripted mock, an HTTP endpoint, or a command filter.
"""

from __future__ import annotations

import copy
import json
import random
import subprocess
import urllib.request
from dataclasses import dataclass, field
from pathlib import Path

from .cfg import BranchId, build_cfg
from .concolic import (
    CoverageReport,
    ExploreBudget,
    InputSet,
    default_seed,
    explore,
)
from .diagnostics import Diagnostic, VeriloopError
from .instrument import instrument, is_instrumented, is_marker, \
    strip_instrumentation
from .interface import PortSpec, validate_interface
from .oracle import ModelSpec, OracleError, Verdict, differential_check
from .parser import try_parse
from .printer import pretty_print
from .reporting import (
    PromptArtifact,
    build_redundancy_prompt,
    build_syntax_debug_prompt,
    build_trace_debug_prompt,
)
from .simulator import InputVector
from .vast import AstModule, SourcePos

_TRIAL_SEED = 0xD1FF


class ClientError(VeriloopError):
    pass


class MockClient:
    """Scripted completion client: returns the queued responses in order."""

    def __init__(self, responses: list[str], repeat_last: bool = False):
        self.responses = list(responses)
        self.repeat_last = repeat_last
        self.prompts: list[str] = []  # everything it was shown, for tests

    @classmethod
    def from_file(cls, path: str | Path, separator: str = "\n===\n",
                  repeat_last: bool = False) -> "MockClient":
        text = Path(path).read_text()
        return cls([part for part in text.split(separator) if part.strip()],
                   repeat_last=repeat_last)

    def complete(self, prompt: str) -> str:
        self.prompts.append(prompt)
        if not self.responses:
            raise ClientError("mock responses exhausted")
        if len(self.responses) == 1 and self.repeat_last:
            return self.responses[0]
        return self.responses.pop(0)


class HttpClient:
    """POSTs {"prompt": ...} and reads {"text": ...} back."""

    def __init__(self, url: str, timeout_s: float = 60.0):
        self.url = url
        self.timeout_s = timeout_s

    def complete(self, prompt: str) -> str:
        body = json.dumps({"prompt": prompt}).encode()
        request = urllib.request.Request(
            self.url, data=body, headers={"Content-Type": "application/json"})
        try:
            with urllib.request.urlopen(request, timeout=self.timeout_s) as resp:
                payload = json.loads(resp.read().decode())
        except Exception as exc:
            raise ClientError(f"completion endpoint failed: {exc}") from None
        if "text" not in payload:
            raise ClientError("completion response missing 'text'")
        return payload["text"]


class CommandClient:
    """Prompt on stdin, UTF-8 response on stdout."""

    def __init__(self, command: list[str], timeout_s: float = 120.0):
        self.command = list(command)
        self.timeout_s = timeout_s

    def complete(self, prompt: str) -> str:
        try:
            proc = subprocess.run(self.command, input=prompt, text=True,
                                  capture_output=True, timeout=self.timeout_s)
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise ClientError(f"completion command failed: {exc}") from None
        if proc.returncode != 0:
            raise ClientError(
                f"completion command exited {proc.returncode}:"
                f" {proc.stderr.strip()[:200]}")
        return proc.stdout


@dataclass(frozen=True)
class LoopConfig:
    oracle: ModelSpec
    port_spec: PortSpec | None = None
    max_syntax_iterations: int = 5
    max_functional_iterations: int = 5
    max_redundancy_iterations: int = 3
    explore_budget: ExploreBudget = ExploreBudget()
    seeds: InputSet | None = None
    seed_cycles: int = 8
    trial_random_vectors: int = 32
    trial_cycle_factor: int = 4
    jobs: int = 1

    def __post_init__(self):
        for name in ("max_syntax_iterations", "max_functional_iterations",
                     "max_redundancy_iterations"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class LoopStep:
    phase: str              # "syntax" | "functional" | "redundancy"
    prompt_kind: str | None
    detail: str
    coverage_pct: float | None = None
    passed: bool | None = None


@dataclass
class LoopOutcome:
    final_rtl: str
    status: str             # "verified" | "syntax-exhausted" | "functional-exhausted"
    log: list[LoopStep]
    coverage: CoverageReport | None = None
    verdict: Verdict | None = None
    artifacts: list[PromptArtifact] = field(default_factory=list)
    input_set: InputSet | None = None


def _interface_diags(module: AstModule, spec: PortSpec | None) -> list[Diagnostic]:
    if spec is None:
        return []
    return [Diagnostic(SourcePos(1, 1), f"interface mismatch: {text}")
            for text in validate_interface(module, spec)]


def _random_vectors(module: AstModule, count: int, cycles: int,
                    seed: int = _TRIAL_SEED) -> list[InputVector]:
    rng = random.Random(seed)
    ports = module.data_input_ports()
    return [InputVector(tuple({p.name: rng.randrange(1 << p.width)
                               for p in ports} for _ in range(cycles)))
            for _ in range(count)]


def run_loop(initial_rtl: str, config: LoopConfig, client) -> LoopOutcome:
    rtl = initial_rtl
    log: list[LoopStep] = []
    artifacts: list[PromptArtifact] = []
    syntax_iterations = 0
    functional_iterations = 0

    def ask(prompt: PromptArtifact, phase: str) -> str | None:
        artifacts.append(prompt)
        try:
            return client.complete(prompt.text)
        except ClientError as exc:
            log.append(LoopStep(phase, prompt.kind, f"client failure: {exc}"))
            return None

    while True:
        # Phase 1: syntax and interface.
        module, diags = try_parse(rtl)
        if module is not None:
            diags = _interface_diags(module, config.port_spec)
        if diags:
            if syntax_iterations >= config.max_syntax_iterations:
                log.append(LoopStep("syntax", None, "syntax budget exhausted"))
                return LoopOutcome(rtl, "syntax-exhausted", log,
                                   artifacts=artifacts)
            prompt = build_syntax_debug_prompt(rtl, diags)
            log.append(LoopStep("syntax", prompt.kind,
                                f"{len(diags)} diagnostic(s)"))
            response = ask(prompt, "syntax")
            if response is None:
                return LoopOutcome(rtl, "syntax-exhausted", log,
                                   artifacts=artifacts)
            rtl = response
            syntax_iterations += 1
            continue

        if is_instrumented(module):
            module = strip_instrumentation(module)
            rtl = pretty_print(module)

        # Phases 2-3: instrument and explore.
        try:
            design = instrument(module)
            seeds = config.seeds or InputSet.of_vectors(
                [default_seed(design, config.seed_cycles)])
            result = explore(design, seeds, config.explore_budget)
        except VeriloopError as exc:
            log.append(LoopStep("functional", None,
                                f"exploration failure: {exc}"))
            return LoopOutcome(rtl, "functional-exhausted", log,
                               artifacts=artifacts)

        # Phase 4: differential check over the Full Input set.
        try:
            verdict = differential_check(design, config.oracle,
                                         result.input_set, jobs=config.jobs)
        except OracleError as exc:
            log.append(LoopStep("functional", None, f"oracle failure: {exc}"))
            return LoopOutcome(rtl, "functional-exhausted", log,
                               coverage=result.coverage, artifacts=artifacts,
                               input_set=result.input_set)
        if not verdict.passed:
            if functional_iterations >= config.max_functional_iterations:
                log.append(LoopStep("functional", None,
                                    "functional budget exhausted",
                                    result.coverage.coverage_pct, False))
                return LoopOutcome(rtl, "functional-exhausted", log,
                                   coverage=result.coverage, verdict=verdict,
                                   artifacts=artifacts,
                                   input_set=result.input_set)
            prompt = build_trace_debug_prompt(rtl, verdict.mismatches[0])
            log.append(LoopStep("functional", prompt.kind,
                                verdict.mismatches[0].summary(),
                                result.coverage.coverage_pct, False))
            response = ask(prompt, "functional")
            if response is None:
                return LoopOutcome(rtl, "functional-exhausted", log,
                                   coverage=result.coverage, verdict=verdict,
                                   artifacts=artifacts,
                                   input_set=result.input_set)
            rtl = response
            functional_iterations += 1
            continue

        # Phase 5: redundancy pruning on a functionally verified design.
        candidates = result.coverage.classified("potentially-unreachable")
        pruned_any = False
        for _ in range(config.max_redundancy_iterations):
            if not candidates:
                break
            prompt = build_redundancy_prompt(rtl, result.coverage,
                                             design.branch_map)
            artifacts.append(prompt)
            module2, kept, restored = trial_delete(
                module, candidates, config.oracle, config.explore_budget,
                seeds=seeds, random_vectors=config.trial_random_vectors,
                cycle_factor=config.trial_cycle_factor, jobs=config.jobs)
            log.append(LoopStep(
                "redundancy", prompt.kind,
                f"deleted {[str(b) for b in kept]},"
                f" restored {[str(b) for b in restored]}",
                result.coverage.coverage_pct, True))
            if not kept:
                break
            pruned_any = True
            module = module2
            rtl = pretty_print(module)
            design = instrument(module)
            result = explore(design, seeds, config.explore_budget)
            candidates = result.coverage.classified("potentially-unreachable")

        if pruned_any:
            verdict = differential_check(design, config.oracle,
                                         result.input_set, jobs=config.jobs)
        log.append(LoopStep("functional", None, "verified",
                            result.coverage.coverage_pct, verdict.passed))
        return LoopOutcome(rtl, "verified", log, coverage=result.coverage,
                           verdict=verdict, artifacts=artifacts,
                           input_set=result.input_set)


# ---------------------------------------------------------------------------
# Trial deletion


def _delete_edge(module: AstModule, address: tuple) -> AstModule:
    work = copy.deepcopy(module)
    cfg, _ = build_cfg(work)
    edge = cfg.edge_at(address)
    if edge is None:
        raise VeriloopError(f"no branch edge at address {address}")
    stmt = edge.decision.stmt
    if edge.kind == "case-default":
        stmt.default = None
        stmt.default_pos = None
    elif edge.kind == "if-false":
        stmt.other = None
    elif edge.kind == "if-true":
        edge.block.stmts.clear()
    else:  # case-item: keep the label, empty the body
        edge.block.stmts.clear()
    return work


def trial_delete(module: AstModule, candidates: list[BranchId],
                 oracle: ModelSpec, budget: ExploreBudget,
                 seeds: InputSet | None = None, random_vectors: int = 32,
                 cycle_factor: int = 4, jobs: int = 1,
                 ) -> tuple[AstModule, list[BranchId], list[BranchId]]:
    """Remove candidate branches one at a time, re-verifying after each.

    A removal sticks only when the pruned design still passes the
    differential check over its re-explored Full Input set plus a fixed
    batch of random vectors long enough to exercise slow-to-reach state
    (candidates were only ever proven unreachable within the exploration
    horizon).  Everything else is restored.
    """
    work = copy.deepcopy(module)
    kept: list[BranchId] = []
    restored: list[BranchId] = []
    for branch in sorted(candidates):
        design = instrument(work)
        if branch not in design.branch_map:
            restored.append(branch)
            continue
        entry = design.branch_map.entries[branch]
        edge = design.cfg.edge_at(entry.address)
        if edge is None or edge.implicit or (
                edge.block is not None
                and all(is_marker(s) for s in edge.block.stmts)):
            continue  # nothing left to delete behind this branch
        candidate_module = _delete_edge(work, entry.address)
        candidate_design = instrument(candidate_module)
        trial_seeds = seeds or InputSet.of_vectors(
            [default_seed(candidate_design)])
        result = explore(candidate_design, trial_seeds, budget)
        horizon = max(len(v) for v in trial_seeds.vectors())
        extra = _random_vectors(candidate_module, random_vectors,
                                horizon * cycle_factor)
        vectors = result.input_set.vectors() + extra
        verdict = differential_check(candidate_design, oracle, vectors,
                                     jobs=jobs)
        if verdict.passed:
            work = candidate_module
            kept.append(branch)
        else:
            restored.append(branch)
    return work, kept, restored
