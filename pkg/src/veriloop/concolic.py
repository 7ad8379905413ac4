"""Coverage-driven concolic exploration.

The loop simulates the seed vectors, then repeatedly: takes the most
recently simulated path, picks the first uncovered sibling of a branch
taken on it (earliest cycle, lowest id), builds the mutated constraint
set, solves, and simulates the solved vector.  Directed vectors keep the
parent vector's values wherever the solver left an input unconstrained,
so the tail beyond the decision point is inherited; cycles beyond the
parent's horizon are filled from a fixed-seed PRNG.  Vectors join the
returned set only when they improve coverage.

A branch ends up ``reachable`` when some set vector covers it,
``potentially-unreachable`` when every attempted mutation toward it came
back UNSAT, and ``unknown`` otherwise (no attempt, or a solver budget ran
out — never treated as proof).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from .cfg import BranchId
from .instrument import InstrumentedDesign
from .simulator import InputVector, Trace, run
from .solver import SolveBudget, solve
from .symbolic import (
    MutationError,
    Replay,
    flip_constraint,
    flip_indices,
    mutate_branch,
    replay_inputs,
)

_SUFFIX_SEED = 0x5EED


@dataclass(frozen=True)
class Provenance:
    kind: str                     # "seed" | "directed"
    branch: BranchId | None = None
    cycle: int | None = None
    extended: bool = False        # tail filled beyond the parent's horizon

    def render(self) -> str:
        if self.kind == "seed":
            return "seed"
        text = f"directed({self.branch}@{self.cycle})"
        return text + ("+suffix" if self.extended else "")


@dataclass(frozen=True)
class InputSetEntry:
    vector: InputVector
    provenance: Provenance


@dataclass
class InputSet:
    entries: list[InputSetEntry] = field(default_factory=list)

    def vectors(self) -> list[InputVector]:
        return [e.vector for e in self.entries]

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, vector: InputVector) -> bool:
        return any(e.vector.cycles == vector.cycles for e in self.entries)

    def add(self, vector: InputVector, provenance: Provenance) -> bool:
        if vector in self:
            return False
        self.entries.append(InputSetEntry(vector, provenance))
        return True

    def to_json(self) -> list[dict]:
        return [{"provenance": e.provenance.render(),
                 "cycles": e.vector.to_json()} for e in self.entries]

    @classmethod
    def from_json(cls, data) -> "InputSet":
        entries = []
        for item in data:
            if isinstance(item, dict):
                vector = InputVector.from_json(item["cycles"])
                text = item.get("provenance", "seed")
                kind = "seed" if text.startswith("seed") else "directed"
                entries.append(InputSetEntry(vector, Provenance(kind)))
            else:
                entries.append(InputSetEntry(InputVector.from_json(item),
                                             Provenance("seed")))
        return cls(entries)

    @classmethod
    def of_vectors(cls, vectors, kind: str = "seed") -> "InputSet":
        return cls([InputSetEntry(v, Provenance(kind)) for v in vectors])

    @classmethod
    def load(cls, path: str | Path) -> "InputSet":
        data = json.loads(Path(path).read_text())
        # Accept a bare single vector (list of cycle objects) as well.
        if data and isinstance(data, list) and isinstance(data[0], dict) \
                and "cycles" not in data[0]:
            data = [data]
        return cls.from_json(data)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n")


@dataclass(frozen=True)
class BranchCoverage:
    hits: int
    classification: str  # "reachable" | "potentially-unreachable" | "unknown"


@dataclass
class CoverageReport:
    branches: dict = field(default_factory=dict)  # BranchId -> BranchCoverage
    coverage_pct: float = 100.0

    @property
    def total(self) -> int:
        return len(self.branches)

    @property
    def covered(self) -> int:
        return sum(1 for c in self.branches.values() if c.hits > 0)

    def uncovered(self) -> set[BranchId]:
        return {b for b, c in self.branches.items() if c.hits == 0}

    def classified(self, classification: str) -> list[BranchId]:
        return sorted(b for b, c in self.branches.items()
                      if c.classification == classification)

    def to_json_dict(self) -> dict:
        out: dict = {str(b): {"hits": c.hits, "class": c.classification}
                     for b, c in sorted(self.branches.items())}
        out["coverage_pct"] = round(self.coverage_pct, 2)
        return out


@dataclass(frozen=True)
class ExploreBudget:
    max_solver_calls: int = 500
    max_sim_runs: int = 2000
    solve_budget: SolveBudget = SolveBudget()
    coverage_target_pct: float = 100.0

    def __post_init__(self):
        if self.max_solver_calls <= 0 or self.max_sim_runs <= 0:
            raise ValueError("budgets must be positive")
        if not 0 < self.coverage_target_pct <= 100:
            raise ValueError("coverage target must be in (0, 100]")


@dataclass
class ExploreStats:
    solver_calls: int = 0
    sim_runs: int = 0
    sat: int = 0
    unsat: int = 0
    unknown: int = 0
    directed_misses: int = 0
    stop_reason: str = ""
    history: list = field(default_factory=list)  # (event, coverage_pct)


@dataclass
class ExploreResult:
    input_set: InputSet
    coverage: CoverageReport
    stats: ExploreStats

    def __iter__(self):
        yield self.input_set
        yield self.coverage


def default_seed(design: InstrumentedDesign, cycles: int = 8) -> InputVector:
    """All-zero reset vector: reset-like port high on cycle 0, zeros after."""
    ports = design.module.data_input_ports()
    reset_names = {"reset", "rst", "rst_n", "resetn"}
    rows = []
    for t in range(cycles):
        row = {p.name: 0 for p in ports}
        if t == 0:
            for p in ports:
                if p.name.lower() in reset_names and p.width == 1:
                    row[p.name] = 1
        rows.append(row)
    return InputVector(tuple(rows))


def _suffix_value(width: int, cycle: int, port: str) -> int:
    rng = random.Random((_SUFFIX_SEED, cycle, port))
    return rng.randrange(1 << width)


def build_directed_vector(design: InstrumentedDesign, assignment: dict,
                          parent: InputVector, horizon: int,
                          ) -> tuple[InputVector, bool]:
    """Solved prefix + inherited parent tail (+ PRNG fill past the parent)."""
    ports = design.module.data_input_ports()
    rows = []
    extended = False
    for t in range(horizon):
        row = {}
        for p in ports:
            name = f"{p.name}_{t}"
            if name in assignment:
                row[p.name] = assignment[name]
            elif t < len(parent):
                row[p.name] = parent.cycles[t][p.name]
            else:
                row[p.name] = _suffix_value(p.width, t, p.name)
                extended = True
        rows.append(row)
    return InputVector(tuple(rows)), extended


def _vector_key(vector: InputVector) -> tuple:
    return tuple(tuple(sorted(row.items())) for row in vector.cycles)


@dataclass(frozen=True)
class FrontierTarget:
    cycle: int
    edge: object            # cfg Edge; .branch is None for unnumbered arms
    key: tuple              # (path prefix signature, target address)

    @property
    def branch(self) -> BranchId | None:
        return self.edge.branch

    def sort_key(self) -> tuple:
        ordinal = self.edge.branch.ordinal if self.edge.branch else 1 << 30
        return (self.cycle, ordinal, self.edge.address)


def frontier_targets(replay: Replay, covered: set[BranchId],
                     excluded: set[tuple], tier: int = 1,
                     ) -> list[FrontierTarget]:
    """Sibling arms of decisions visited along the replayed path, ordered
    by (earliest cycle, lowest branch id).

    Tier 1 is the coverage frontier proper: uncovered numbered siblings.
    Tier 2 diversifies paths once tier 1 runs dry: covered siblings and
    unnumbered (non-leaf) arms, so coverage locked in on one path prefix
    does not starve deeper consequences on other prefixes.
    """
    targets: list[FrontierTarget] = []
    seen: set[tuple] = set()
    for i, event in enumerate(replay.events):
        prefix = tuple((e.cycle, e.decision.address, e.taken.address)
                       for e in replay.events[:i])
        for edge in event.decision.edges:
            if edge is event.taken:
                continue
            uncovered_leaf = edge.branch is not None and edge.branch not in covered
            if (tier == 1) != uncovered_leaf:
                continue
            key = (prefix, event.cycle, edge.address)
            if key in excluded or (event.cycle, edge.address) in seen:
                continue
            seen.add((event.cycle, edge.address))
            targets.append(FrontierTarget(event.cycle, edge, key))
    targets.sort(key=FrontierTarget.sort_key)
    return targets


def select_frontier(design: InstrumentedDesign, inputs: InputVector,
                    report: CoverageReport,
                    excluded: set[tuple] = frozenset()) -> list[tuple]:
    """Public frontier view: (cycle, BranchId) mutation targets for a path."""
    replay = replay_inputs(design, inputs)
    covered = set(report.branches) - report.uncovered()
    return [(t.cycle, t.branch)
            for t in frontier_targets(replay, covered, set(excluded), tier=1)]


class _Explorer:
    def __init__(self, design: InstrumentedDesign, budget: ExploreBudget):
        self.design = design
        self.budget = budget
        self.stats = ExploreStats()
        self.input_set = InputSet()
        self.hit_counts: dict[BranchId, int] = {
            b: 0 for b in design.branch_map.branches()}
        self.attempts: dict[BranchId, list[str]] = {
            b: [] for b in design.branch_map.branches()}
        self.excluded: set[tuple] = set()
        self.simulated: set[tuple] = set()
        # stack of [vector, trace, replay-or-None]; most recent on top
        self.stack: list = []

    # -- bookkeeping ---------------------------------------------------------

    @property
    def covered(self) -> set[BranchId]:
        return {b for b, n in self.hit_counts.items() if n > 0}

    def coverage_pct(self) -> float:
        total = len(self.hit_counts)
        if total == 0:
            return 100.0
        return 100.0 * len(self.covered) / total

    def count_hits(self, trace: Trace) -> None:
        for record in trace.records:
            for b in record.branches:
                if b in self.hit_counts:
                    self.hit_counts[b] += 1

    def note(self, event: str) -> None:
        self.stats.history.append((event, round(self.coverage_pct(), 2)))

    def simulate(self, vector: InputVector) -> Trace | None:
        if self.stats.sim_runs >= self.budget.max_sim_runs:
            return None
        self.stats.sim_runs += 1
        return run(self.design, vector)

    # -- main loop -----------------------------------------------------------

    def absorb(self, vector: InputVector, trace: Trace,
               provenance: Provenance) -> bool:
        """Add the vector if it improves coverage; always stack its path."""
        self.simulated.add(_vector_key(vector))
        new = trace.covered() - self.covered
        added = False
        if new and self.input_set.add(vector, provenance):
            self.count_hits(trace)
            added = True
            self.note(f"added {provenance.render()}")
        self.stack.append([vector, trace, None])
        return added

    def replay_of(self, entry: list) -> Replay:
        if entry[2] is None:
            entry[2] = replay_inputs(self.design, entry[0])
        return entry[2]

    def run(self, seeds: list[InputVector]) -> ExploreResult:
        if not seeds:
            raise ValueError("explore() needs at least one seed vector")
        for vector in seeds:
            vector.validate(self.design.module)
        horizon = max(len(v) for v in seeds)

        if not self.hit_counts:
            # No branches at all: coverage is vacuously complete and the
            # seeds pass through unchanged.
            input_set = InputSet([InputSetEntry(v, Provenance("seed"))
                                  for v in seeds])
            self.stats.stop_reason = "no branches"
            return ExploreResult(input_set, self.report(), self.stats)

        for vector in seeds:
            trace = self.simulate(vector)
            if trace is None:
                break
            self.absorb(vector, trace, Provenance("seed"))

        while True:
            if self.coverage_pct() >= self.budget.coverage_target_pct:
                self.stats.stop_reason = "coverage target reached"
                break
            found = self.next_target()
            if found is None:
                self.stats.stop_reason = "frontier exhausted"
                break
            if self.stats.solver_calls >= self.budget.max_solver_calls:
                self.stats.stop_reason = "solver budget exhausted"
                break
            kind, entry, target = found
            if kind == "branch":
                self.attempt(entry, target)
            else:
                self.attempt_flip(entry, *target)
            if self.stats.sim_runs >= self.budget.max_sim_runs:
                self.stats.stop_reason = "simulation budget exhausted"
                break

        return ExploreResult(self.input_set, self.report(), self.stats)

    def next_target(self):
        """Most-recent-path-first.  Tiers: uncovered siblings first, then
        ternary-condition flips (narrow, data-steering), then remaining
        sibling arms (broad path diversification)."""
        for entry in reversed(self.stack):
            replay = self.replay_of(entry)
            targets = frontier_targets(replay, self.covered,
                                       self.excluded, tier=1)
            if targets:
                return "branch", entry, targets[0]
        for entry in reversed(self.stack):
            replay = self.replay_of(entry)
            for index in flip_indices(replay.path):
                key = ("flip",
                       tuple(c.render() for c in
                             replay.path.constraints[:index]),
                       replay.path.constraints[index].render())
                if key not in self.excluded:
                    return "flip", entry, (index, key)
        for entry in reversed(self.stack):
            replay = self.replay_of(entry)
            targets = frontier_targets(replay, self.covered,
                                       self.excluded, tier=2)
            if targets:
                return "branch", entry, targets[0]
        return None

    def absorb_gain(self, vector: InputVector, trace: Trace,
                    fallback_cycle: int, extended: bool) -> None:
        """Absorb a diversification vector, crediting it to the earliest
        branch it newly covers (if any)."""
        gained = trace.covered() - self.covered
        if gained:
            branch, cycle = next(
                (b, r.cycle) for r in trace.records for b in r.branches
                if b in gained)
            self.absorb(vector, trace,
                        Provenance("directed", branch, cycle, extended))
        else:
            self.absorb(vector, trace,
                        Provenance("directed", None, fallback_cycle, extended))

    def attempt(self, entry: list, target: FrontierTarget) -> None:
        replay = self.replay_of(entry)
        parent: InputVector = entry[0]
        self.excluded.add(target.key)
        name = str(target.branch) if target.branch else target.edge.kind
        try:
            constraints = mutate_branch(replay, target.cycle,
                                        target.branch or target.edge)
        except MutationError:
            return
        self.stats.solver_calls += 1
        result = solve(constraints, self.budget.solve_budget)
        if target.branch is not None:
            self.attempts[target.branch].append(result.status)
        if result.is_unsat:
            self.stats.unsat += 1
            self.note(f"unsat {name}@{target.cycle}")
            return
        if not result.is_sat:
            self.stats.unknown += 1
            self.note(f"unknown {name}@{target.cycle}")
            return
        self.stats.sat += 1
        horizon = max(len(parent), target.cycle + 1)
        vector, extended = build_directed_vector(
            self.design, result.assignment, parent, horizon)
        if _vector_key(vector) in self.simulated:
            return
        trace = self.simulate(vector)
        if trace is None:
            return
        if target.branch is None:
            self.absorb_gain(vector, trace, target.cycle, extended)
            return
        if target.cycle >= len(trace) or \
                target.branch not in trace.records[target.cycle].branches:
            # Solved inputs failed to steer execution: a soundness miss.
            self.stats.directed_misses += 1
            self.note(f"miss {name}@{target.cycle}")
            return
        self.absorb(vector, trace,
                    Provenance("directed", target.branch, target.cycle,
                               extended))

    def attempt_flip(self, entry: list, index: int, key: tuple) -> None:
        replay: Replay = self.replay_of(entry)
        parent: InputVector = entry[0]
        self.excluded.add(key)
        constraints = flip_constraint(replay, index)
        flip_cycle = replay.path.constraints[index].cycle
        self.stats.solver_calls += 1
        result = solve(constraints, self.budget.solve_budget)
        if result.is_unsat:
            self.stats.unsat += 1
            return
        if not result.is_sat:
            self.stats.unknown += 1
            return
        self.stats.sat += 1
        horizon = max(len(parent), flip_cycle + 1)
        vector, extended = build_directed_vector(
            self.design, result.assignment, parent, horizon)
        if _vector_key(vector) in self.simulated:
            return
        trace = self.simulate(vector)
        if trace is None:
            return
        self.absorb_gain(vector, trace, flip_cycle, extended)

    def report(self) -> CoverageReport:
        branches = {}
        for b, hits in self.hit_counts.items():
            if hits > 0:
                cls = "reachable"
            elif self.attempts[b] and all(s == "unsat"
                                          for s in self.attempts[b]):
                cls = "potentially-unreachable"
            else:
                cls = "unknown"
            branches[b] = BranchCoverage(hits, cls)
        return CoverageReport(branches, self.coverage_pct())


def explore(design: InstrumentedDesign, seeds, budget: ExploreBudget | None = None,
            ) -> ExploreResult:
    """Expand seeds into the Full Input set and classify branch reachability."""
    budget = budget or ExploreBudget()
    if isinstance(seeds, InputSet):
        seed_vectors = seeds.vectors()
    elif isinstance(seeds, InputVector):
        seed_vectors = [seeds]
    else:
        seed_vectors = list(seeds)
    return _Explorer(design, budget).run(seed_vectors)


def random_fuzz(design: InstrumentedDesign, vectors: int, cycles: int,
                seed: int = 0) -> set[BranchId]:
    """Uniform-random baseline: coverage reached by ``vectors`` random runs."""
    rng = random.Random(seed)
    ports = design.module.data_input_ports()
    covered: set[BranchId] = set()
    for _ in range(vectors):
        rows = tuple({p.name: rng.randrange(1 << p.width) for p in ports}
                     for _ in range(cycles))
        covered |= run(design, InputVector(rows)).covered()
    return covered
