"""Cycle-accurate two-state interpreter for the subset.

Per cycle: (1) combinational processes and continuous assigns settle to a
fixpoint against current state and current-cycle inputs; (2) clocked
processes run against pre-edge state — blocking assigns land immediately,
non-blocking right-hand sides are captured now and committed after all
processes; (3) combinational logic re-settles; the cycle record snapshots
post-commit registers and post-settle outputs.

The clock is implicit (one edge per cycle) and never appears in input
vectors.  All registers start at 0.  Branch hits are recorded when an
instrumentation marker executes, in execution order, duplicates kept.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .bitops import apply_binary, apply_unary, mask, truthy
from .cfg import BranchId
from .diagnostics import VeriloopError
from .instrument import InstrumentedDesign, is_marker
from .vast import (
    AstModule,
    Binary,
    BitSelect,
    Block,
    BlockingAssign,
    Case,
    Concat,
    Display,
    Expr,
    Ident,
    If,
    Literal,
    NonBlockingAssign,
    PartSelect,
    Stmt,
    Ternary,
    Unary,
)

COMB_FIXPOINT_LIMIT = 64


class SimulationError(VeriloopError):
    pass


# ---------------------------------------------------------------------------
# Input vectors


def format_value(value: int) -> str:
    return f"0x{value:x}"


def parse_value(text) -> int:
    if isinstance(text, int):
        return text
    s = str(text).strip().lower()
    if s.startswith("0x"):
        return int(s, 16)
    if s.isdigit():
        return int(s, 10)
    return int(s, 16)


@dataclass(frozen=True)
class InputVector:
    """Per-cycle assignments for every data input port."""

    cycles: tuple[dict, ...]

    def __len__(self) -> int:
        return len(self.cycles)

    def validate(self, module: AstModule) -> None:
        ports = {p.name: p.width for p in module.data_input_ports()}
        for n, cyc in enumerate(self.cycles):
            for name, width in ports.items():
                if name not in cyc:
                    raise SimulationError(
                        f"cycle {n}: input port '{name}' unassigned")
                value = cyc[name]
                if value < 0 or value >= 1 << width:
                    raise SimulationError(
                        f"width mismatch at assignment: cycle {n} input"
                        f" '{name}' value {format_value(value)} does not fit"
                        f" in {width} bits")
            for name in cyc:
                if name not in ports:
                    raise SimulationError(
                        f"cycle {n}: '{name}' is not a data input port")

    def to_json(self) -> list[dict]:
        return [{k: format_value(v) for k, v in cyc.items()}
                for cyc in self.cycles]

    @classmethod
    def from_json(cls, data: list[dict]) -> "InputVector":
        return cls(tuple({k: parse_value(v) for k, v in cyc.items()}
                         for cyc in data))

    @classmethod
    def load(cls, path: str | Path) -> "InputVector":
        return cls.from_json(json.loads(Path(path).read_text()))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n")


# ---------------------------------------------------------------------------
# Traces


@dataclass(frozen=True)
class CycleRecord:
    cycle: int
    branches: tuple[BranchId, ...]
    registers: dict
    outputs: dict

    def to_json_line(self) -> str:
        return json.dumps({
            "cycle": self.cycle,
            "branches": [str(b) for b in self.branches],
            "regs": {k: format_value(v) for k, v in self.registers.items()},
            "outs": {k: format_value(v) for k, v in self.outputs.items()},
        })


@dataclass(frozen=True)
class Trace:
    records: tuple[CycleRecord, ...]
    design_hash: str

    def __len__(self) -> int:
        return len(self.records)

    def branch_sets(self) -> list[tuple[BranchId, ...]]:
        return [r.branches for r in self.records]

    def covered(self) -> set[BranchId]:
        return {b for r in self.records for b in r.branches}

    def outputs_of(self, name: str) -> list[int]:
        return [r.outputs[name] for r in self.records]

    def to_json_lines(self) -> str:
        return "".join(r.to_json_line() + "\n" for r in self.records)

    @classmethod
    def from_json_lines(cls, text: str, design_hash: str = "") -> "Trace":
        records = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            records.append(CycleRecord(
                cycle=obj["cycle"],
                branches=tuple(BranchId.parse(b) for b in obj["branches"]),
                registers={k: parse_value(v) for k, v in obj["regs"].items()},
                outputs={k: parse_value(v) for k, v in obj["outs"].items()},
            ))
        return cls(tuple(records), design_hash)


def parse_external_stdout(text: str, output_names: tuple[str, ...] = ()) -> Trace:
    """Group an external simulator's ``B_<i>`` / ``R name = value`` lines
    into per-cycle records.  A new cycle starts when a branch marker follows
    register lines, or a register repeats within the current cycle.
    """
    records: list[CycleRecord] = []
    branches: list[BranchId] = []
    regs: dict = {}

    def flush() -> None:
        nonlocal branches, regs
        if branches or regs:
            outs = {k: regs[k] for k in output_names if k in regs}
            records.append(CycleRecord(len(records), tuple(branches),
                                       dict(regs), outs))
        branches, regs = [], {}

    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("B_"):
            if regs:
                flush()
            branches.append(BranchId.parse(line))
        elif line.startswith("R "):
            try:
                name, value = line[2:].split("=", 1)
            except ValueError:
                raise SimulationError(f"bad register line: {line!r}") from None
            name = name.strip()
            if name in regs:
                flush()
            regs[name] = parse_value(value.strip())
    flush()
    return Trace(tuple(records), "")


# ---------------------------------------------------------------------------
# Evaluation


def eval_expr(expr: Expr, state: dict) -> int:
    if isinstance(expr, Ident):
        return state[expr.name]
    if isinstance(expr, Literal):
        return expr.value
    if isinstance(expr, Unary):
        return apply_unary(expr.op, eval_expr(expr.operand, state), expr.width)
    if isinstance(expr, Binary):
        lhs = eval_expr(expr.lhs, state)
        rhs = eval_expr(expr.rhs, state)
        return apply_binary(expr.op, lhs, rhs, expr.width)
    if isinstance(expr, Ternary):
        if truthy(eval_expr(expr.cond, state)):
            return mask(eval_expr(expr.then, state), expr.width)
        return mask(eval_expr(expr.other, state), expr.width)
    if isinstance(expr, BitSelect):
        base = state[expr.base.name]
        index = eval_expr(expr.index, state)
        return (base >> index) & 1 if index < 64 else 0
    if isinstance(expr, PartSelect):
        base = state[expr.base.name]
        return mask(base >> expr.lsb, expr.msb - expr.lsb + 1)
    if isinstance(expr, Concat):
        value = 0
        for part in expr.parts:
            value = (value << part.width) | eval_expr(part, state)
        return value
    raise TypeError(f"unknown expression node {expr!r}")


@dataclass(frozen=True)
class _Target:
    """A resolved assignment destination (whole net, bit, or slice)."""

    name: str
    width: int          # destination slice width
    lsb: int
    full: bool


def _resolve_target(target: Expr, state: dict, module: AstModule) -> _Target:
    if isinstance(target, Ident):
        return _Target(target.name, module.width_of(target.name), 0, True)
    if isinstance(target, BitSelect):
        index = eval_expr(target.index, state)
        return _Target(target.base.name, 1, index, False)
    if isinstance(target, PartSelect):
        return _Target(target.base.name, target.msb - target.lsb + 1,
                       target.lsb, False)
    raise TypeError(f"bad assignment target {target!r}")


def _store(state: dict, tgt: _Target, value: int, module: AstModule) -> None:
    net_width = module.width_of(tgt.name)
    value = mask(value, tgt.width)
    if tgt.full:
        state[tgt.name] = value
        return
    if tgt.lsb >= net_width:
        return  # out-of-range select: two-state no-op
    keep = ~(mask((1 << tgt.width) - 1, net_width - tgt.lsb) << tgt.lsb)
    state[tgt.name] = mask((state[tgt.name] & keep) | (value << tgt.lsb),
                           net_width)


# ---------------------------------------------------------------------------
# The interpreter


class _Run:
    def __init__(self, module: AstModule):
        self.module = module
        self.state: dict = {}
        for port in module.ports:
            self.state[port.name] = 0
        for net in module.nets:
            self.state[net.name] = 0
        self.hits: list[BranchId] = []
        self.nba: list[tuple[_Target, int]] = []

    def exec_stmt(self, stmt: Stmt, record_hits: bool) -> None:
        if isinstance(stmt, Block):
            for s in stmt.stmts:
                self.exec_stmt(s, record_hits)
        elif isinstance(stmt, BlockingAssign):
            value = eval_expr(stmt.rhs, self.state)
            tgt = _resolve_target(stmt.target, self.state, self.module)
            _store(self.state, tgt, value, self.module)
        elif isinstance(stmt, NonBlockingAssign):
            value = eval_expr(stmt.rhs, self.state)
            tgt = _resolve_target(stmt.target, self.state, self.module)
            self.nba.append((tgt, value))
        elif isinstance(stmt, If):
            if truthy(eval_expr(stmt.cond, self.state)):
                self.exec_stmt(stmt.then, record_hits)
            elif stmt.other is not None:
                self.exec_stmt(stmt.other, record_hits)
        elif isinstance(stmt, Case):
            subject = eval_expr(stmt.subject, self.state)
            for item in stmt.items:
                if item.label.value == subject:
                    self.exec_stmt(item.body, record_hits)
                    return
            if stmt.default is not None:
                self.exec_stmt(stmt.default, record_hits)
        elif isinstance(stmt, Display):
            if record_hits and is_marker(stmt):
                self.hits.append(BranchId.parse(stmt.text))
        else:
            raise TypeError(f"unknown statement node {stmt!r}")

    def settle_comb(self, record_hits: bool) -> list[BranchId]:
        """Run comb processes and continuous assigns to fixpoint; return the
        branch hits of the final (stable) pass."""
        comb = [p for p in self.module.processes if p.trigger == "comb"]
        if not comb and not self.module.continuous_assigns:
            return []
        for _ in range(COMB_FIXPOINT_LIMIT):
            before = dict(self.state)
            pass_start = len(self.hits)
            for proc in comb:
                self.exec_stmt(proc.body, record_hits)
            for ca in self.module.continuous_assigns:
                value = eval_expr(ca.rhs, self.state)
                tgt = _resolve_target(ca.target, self.state, self.module)
                _store(self.state, tgt, value, self.module)
            pass_hits = self.hits[pass_start:]
            del self.hits[pass_start:]
            if self.state == before:
                return pass_hits  # hits of the stable pass only
        raise SimulationError(
            f"combinational loop: no fixpoint within {COMB_FIXPOINT_LIMIT}"
            " iterations")

    def run_cycle(self, cycle: int, inputs: dict) -> CycleRecord:
        self.hits = []
        self.state.update(inputs)
        comb_hits = self.settle_comb(record_hits=True)

        self.hits = []
        self.nba = []
        for proc in self.module.processes:
            if proc.trigger == "posedge":
                self.exec_stmt(proc.body, record_hits=True)
        clocked_hits = list(self.hits)
        for tgt, value in self.nba:
            _store(self.state, tgt, value, self.module)

        self.settle_comb(record_hits=False)

        registers = {name: self.state[name]
                     for name, _ in self.module.registers()}
        outputs = {p.name: self.state[p.name]
                   for p in self.module.output_ports()}
        return CycleRecord(cycle, tuple(comb_hits + clocked_hits),
                           registers, outputs)


def run_module(module: AstModule, inputs: InputVector,
               hash_value: str = "") -> Trace:
    """Simulate a (possibly uninstrumented) module."""
    inputs.validate(module)
    runner = _Run(module)
    records = [runner.run_cycle(n, cyc) for n, cyc in enumerate(inputs.cycles)]
    return Trace(tuple(records), hash_value)


def run(design: InstrumentedDesign, inputs: InputVector) -> Trace:
    return run_module(design.module, inputs, design.design_hash)
