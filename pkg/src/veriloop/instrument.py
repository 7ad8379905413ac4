"""Branch-marker and register-snapshot instrumentation.

``instrument`` appends a ``$display("B_<n>")`` marker at the end of every
leaf branch arm (materializing implicit else/default arms as empty blocks
so their coverage is observable) and adds one clocked process that logs
``R <name> = %h`` for every register each cycle.  The built-in simulator
records branch hits natively from the branch map; the textual markers
exist so external simulators produce a parseable stdout stream.

``strip_instrumentation`` is the exact inverse on parser-normalized ASTs.
"""

from __future__ import annotations

import copy
import hashlib
import re
from dataclasses import dataclass

from .cfg import BranchMap, Cfg, build_cfg
from .diagnostics import VeriloopError
from .printer import pretty_print
from .vast import (
    AstModule,
    Block,
    Case,
    Display,
    Ident,
    If,
    Process,
    SourcePos,
    Stmt,
)

_MARKER_RE = re.compile(r"B_\d+$")
_REGLOG_RE = re.compile(r"R \w+ = %h$")


class InstrumentError(VeriloopError):
    pass


@dataclass(eq=False)
class InstrumentedDesign:
    module: AstModule
    cfg: Cfg
    branch_map: BranchMap
    registers: list[tuple[str, int]]
    design_hash: str
    source: str

    @property
    def name(self) -> str:
        return self.module.name


def is_marker(stmt: Stmt) -> bool:
    return (isinstance(stmt, Display) and not stmt.args
            and _MARKER_RE.fullmatch(stmt.text) is not None)


def _is_reglog_display(stmt: Stmt) -> bool:
    return (isinstance(stmt, Display) and len(stmt.args) == 1
            and _REGLOG_RE.fullmatch(stmt.text) is not None)


def _is_reglog_process(proc: Process) -> bool:
    return (proc.trigger == "posedge" and len(proc.body.stmts) > 0
            and all(_is_reglog_display(s) for s in proc.body.stmts))


def _contains_marker(block: Block) -> bool:
    for stmt in block.stmts:
        if is_marker(stmt):
            return True
        if isinstance(stmt, Block) and _contains_marker(stmt):
            return True
        if isinstance(stmt, If):
            if _contains_marker(stmt.then):
                return True
            if stmt.other is not None and _contains_marker(stmt.other):
                return True
        if isinstance(stmt, Case):
            for item in stmt.items:
                if _contains_marker(item.body):
                    return True
            if stmt.default is not None and _contains_marker(stmt.default):
                return True
    return False


def is_instrumented(module: AstModule) -> bool:
    if any(_is_reglog_process(p) for p in module.processes):
        return True
    return any(_contains_marker(p.body) for p in module.processes)


def design_hash(source: str) -> str:
    return hashlib.sha256(source.encode()).hexdigest()


def instrument(module: AstModule) -> InstrumentedDesign:
    """Instrument a clean module; raises on already-instrumented input."""
    if is_instrumented(module):
        raise InstrumentError("already instrumented")
    work = copy.deepcopy(module)
    cfg, _ = build_cfg(work)

    for edge in cfg.leaf_edges():
        marker = Display(edge.pos, text=str(edge.branch), args=[])
        if edge.block is not None:
            edge.block.stmts.append(marker)
            continue
        # Materialize the implicit arm so its coverage is observable.
        arm = Block(edge.pos, [marker], braced=True)
        stmt = edge.decision.stmt
        if edge.kind == "if-false":
            assert isinstance(stmt, If)
            stmt.other = arm
        elif edge.kind == "case-default":
            assert isinstance(stmt, Case)
            stmt.default = arm
        else:
            raise AssertionError("only else/default arms can be implicit")

    registers = work.registers()
    clock = work.clock_name()
    if registers and clock is not None:
        pos = SourcePos(1, 1)
        logs: list[Stmt] = [
            Display(pos, text=f"R {name} = %h", args=[Ident(pos, name=name)])
            for name, _ in registers
        ]
        work.processes.append(
            Process("posedge", clock, Block(pos, logs, braced=True), pos))

    # Rebuild so edges reference the instrumented statements the simulator runs.
    cfg, branch_map = build_cfg(work)
    source = pretty_print(work)
    return InstrumentedDesign(work, cfg, branch_map, registers,
                              design_hash(source), source)


def strip_instrumentation(design: InstrumentedDesign | AstModule) -> AstModule:
    module = design.module if isinstance(design, InstrumentedDesign) else design
    work = copy.deepcopy(module)
    work.processes = [p for p in work.processes if not _is_reglog_process(p)]
    for proc in work.processes:
        _strip_block(proc.body)
    return work


def _strip_block(block: Block) -> None:
    block.stmts = [s for s in block.stmts if not is_marker(s)]
    for stmt in block.stmts:
        if isinstance(stmt, Block):
            _strip_block(stmt)
        elif isinstance(stmt, If):
            _strip_block(stmt.then)
            if stmt.other is not None:
                _strip_block(stmt.other)
                if not stmt.other.stmts:
                    stmt.other = None
        elif isinstance(stmt, Case):
            for item in stmt.items:
                _strip_block(item.body)
            if stmt.default is not None:
                _strip_block(stmt.default)
                if not stmt.default.stmts:
                    stmt.default = None
                    stmt.default_pos = None
