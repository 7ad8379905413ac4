"""Symbolic trace replay and branch mutation.

A concrete trace is replayed with a symbolic shadow: per-cycle input
variables (``in_1``, ``reset_0``) and SSA-style register versions
(``counter_1`` is the value entering cycle 1).  Walking the concrete path
emits, per cycle and in execution order, the branch conditions taken,
then one pinning constraint per input port, then one effect constraint
per register committed at the edge.  Mutating a branch keeps everything
strictly before the decision point and appends the predicate that selects
the target arm instead; the suffix is dropped.

Intermediate combinational nets never get their own variables: their
expressions are inlined, so a constraint set mentions only input symbols
and register versions.  Values that steer structure (shift amounts,
bit-select indices) are concretized to their trace values and pinned with
a ``concretized`` note so mutation stays sound.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bitops import apply_binary, apply_unary, mask, truthy
from .cfg import BranchId, Decision, Edge
from .diagnostics import VeriloopError
from .instrument import InstrumentedDesign, is_marker
from .simulator import InputVector, Trace
from .vast import (
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


class ReplayError(VeriloopError):
    """Trace/design mismatch during symbolic replay."""


class MutationError(VeriloopError):
    """Target branch is not an alternative at any decision point on the path."""


# ---------------------------------------------------------------------------
# Symbolic expressions


@dataclass(frozen=True)
class SymExpr:
    width: int


@dataclass(frozen=True)
class SVar(SymExpr):
    name: str = ""
    cycle: int = 0
    kind: str = "input"  # "input" | "register"


@dataclass(frozen=True)
class SConst(SymExpr):
    value: int = 0


@dataclass(frozen=True)
class SUnary(SymExpr):
    op: str = ""
    operand: SymExpr = None


@dataclass(frozen=True)
class SBinary(SymExpr):
    op: str = ""
    lhs: SymExpr = None
    rhs: SymExpr = None


@dataclass(frozen=True)
class SCond(SymExpr):
    cond: SymExpr = None
    then: SymExpr = None
    other: SymExpr = None


@dataclass(frozen=True)
class SCast(SymExpr):
    """Zero-extend or truncate the operand to ``width``."""

    operand: SymExpr = None


@dataclass(frozen=True)
class SConcat(SymExpr):
    parts: tuple[SymExpr, ...] = ()


def s_const(width: int, value: int) -> SConst:
    return SConst(width, mask(value, width))


def s_cast(width: int, expr: SymExpr) -> SymExpr:
    if expr.width == width:
        return expr
    if isinstance(expr, SConst):
        return s_const(width, expr.value)
    return SCast(width, expr)


def s_unary(op: str, operand: SymExpr, width: int) -> SymExpr:
    if isinstance(operand, SConst):
        return s_const(width, apply_unary(op, operand.value, width))
    return SUnary(width, op, operand)


def s_binary(op: str, lhs: SymExpr, rhs: SymExpr, width: int) -> SymExpr:
    if isinstance(lhs, SConst) and isinstance(rhs, SConst):
        return s_const(width, apply_binary(op, lhs.value, rhs.value, width))
    return SBinary(width, op, lhs, rhs)


def sym_vars(expr: SymExpr) -> list[SVar]:
    out: list[SVar] = []

    def walk(e: SymExpr) -> None:
        if isinstance(e, SVar):
            out.append(e)
        elif isinstance(e, (SUnary, SCast)):
            walk(e.operand)
        elif isinstance(e, SBinary):
            walk(e.lhs)
            walk(e.rhs)
        elif isinstance(e, SCond):
            walk(e.cond)
            walk(e.then)
            walk(e.other)
        elif isinstance(e, SConcat):
            for p in e.parts:
                walk(p)

    walk(expr)
    return out


def eval_sym(expr: SymExpr, assignment: dict) -> int:
    if isinstance(expr, SConst):
        return expr.value
    if isinstance(expr, SVar):
        try:
            return mask(assignment[expr.name], expr.width)
        except KeyError:
            raise KeyError(f"unassigned symbolic variable {expr.name}") from None
    if isinstance(expr, SCast):
        return mask(eval_sym(expr.operand, assignment), expr.width)
    if isinstance(expr, SUnary):
        return apply_unary(expr.op, eval_sym(expr.operand, assignment), expr.width)
    if isinstance(expr, SBinary):
        return apply_binary(expr.op, eval_sym(expr.lhs, assignment),
                            eval_sym(expr.rhs, assignment), expr.width)
    if isinstance(expr, SCond):
        if truthy(eval_sym(expr.cond, assignment)):
            return mask(eval_sym(expr.then, assignment), expr.width)
        return mask(eval_sym(expr.other, assignment), expr.width)
    if isinstance(expr, SConcat):
        value = 0
        for part in expr.parts:
            value = (value << part.width) | eval_sym(part, assignment)
        return value
    raise TypeError(f"unknown symbolic node {expr!r}")


def render_const(width: int, value: int) -> str:
    if width == 1:
        return str(value)
    digits = (width + 3) // 4
    return f"{width}'h{value:0{digits}x}"


def render_sym(expr: SymExpr, parent_tight: bool = False) -> str:
    if isinstance(expr, SVar):
        return expr.name
    if isinstance(expr, SConst):
        return render_const(expr.width, expr.value)
    if isinstance(expr, SCast):
        inner = render_sym(expr.operand, True)
        if expr.width < expr.operand.width:
            return f"{inner}[{expr.width - 1}:0]"
        return inner
    if isinstance(expr, SUnary):
        return f"{expr.op}{render_sym(expr.operand, True)}"
    if isinstance(expr, SBinary):
        text = f"{render_sym(expr.lhs, True)} {expr.op} {render_sym(expr.rhs, True)}"
        return f"({text})" if parent_tight else text
    if isinstance(expr, SCond):
        text = (f"{render_sym(expr.cond, True)} ? {render_sym(expr.then, True)}"
                f" : {render_sym(expr.other, True)}")
        return f"({text})" if parent_tight else text
    if isinstance(expr, SConcat):
        return "{" + ", ".join(render_sym(p) for p in expr.parts) + "}"
    raise TypeError(f"unknown symbolic node {expr!r}")


# ---------------------------------------------------------------------------
# Constraints


@dataclass(frozen=True)
class Constraint:
    pred: SymExpr          # width-1 predicate, truthy means satisfied
    provenance: str        # "path-condition cycle N" | "assignment-effect cycle N" | "mutation-target"
    cycle: int
    note: str = ""

    def render(self) -> str:
        return render_sym(self.pred)

    def holds(self, assignment: dict) -> bool:
        return truthy(eval_sym(self.pred, assignment))


@dataclass
class ConstraintSet:
    constraints: list[Constraint] = field(default_factory=list)

    def variables(self) -> list[SVar]:
        seen: dict[str, SVar] = {}
        for c in self.constraints:
            for v in sym_vars(c.pred):
                prior = seen.get(v.name)
                if prior is not None and prior.width != v.width:
                    raise ValueError(f"width conflict for {v.name}")
                seen[v.name] = v
        return sorted(seen.values(), key=lambda v: (v.cycle, v.name))

    def input_variables(self) -> list[SVar]:
        return [v for v in self.variables() if v.kind == "input"]

    def satisfied_by(self, assignment: dict) -> bool:
        return all(c.holds(assignment) for c in self.constraints)

    def render_lines(self) -> list[str]:
        return [c.render() for c in self.constraints]

    def deduped(self) -> "ConstraintSet":
        seen: set[str] = set()
        kept = []
        for c in self.constraints:
            text = c.render()
            if text in seen:
                continue
            seen.add(text)
            kept.append(c)
        return ConstraintSet(kept)


# ---------------------------------------------------------------------------
# Replay


@dataclass(frozen=True)
class DecisionEvent:
    cycle: int
    decision: Decision
    taken: Edge
    prefix_len: int               # constraints emitted strictly before this decision
    env: dict                     # identifier -> (concrete, SymExpr) at decision time


@dataclass
class Replay:
    design: InstrumentedDesign
    inputs: InputVector
    path: ConstraintSet
    states: list[dict]            # per cycle: register -> SymExpr entering that cycle
    events: list[DecisionEvent]
    concrete: dict                # every symbol name -> its concrete trace value

    def events_at(self, cycle: int) -> list[DecisionEvent]:
        return [e for e in self.events if e.cycle == cycle]


def _pred_equals(expr: SymExpr, value: int) -> SymExpr:
    return s_binary("==", expr, s_const(expr.width, value), 1)


def _if_predicate(cond: SymExpr, taken_true: bool) -> SymExpr:
    if taken_true:
        if cond.width == 1:
            return _pred_equals(cond, 1)
        return s_binary("!=", cond, s_const(cond.width, 0), 1)
    return _pred_equals(cond, 0)


class _Shadow:
    """Concolic interpreter: concrete execution with a symbolic mirror."""

    def __init__(self, design: InstrumentedDesign, inputs: InputVector):
        self.design = design
        self.module = design.module
        self.inputs = inputs
        self.env: dict = {}
        for port in self.module.ports:
            self.env[port.name] = (0, s_const(port.width, 0))
        for net in self.module.nets:
            self.env[net.name] = (0, s_const(net.width, 0))
        self.constraints: list[Constraint] = []
        self.events: list[DecisionEvent] = []
        self.states: list[dict] = []
        self.concrete: dict = {}
        self.cycle = 0
        self.hits: list[BranchId] = []
        self.pending: list[tuple] = []  # (name, lsb|None, width, conc, sym)
        self.touched: list[str] = []
        self.in_clocked = False
        self.decisions_by_stmt = {id(d.stmt): d
                                  for d in design.cfg.decisions}
        self.reg_names = [name for name, _ in design.registers]

    # -- constraint plumbing page ------------------------------------------

    def emit(self, pred: SymExpr, kind: str, note: str = "") -> None:
        provenance = (f"assignment-effect cycle {self.cycle}" if kind == "effect"
                      else f"path-condition cycle {self.cycle}")
        self.constraints.append(Constraint(pred, provenance, self.cycle, note))

    # -- expression shadow ----------------------------------------------------

    def eval(self, expr: Expr, record: bool) -> tuple[int, SymExpr]:
        if isinstance(expr, Ident):
            return self.env[expr.name]
        if isinstance(expr, Literal):
            return expr.value, s_const(expr.width, expr.value)
        if isinstance(expr, Unary):
            conc, sym = self.eval(expr.operand, record)
            return (apply_unary(expr.op, conc, expr.width),
                    s_unary(expr.op, sym, expr.width))
        if isinstance(expr, Binary):
            lc, ls = self.eval(expr.lhs, record)
            rc, rs = self.eval(expr.rhs, record)
            if expr.op in ("<<", ">>") and not isinstance(rs, SConst):
                rs = self.concretize(rs, rc, record)
            conc = apply_binary(expr.op, lc, rc, expr.width)
            return conc, s_binary(expr.op, ls, rs, expr.width)
        if isinstance(expr, Ternary):
            cc, cs = self.eval(expr.cond, record)
            # Follow the concrete arm; pin the condition so the choice is sound.
            if not isinstance(cs, SConst):
                if record:
                    self.emit(_if_predicate(cs, truthy(cc)), "branch",
                              note="ternary")
            if truthy(cc):
                conc, sym = self.eval(expr.then, record)
            else:
                conc, sym = self.eval(expr.other, record)
            return mask(conc, expr.width), s_cast(expr.width, sym)
        if isinstance(expr, BitSelect):
            bc, bs = self.env[expr.base.name]
            ic, isym = self.eval(expr.index, record)
            if not isinstance(isym, SConst):
                self.concretize(isym, ic, record)
            conc = (bc >> ic) & 1 if ic < 64 else 0
            if ic >= bs.width:
                return conc, s_const(1, 0)
            sym = s_cast(1, bs if ic == 0 else
                         s_binary(">>", bs, s_const(bs.width, ic), bs.width))
            return conc, sym
        if isinstance(expr, PartSelect):
            bc, bs = self.env[expr.base.name]
            width = expr.msb - expr.lsb + 1
            conc = mask(bc >> expr.lsb, width)
            sym = s_cast(width, bs if expr.lsb == 0 else
                         s_binary(">>", bs, s_const(bs.width, expr.lsb), bs.width))
            return conc, sym
        if isinstance(expr, Concat):
            pairs = [self.eval(p, record) for p in expr.parts]
            conc = 0
            for (pc, _), part in zip(pairs, expr.parts):
                conc = (conc << part.width) | pc
            return conc, SConcat(expr.width, tuple(s for _, s in pairs))
        raise TypeError(f"unknown expression node {expr!r}")

    def concretize(self, sym: SymExpr, value: int, record: bool) -> SConst:
        """Pin a structural value (shift amount, index) to its trace value."""
        if record:
            self.emit(_pred_equals(sym, value), "branch", note="concretized")
        return s_const(sym.width, value)

    # -- statement shadow ---------------------------------------------------

    def assign(self, target: Expr, conc: int, sym: SymExpr,
               nonblocking: bool, record: bool) -> None:
        if isinstance(target, Ident):
            name, lsb, width = target.name, None, target.width
        elif isinstance(target, BitSelect):
            ic, isym = self.eval(target.index, record)
            if not isinstance(isym, SConst):
                self.concretize(isym, ic, record)
            name, lsb, width = target.base.name, ic, 1
        elif isinstance(target, PartSelect):
            name, lsb, width = (target.base.name, target.lsb,
                                target.msb - target.lsb + 1)
        else:
            raise TypeError(f"bad assignment target {target!r}")
        if nonblocking:
            self.pending.append((name, lsb, width, conc, sym))
            if name not in self.touched:
                self.touched.append(name)
        else:
            self.env[name] = self.merge(name, lsb, width, conc, sym)
            # Blocking writes to registers inside a clocked process still
            # commit a fresh version at the edge; combinational nets stay
            # inlined expressions and never get version variables.
            if self.in_clocked and name not in self.touched:
                self.touched.append(name)

    def merge(self, name: str, lsb, width: int, conc: int,
              sym: SymExpr) -> tuple[int, SymExpr]:
        """Fold a (possibly partial) write into the net's current value."""
        net_width = self.module.width_of(name)
        conc = mask(conc, width)
        sym = s_cast(width, sym)
        if lsb is None and width == net_width:
            return conc, sym
        lsb = lsb or 0
        old_conc, old_sym = self.env[name]
        if lsb >= net_width:
            return old_conc, old_sym
        keep = ~(mask((1 << width) - 1, net_width - lsb) << lsb)
        new_conc = mask((old_conc & keep) | (conc << lsb), net_width)
        new_sym = s_binary(
            "|",
            s_binary("&", old_sym, s_const(net_width, keep), net_width),
            s_binary("<<", s_cast(net_width, sym),
                     s_const(net_width, lsb), net_width),
            net_width)
        return new_conc, new_sym

    def exec_stmt(self, stmt: Stmt, record: bool) -> None:
        if isinstance(stmt, Block):
            for s in stmt.stmts:
                self.exec_stmt(s, record)
        elif isinstance(stmt, BlockingAssign):
            conc, sym = self.eval(stmt.rhs, record)
            self.assign(stmt.target, conc, sym, nonblocking=False, record=record)
        elif isinstance(stmt, NonBlockingAssign):
            conc, sym = self.eval(stmt.rhs, record)
            self.assign(stmt.target, conc, sym, nonblocking=True, record=record)
        elif isinstance(stmt, If):
            decision = self.decisions_by_stmt[id(stmt)]
            cc, cs = self.eval(stmt.cond, record)
            taken_true = truthy(cc)
            taken = decision.edges[0] if taken_true else decision.edges[1]
            if record:
                self.events.append(DecisionEvent(
                    self.cycle, decision, taken, len(self.constraints),
                    dict(self.env)))
                self.emit(_if_predicate(cs, taken_true), "branch")
            if taken_true:
                self.exec_stmt(stmt.then, record)
            elif stmt.other is not None:
                self.exec_stmt(stmt.other, record)
        elif isinstance(stmt, Case):
            decision = self.decisions_by_stmt[id(stmt)]
            sc, ss = self.eval(stmt.subject, record)
            taken = decision.edges[-1]  # default unless an item matches
            body: Block | None = stmt.default
            for k, item in enumerate(stmt.items):
                if item.label.value == sc:
                    taken = decision.edges[k]
                    body = item.body
                    break
            if record:
                self.events.append(DecisionEvent(
                    self.cycle, decision, taken, len(self.constraints),
                    dict(self.env)))
                for pred in case_edge_predicates(ss, stmt, taken):
                    self.emit(pred, "branch")
            if body is not None:
                self.exec_stmt(body, record)
        elif isinstance(stmt, Display):
            if record and is_marker(stmt):
                self.hits.append(BranchId.parse(stmt.text))
        else:
            raise TypeError(f"unknown statement node {stmt!r}")

    # -- cycle machinery -----------------------------------------------------

    def settle_comb(self, record: bool) -> list[BranchId]:
        comb = [p for p in self.module.processes if p.trigger == "comb"]
        if not comb and not self.module.continuous_assigns:
            return []
        for _ in range(COMB_FIXPOINT_LIMIT):
            before = {k: v[0] for k, v in self.env.items()}
            saved_constraints = len(self.constraints)
            saved_events = len(self.events)
            pass_start = len(self.hits)
            for proc in comb:
                self.exec_stmt(proc.body, record)
            for ca in self.module.continuous_assigns:
                conc, sym = self.eval(ca.rhs, record)
                tgt = ca.target
                if isinstance(tgt, Ident):
                    self.env[tgt.name] = self.merge(tgt.name, None, tgt.width,
                                                    conc, sym)
                elif isinstance(tgt, BitSelect):
                    ic, isym = self.eval(tgt.index, record)
                    if not isinstance(isym, SConst):
                        self.concretize(isym, ic, record)
                    self.env[tgt.base.name] = self.merge(
                        tgt.base.name, ic, 1, conc, sym)
                elif isinstance(tgt, PartSelect):
                    self.env[tgt.base.name] = self.merge(
                        tgt.base.name, tgt.lsb, tgt.msb - tgt.lsb + 1,
                        conc, sym)
            pass_hits = self.hits[pass_start:]
            del self.hits[pass_start:]
            after = {k: v[0] for k, v in self.env.items()}
            if after == before:
                return pass_hits
            # not stable yet: discard this pass's constraints and events
            del self.constraints[saved_constraints:]
            del self.events[saved_events:]
        raise ReplayError("combinational loop during replay")

    def run_cycle(self, expected_hits: tuple[BranchId, ...] | None) -> None:
        t = self.cycle
        cyc_inputs = self.inputs.cycles[t]
        for port in self.module.data_input_ports():
            var = SVar(port.width, f"{port.name}_{t}", t, "input")
            value = cyc_inputs[port.name]
            self.env[port.name] = (value, var)
            self.concrete[var.name] = value

        self.states.append({name: self.env[name][1] for name in self.reg_names})

        comb_hits = self.settle_comb(record=True)

        self.hits = []
        self.pending = []
        self.touched = []
        self.in_clocked = True
        for proc in self.module.processes:
            if proc.trigger == "posedge":
                self.exec_stmt(proc.body, record=True)
        self.in_clocked = False
        clocked_hits = list(self.hits)

        all_hits = tuple(comb_hits + clocked_hits)
        if expected_hits is not None and all_hits != expected_hits:
            raise ReplayError(
                f"cycle {t}: trace/design mismatch: trace covers "
                f"{[str(b) for b in expected_hits]} but replay covers "
                f"{[str(b) for b in all_hits]}")

        # Input pins: after all decisions of the cycle, before the effects.
        for port in self.module.data_input_ports():
            _, var = self.env[port.name]
            self.emit(_pred_equals(var, cyc_inputs[port.name]), "pin")

        # Commit: fold pending non-blocking writes in execution order, then
        # mint one fresh version variable per touched register.
        for name, lsb, width, conc, sym in self.pending:
            self.env[name] = self.merge(name, lsb, width, conc, sym)
        for name in self.touched:
            conc, sym = self.env[name]
            width = self.module.width_of(name)
            version = SVar(width, f"{name}_{t + 1}", t + 1, "register")
            self.emit(s_binary("==", version, sym, 1), "effect")
            self.env[name] = (conc, version)
            self.concrete[version.name] = conc

        self.settle_comb(record=False)
        self.cycle += 1


def case_edge_predicates(subject_sym: SymExpr, stmt: Case,
                         edge: Edge) -> list[SymExpr]:
    """Predicates selecting ``edge`` at a case decision."""
    width = max(subject_sym.width,
                max(i.label.width for i in stmt.items))
    subj = s_cast(width, subject_sym)
    if edge.kind == "case-item":
        k = edge.address[-1][1]
        label = stmt.items[k].label
        return [s_binary("==", subj, s_const(width, label.value), 1)]
    return [s_binary("!=", subj, s_const(width, item.label.value), 1)
            for item in stmt.items]


def symbolic_replay(design: InstrumentedDesign, trace: Trace,
                    inputs: InputVector) -> Replay:
    """Replay a concrete trace symbolically; validates trace against design."""
    if trace.design_hash and trace.design_hash != design.design_hash:
        raise ReplayError("trace/design mismatch: design hash differs")
    if len(trace) != len(inputs):
        raise ReplayError("trace/design mismatch: cycle count differs")
    shadow = _Shadow(design, inputs)
    for t in range(len(inputs)):
        shadow.run_cycle(trace.records[t].branches)
    return Replay(design, inputs, ConstraintSet(list(shadow.constraints)),
                  shadow.states, shadow.events, shadow.concrete)


def replay_inputs(design: InstrumentedDesign, inputs: InputVector) -> Replay:
    """Replay without a pre-recorded trace (no cross-validation)."""
    shadow = _Shadow(design, inputs)
    for _ in range(len(inputs)):
        shadow.run_cycle(None)
    return Replay(design, inputs, ConstraintSet(list(shadow.constraints)),
                  shadow.states, shadow.events, shadow.concrete)


def _edge_for_target(design: InstrumentedDesign, target) -> Edge:
    if isinstance(target, Edge):
        return target
    if isinstance(target, BranchId):
        if target not in design.branch_map:
            raise MutationError(f"unknown branch {target}")
        return design.branch_map.edge(target)
    raise TypeError(f"bad mutation target {target!r}")


def mutate_branch(replay: Replay, cycle: int, target) -> ConstraintSet:
    """Constraint set forcing execution into ``target`` at ``cycle``.

    ``target`` is a BranchId or a raw CFG edge (the latter covers unnumbered
    arms such as an if's non-leaf else edge).  The target must be an
    alternative arm of a decision the path visited at that cycle.
    """
    edge = _edge_for_target(replay.design, target)
    event = next((e for e in replay.events_at(cycle)
                  if e.decision is edge.decision), None)
    if event is None:
        raise MutationError(
            f"{_target_name(edge)} is not an alternative at any decision "
            f"point on the path at cycle {cycle}")
    if event.taken is edge:
        raise MutationError(
            f"{_target_name(edge)} was already taken at cycle {cycle}")

    kept = list(replay.path.constraints[:event.prefix_len])
    decision = edge.decision
    if decision.kind == "if":
        _, cond_sym = _eval_in_env(replay, event, decision.subject)
        preds = [_if_predicate(cond_sym, edge.kind == "if-true")]
    else:
        _, subj_sym = _eval_in_env(replay, event, decision.subject)
        preds = case_edge_predicates(subj_sym, decision.stmt, edge)
    for pred in preds:
        kept.append(Constraint(pred, "mutation-target", cycle))
    return ConstraintSet(kept).deduped()


def negate(pred: SymExpr) -> SymExpr:
    if isinstance(pred, SBinary) and pred.op == "==":
        return SBinary(1, "!=", pred.lhs, pred.rhs)
    if isinstance(pred, SBinary) and pred.op == "!=":
        return SBinary(1, "==", pred.lhs, pred.rhs)
    return SUnary(1, "!", pred)


def flip_indices(path: ConstraintSet) -> list[int]:
    """Positions of ternary-condition pins along the path.

    Ternary conditions are path constraints without CFG edges; flipping
    one is the only way to diversify data-dependent state updates such as
    ``state <= in ? A : B``.
    """
    return [i for i, c in enumerate(path.constraints) if c.note == "ternary"]


def flip_constraint(replay: Replay, index: int) -> ConstraintSet:
    """Keep everything before the indexed path constraint; negate it."""
    pinned = replay.path.constraints[index]
    kept = list(replay.path.constraints[:index])
    kept.append(Constraint(negate(pinned.pred), "mutation-target",
                           pinned.cycle, note="ternary-flip"))
    return ConstraintSet(kept).deduped()


def _target_name(edge: Edge) -> str:
    return str(edge.branch) if edge.branch is not None else f"edge {edge.kind}"


def _eval_in_env(replay: Replay, event: DecisionEvent, expr: Expr):
    saved_shadow = _Shadow(replay.design, replay.inputs)
    saved_shadow.env = dict(event.env)
    saved_shadow.cycle = event.cycle
    return saved_shadow.eval(expr, record=False)
