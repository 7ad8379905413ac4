"""Bounded bit-vector solving plus SMT-LIB2 (QF_BV) export.

The built-in procedure is deliberately simple: unit propagation of
equality facts, then exhaustive enumeration of the remaining free
variables in ascending ``(cycle, name)`` order, smallest value first, so
the returned witness is the lexicographically smallest one.  Register
versions defined by effect equalities are derived, not enumerated.  SAT
is returned only after the assignment re-evaluates to true on every
constraint; UNSAT only when the remaining domain was exhausted; anything
cut short by the budget is UNKNOWN.

The enumeration sweep is evaluated in vectorized chunks (numpy) purely
for speed; order and counting match the scalar definition.
"""

from __future__ import annotations

import re
import subprocess
import time
from dataclasses import dataclass

import numpy as np

from .bitops import mask
from .diagnostics import VeriloopError
from .symbolic import (
    Constraint,
    ConstraintSet,
    SBinary,
    SCast,
    SConcat,
    SCond,
    SConst,
    SUnary,
    SVar,
    SymExpr,
    eval_sym,
    sym_vars,
)

_CHUNK = 1 << 16


class MalformedConstraintError(VeriloopError):
    pass


@dataclass(frozen=True)
class SolveBudget:
    max_evaluations: int = 1_000_000
    wall_ms: int = 2_000

    def __post_init__(self):
        if self.max_evaluations <= 0 or self.wall_ms <= 0:
            raise ValueError("budget fields must be positive")


@dataclass(frozen=True)
class SolveResult:
    status: str                     # "sat" | "unsat" | "unknown"
    assignment: dict | None = None  # name -> value, covers every variable
    reason: str = ""
    evaluations: int = 0

    @property
    def is_sat(self) -> bool:
        return self.status == "sat"

    @property
    def is_unsat(self) -> bool:
        return self.status == "unsat"


# ---------------------------------------------------------------------------
# Propagation


def _as_var_binding(pred: SymExpr, bindings: dict):
    """``var == evaluable`` (either side) -> (name, value), else None."""
    if not (isinstance(pred, SBinary) and pred.op == "=="):
        return None
    for var_side, other in ((pred.lhs, pred.rhs), (pred.rhs, pred.lhs)):
        if isinstance(var_side, SVar) and var_side.name not in bindings:
            try:
                value = eval_sym(other, bindings)
            except KeyError:
                continue
            return var_side.name, mask(value, var_side.width)
    return None


def _propagate(constraints: list[Constraint], bindings: dict) -> bool:
    """Extend ``bindings`` with forced values.  False means contradiction."""
    changed = True
    while changed:
        changed = False
        for c in constraints:
            try:
                if not c.holds(bindings):
                    return False
                continue  # fully evaluable and true
            except KeyError:
                pass
            found = _as_var_binding(c.pred, bindings)
            if found is not None:
                name, value = found
                bindings[name] = value
                changed = True
    return True


def _classify(variables: list[SVar], constraints: list[Constraint],
              bindings: dict) -> list[SVar]:
    """Variables that must be enumerated (not derivable by propagation)."""
    defined: dict[str, set[str]] = {}
    for c in constraints:
        pred = c.pred
        if not (isinstance(pred, SBinary) and pred.op == "=="):
            continue
        for var_side, other in ((pred.lhs, pred.rhs), (pred.rhs, pred.lhs)):
            if isinstance(var_side, SVar) and var_side.name not in bindings:
                deps = {v.name for v in sym_vars(other)}
                if var_side.name not in deps:
                    prior = defined.get(var_side.name)
                    if prior is None or len(deps) < len(prior):
                        defined[var_side.name] = deps

    free = [v for v in variables if v.name not in bindings]
    # Resolve the dependency closure; anything outside it gets enumerated.
    enum = [v for v in free if v.name not in defined]
    resolved = set(bindings) | {v.name for v in enum}
    progress = True
    while progress:
        progress = False
        for name, deps in defined.items():
            if name not in resolved and deps <= resolved:
                resolved.add(name)
                progress = True
    for v in free:
        if v.name not in resolved:
            enum.append(v)  # circular definition: fall back to enumeration
            resolved.add(v.name)
    enum.sort(key=lambda v: (v.cycle, v.name))
    return enum


# ---------------------------------------------------------------------------
# Vectorized evaluation over candidate chunks


def _mask_arr(arr: np.ndarray, width: int) -> np.ndarray:
    if width >= 64:
        return arr
    return arr & np.uint64((1 << width) - 1)


def _eval_batch(expr: SymExpr, env: dict) -> np.ndarray:
    if isinstance(expr, SConst):
        return np.uint64(expr.value)
    if isinstance(expr, SVar):
        try:
            value = env[expr.name]
        except KeyError:
            raise KeyError(f"unassigned symbolic variable {expr.name}") from None
        return np.uint64(value) if isinstance(value, int) else value
    if isinstance(expr, SCast):
        return _mask_arr(_eval_batch(expr.operand, env), expr.width)
    if isinstance(expr, SUnary):
        a = _eval_batch(expr.operand, env)
        if expr.op == "~":
            return _mask_arr(~a, expr.width)
        if expr.op == "-":
            return _mask_arr(np.uint64(0) - a, expr.width)
        if expr.op == "!":
            return (a == 0).astype(np.uint64)
        raise ValueError(expr.op)
    if isinstance(expr, SBinary):
        a = _eval_batch(expr.lhs, env)
        b = _eval_batch(expr.rhs, env)
        op = expr.op
        if op == "+":
            return _mask_arr(a + b, expr.width)
        if op == "-":
            return _mask_arr(a - b, expr.width)
        if op == "&":
            return _mask_arr(a & b, expr.width)
        if op == "|":
            return _mask_arr(a | b, expr.width)
        if op == "^":
            return _mask_arr(a ^ b, expr.width)
        if op == "==":
            return (a == b).astype(np.uint64)
        if op == "!=":
            return (a != b).astype(np.uint64)
        if op == "<":
            return (a < b).astype(np.uint64)
        if op == "<=":
            return (a <= b).astype(np.uint64)
        if op == ">":
            return (a > b).astype(np.uint64)
        if op == ">=":
            return (a >= b).astype(np.uint64)
        if op == "<<":
            shift = np.minimum(b, np.uint64(63))
            shifted = _mask_arr(a << shift, expr.width)
            return np.where(b >= np.uint64(expr.width), np.uint64(0), shifted)
        if op == ">>":
            shift = np.minimum(b, np.uint64(63))
            shifted = _mask_arr(a >> shift, expr.width)
            return np.where(b >= np.uint64(64), np.uint64(0), shifted)
        if op == "&&":
            return ((a != 0) & (b != 0)).astype(np.uint64)
        if op == "||":
            return ((a != 0) | (b != 0)).astype(np.uint64)
        raise ValueError(op)
    if isinstance(expr, SCond):
        c = _eval_batch(expr.cond, env)
        t = _mask_arr(_eval_batch(expr.then, env), expr.width)
        e = _mask_arr(_eval_batch(expr.other, env), expr.width)
        return np.where(c != 0, t, e)
    if isinstance(expr, SConcat):
        value = np.uint64(0)
        for part in expr.parts:
            value = (value << np.uint64(part.width)) | _eval_batch(part, env)
        return value
    raise TypeError(f"unknown symbolic node {expr!r}")


# ---------------------------------------------------------------------------
# solve()


def _check_widths(cs: ConstraintSet) -> list[SVar]:
    try:
        variables = cs.variables()
    except ValueError as exc:
        raise MalformedConstraintError(str(exc)) from None
    for c in cs.constraints:
        _walk_widths(c.pred)
    return variables


def _walk_widths(expr: SymExpr) -> None:
    if isinstance(expr, SBinary):
        if expr.op in ("+", "-", "&", "|", "^"):
            if expr.width < max(expr.lhs.width, expr.rhs.width) and not isinstance(
                    expr, SConst):
                raise MalformedConstraintError(
                    f"width mismatch: {expr.op} result narrower than operands")
        _walk_widths(expr.lhs)
        _walk_widths(expr.rhs)
    elif isinstance(expr, (SUnary, SCast)):
        _walk_widths(expr.operand)
    elif isinstance(expr, SCond):
        _walk_widths(expr.cond)
        _walk_widths(expr.then)
        _walk_widths(expr.other)
    elif isinstance(expr, SConcat):
        for p in expr.parts:
            _walk_widths(p)


def solve(constraints: ConstraintSet, budget: SolveBudget | None = None) -> SolveResult:
    budget = budget or SolveBudget()
    variables = _check_widths(constraints)
    deadline = time.monotonic() + budget.wall_ms / 1000.0

    bindings: dict = {}
    if not _propagate(constraints.constraints, bindings):
        return SolveResult("unsat", reason="propagation contradiction")

    enum_vars = _classify(variables, constraints.constraints, bindings)

    if not enum_vars:
        final = dict(bindings)
        if not _propagate(constraints.constraints, final):
            return SolveResult("unsat", reason="propagation contradiction")
        return _finalize(constraints, variables, final, evaluations=1)

    domain = 1
    for v in enum_vars:
        domain *= 1 << v.width
    if domain > 1 << 62:
        # uint64 index arithmetic would overflow; these domains are budget
        # bound anyway, so enumerate scalar-wise.
        return _scalar_sweep(constraints, variables, enum_vars, bindings,
                             budget, deadline, 0, domain, 0)

    evaluations = 0
    lanes = [np.arange(_CHUNK, dtype=np.uint64)]  # scratch reuse
    index = 0
    while index < domain:
        if evaluations >= budget.max_evaluations:
            return SolveResult("unknown",
                               reason=f"evaluation budget "
                                      f"({budget.max_evaluations}) exhausted",
                               evaluations=evaluations)
        if time.monotonic() > deadline:
            return SolveResult("unknown",
                               reason=f"wall-clock budget ({budget.wall_ms} ms)"
                                      " exhausted",
                               evaluations=evaluations)
        chunk = min(_CHUNK, domain - index,
                    budget.max_evaluations - evaluations)
        idx = lanes[0][:chunk] + np.uint64(index)
        env: dict = dict(bindings)
        # Decompose the lexicographic index into per-variable values,
        # least-significant variable last.
        div = domain
        for v in enum_vars:
            div //= 1 << v.width
            env[v.name] = (idx // np.uint64(div)) % np.uint64(1 << v.width)
        sat_mask = _batch_candidates(constraints.constraints, env)
        if sat_mask is None:
            # some derived variable could not be resolved: scalar fallback
            return _scalar_sweep(constraints, variables, enum_vars, bindings,
                                 budget, deadline, index, domain, evaluations)
        hits = np.nonzero(sat_mask)[0]
        if hits.size:
            first = int(hits[0])
            evaluations += first + 1
            witness = dict(bindings)
            for v in enum_vars:
                witness[v.name] = int(env[v.name][first])
            if not _propagate(constraints.constraints, witness):
                raise AssertionError("witness failed propagation re-check")
            return _finalize(constraints, variables, witness, evaluations)
        evaluations += chunk
        index += chunk

    return SolveResult("unsat", reason="domain exhausted",
                       evaluations=evaluations)


def _batch_candidates(constraints: list[Constraint], env: dict):
    """Vector of candidate verdicts, or None when derivation stalls."""
    with np.errstate(over="ignore"):  # uint64 wraparound is the semantics
        return _batch_candidates_inner(constraints, env)


def _batch_candidates_inner(constraints: list[Constraint], env: dict):
    # Derive defined variables in dependency order by repeated passes.
    pending = list(constraints)
    for _ in range(len(constraints) + 1):
        progress = False
        remaining = []
        for c in pending:
            pred = c.pred
            if isinstance(pred, SBinary) and pred.op == "==":
                for var_side, other in ((pred.lhs, pred.rhs),
                                        (pred.rhs, pred.lhs)):
                    if (isinstance(var_side, SVar)
                            and var_side.name not in env):
                        try:
                            value = _eval_batch(other, env)
                        except KeyError:
                            continue
                        env[var_side.name] = _mask_arr(
                            np.broadcast_to(value, _env_shape(env)).copy()
                            if np.ndim(value) == 0 else value,
                            var_side.width)
                        progress = True
                        break
            remaining.append(c)
        pending = remaining
        if not progress:
            break

    verdict = None
    for c in constraints:
        try:
            value = _eval_batch(c.pred, env)
        except KeyError:
            return None
        ok = value != 0
        verdict = ok if verdict is None else (verdict & ok)
    if verdict is None:
        return np.ones(_env_shape(env), dtype=bool)
    if np.ndim(verdict) == 0:
        return np.full(_env_shape(env), bool(verdict))
    return verdict


def _env_shape(env: dict) -> int:
    for value in env.values():
        if np.ndim(value) > 0:
            return value.shape[0]
    return 1


def _scalar_sweep(constraints, variables, enum_vars, bindings, budget,
                  deadline, start_index, domain, evaluations) -> SolveResult:
    index = start_index
    while index < domain:
        if evaluations >= budget.max_evaluations:
            return SolveResult("unknown", reason="evaluation budget exhausted",
                               evaluations=evaluations)
        if time.monotonic() > deadline:
            return SolveResult("unknown", reason="wall-clock budget exhausted",
                               evaluations=evaluations)
        candidate = dict(bindings)
        div = domain
        for v in enum_vars:
            div //= 1 << v.width
            candidate[v.name] = (index // div) % (1 << v.width)
        evaluations += 1
        if _propagate(constraints.constraints, candidate):
            try:
                if constraints.satisfied_by(candidate):
                    return _finalize(constraints, variables, candidate,
                                     evaluations)
            except KeyError:
                pass
        index += 1
    return SolveResult("unsat", reason="domain exhausted",
                       evaluations=evaluations)


def _finalize(constraints: ConstraintSet, variables: list[SVar],
              assignment: dict, evaluations: int) -> SolveResult:
    """Hard re-check gate: SAT is only ever returned with a verified witness."""
    for v in variables:
        if v.name not in assignment:
            assignment[v.name] = 0
    if not constraints.satisfied_by(assignment):
        raise AssertionError("solver produced a non-satisfying witness")
    ordered = {v.name: assignment[v.name] for v in variables}
    return SolveResult("sat", assignment=ordered, evaluations=evaluations)


# ---------------------------------------------------------------------------
# SMT-LIB2 export


def _smt_const(width: int, value: int) -> str:
    if width % 4 == 0:
        return f"#x{value:0{width // 4}x}"
    return f"#b{value:0{width}b}"


def _smt_term(expr: SymExpr, width: int) -> str:
    """Emit ``expr`` as a bit-vector term of exactly ``width`` bits."""
    inner = _smt_term_natural(expr)
    return _smt_resize(inner, expr.width, width)


def _smt_resize(text: str, have: int, want: int) -> str:
    if have == want:
        return text
    if have < want:
        return f"((_ zero_extend {want - have}) {text})"
    return f"((_ extract {want - 1} 0) {text})"


def _smt_term_natural(expr: SymExpr) -> str:
    if isinstance(expr, SVar):
        return expr.name
    if isinstance(expr, SConst):
        return _smt_const(expr.width, expr.value)
    if isinstance(expr, SCast):
        return _smt_term(expr.operand, expr.width)
    if isinstance(expr, SUnary):
        if expr.op == "~":
            return f"(bvnot {_smt_term(expr.operand, expr.width)})"
        if expr.op == "-":
            return f"(bvneg {_smt_term(expr.operand, expr.width)})"
        if expr.op == "!":
            z = _smt_const(expr.operand.width, 0)
            return (f"(ite (= {_smt_term_natural(expr.operand)} {z})"
                    f" #b1 #b0)")
        raise ValueError(expr.op)
    if isinstance(expr, SBinary):
        op = expr.op
        if op in ("+", "-", "&", "|", "^", "<<", ">>"):
            fn = {"+": "bvadd", "-": "bvsub", "&": "bvand", "|": "bvor",
                  "^": "bvxor", "<<": "bvshl", ">>": "bvlshr"}[op]
            a = _smt_term(expr.lhs, expr.width)
            b = _smt_term(expr.rhs, expr.width)
            return f"({fn} {a} {b})"
        return f"(ite {_smt_bool(expr)} #b1 #b0)"
    if isinstance(expr, SCond):
        cond = _smt_bool_nonzero(expr.cond)
        return (f"(ite {cond} {_smt_term(expr.then, expr.width)}"
                f" {_smt_term(expr.other, expr.width)})")
    if isinstance(expr, SConcat):
        if len(expr.parts) == 1:
            return _smt_term_natural(expr.parts[0])
        parts = " ".join(_smt_term_natural(p) for p in expr.parts)
        return f"(concat {parts})"
    raise TypeError(f"unknown symbolic node {expr!r}")


def _smt_bool_nonzero(expr: SymExpr) -> str:
    zero = _smt_const(expr.width, 0)
    return f"(distinct {_smt_term_natural(expr)} {zero})"


def _smt_bool(expr: SymExpr) -> str:
    if isinstance(expr, SBinary):
        op = expr.op
        wide = max(expr.lhs.width, expr.rhs.width)
        a = lambda: _smt_term(expr.lhs, wide)  # noqa: E731
        b = lambda: _smt_term(expr.rhs, wide)  # noqa: E731
        if op == "==":
            return f"(= {a()} {b()})"
        if op == "!=":
            return f"(distinct {a()} {b()})"
        if op == "<":
            return f"(bvult {a()} {b()})"
        if op == "<=":
            return f"(bvule {a()} {b()})"
        if op == ">":
            return f"(bvugt {a()} {b()})"
        if op == ">=":
            return f"(bvuge {a()} {b()})"
        if op == "&&":
            return f"(and {_smt_bool_nonzero(expr.lhs)} {_smt_bool_nonzero(expr.rhs)})"
        if op == "||":
            return f"(or {_smt_bool_nonzero(expr.lhs)} {_smt_bool_nonzero(expr.rhs)})"
    if isinstance(expr, SUnary) and expr.op == "!":
        return f"(not {_smt_bool_nonzero(expr.operand)})"
    return _smt_bool_nonzero(expr)


def emit_smtlib(constraints: ConstraintSet) -> str:
    variables = _check_widths(constraints)
    lines = ["(set-logic QF_BV)"]
    for v in variables:
        lines.append(f"(declare-const {v.name} (_ BitVec {v.width}))")
    for c in constraints.constraints:
        comment = f" ; {c.provenance}" + (f" ({c.note})" if c.note else "")
        lines.append(f"(assert {_smt_bool(c.pred)}){comment}")
    lines.append("(check-sat)")
    lines.append("(get-model)")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Optional external solver process


_MODEL_RE = re.compile(
    r"\(define-fun\s+(\w+)\s*\(\)\s*\(_\s*BitVec\s*\d+\s*\)\s*(#x[0-9a-fA-F]+|#b[01]+)")


def solve_external(constraints: ConstraintSet, command: list[str],
                   timeout_s: float = 30.0) -> SolveResult:
    """Run a user-configured SMT solver on the emitted script."""
    script = emit_smtlib(constraints)
    proc = subprocess.run(command, input=script, capture_output=True,
                          text=True, timeout=timeout_s)
    out = proc.stdout.strip().splitlines()
    if not out:
        return SolveResult("unknown", reason="external solver produced no output")
    verdict = out[0].strip()
    if verdict == "unsat":
        return SolveResult("unsat", reason="external solver")
    if verdict == "unknown":
        return SolveResult("unknown", reason="external solver")
    if verdict != "sat":
        return SolveResult("unknown",
                           reason=f"unrecognized solver output {verdict!r}")
    assignment: dict = {}
    for name, lit in _MODEL_RE.findall(proc.stdout):
        value = int(lit[2:], 16) if lit.startswith("#x") else int(lit[2:], 2)
        assignment[name] = value
    for v in constraints.variables():
        assignment.setdefault(v.name, 0)
    if not constraints.satisfied_by(assignment):
        return SolveResult("unknown", reason="external model failed re-check")
    return SolveResult("sat", assignment=assignment)
