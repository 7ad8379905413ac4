"""Two-state unsigned bit-vector semantics shared by the simulator,
the symbolic engine, and the built-in solver.

All values are plain non-negative ints; every operation masks its result
to the stated width, so subtraction wraps (8-bit 0 - 1 = 0xFF).
"""

from __future__ import annotations


def mask(value: int, width: int) -> int:
    return value & ((1 << width) - 1)


def truthy(value: int) -> bool:
    return value != 0


def apply_unary(op: str, value: int, width: int) -> int:
    if op == "~":
        return mask(~value, width)
    if op == "-":
        return mask(-value, width)
    if op == "!":
        return 0 if value else 1
    raise ValueError(f"unknown unary operator {op!r}")


def apply_binary(op: str, lhs: int, rhs: int, result_width: int) -> int:
    """Operands are unsigned ints already masked to their own widths."""
    if op == "+":
        return mask(lhs + rhs, result_width)
    if op == "-":
        return mask(lhs - rhs, result_width)
    if op == "&":
        return mask(lhs & rhs, result_width)
    if op == "|":
        return mask(lhs | rhs, result_width)
    if op == "^":
        return mask(lhs ^ rhs, result_width)
    if op == "==":
        return 1 if lhs == rhs else 0
    if op == "!=":
        return 1 if lhs != rhs else 0
    if op == "<":
        return 1 if lhs < rhs else 0
    if op == "<=":
        return 1 if lhs <= rhs else 0
    if op == ">":
        return 1 if lhs > rhs else 0
    if op == ">=":
        return 1 if lhs >= rhs else 0
    if op == "<<":
        return 0 if rhs >= result_width else mask(lhs << rhs, result_width)
    if op == ">>":
        return 0 if rhs >= 64 else mask(lhs >> rhs, result_width)
    if op == "&&":
        return 1 if (lhs and rhs) else 0
    if op == "||":
        return 1 if (lhs or rhs) else 0
    raise ValueError(f"unknown binary operator {op!r}")
