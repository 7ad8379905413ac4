"""A tiny reference evaluator for the emitted SMT-LIB2 (QF_BV) scripts.

Stands in for an external solver in tests: it parses the script text
independently of the emitter, enumerates all assignments to the declared
bit-vector constants (intended for scripts with at most two 8-bit
variables), and reports satisfiability.
"""

from __future__ import annotations

import itertools
import re

_DECL_RE = re.compile(r"\(declare-const\s+(\w+)\s+\(_\s*BitVec\s+(\d+)\s*\)\)")


def _tokenize(text: str) -> list[str]:
    text = re.sub(r";[^\n]*", "", text)
    return text.replace("(", " ( ").replace(")", " ) ").split()


def _parse(tokens: list[str], pos: int = 0):
    if tokens[pos] != "(":
        return tokens[pos], pos + 1
    items = []
    pos += 1
    while tokens[pos] != ")":
        node, pos = _parse(tokens, pos)
        items.append(node)
    return items, pos + 1


def _parse_all(text: str) -> list:
    tokens = _tokenize(text)
    nodes = []
    pos = 0
    while pos < len(tokens):
        node, pos = _parse(tokens, pos)
        nodes.append(node)
    return nodes


def _mask(value: int, width: int) -> int:
    return value & ((1 << width) - 1)


def _eval(node, env, widths):
    """Returns (value, width) for terms, or a bool for boolean nodes."""
    if isinstance(node, str):
        if node.startswith("#x"):
            return int(node[2:], 16), 4 * len(node[2:])
        if node.startswith("#b"):
            return int(node[2:], 2), len(node[2:])
        if node == "true":
            return True
        if node == "false":
            return False
        return env[node], widths[node]

    head = node[0]
    if isinstance(head, list):  # ((_ zero_extend k) t) / ((_ extract h l) t)
        op = head[1]
        if op == "zero_extend":
            value, width = _eval(node[1], env, widths)
            return value, width + int(head[2])
        if op == "extract":
            value, width = _eval(node[1], env, widths)
            hi, lo = int(head[2]), int(head[3])
            return _mask(value >> lo, hi - lo + 1), hi - lo + 1
        raise ValueError(f"unsupported indexed op {op}")

    if head in ("and", "or", "not", "=>"):
        args = [_eval(a, env, widths) for a in node[1:]]
        if head == "and":
            return all(args)
        if head == "or":
            return any(args)
        if head == "not":
            return not args[0]
        return (not args[0]) or args[1]
    if head in ("=", "distinct"):
        (a, wa) = _eval(node[1], env, widths)
        (b, wb) = _eval(node[2], env, widths)
        assert wa == wb, f"width mismatch in {head}: {wa} vs {wb}"
        return (a == b) if head == "=" else (a != b)
    if head in ("bvult", "bvule", "bvugt", "bvuge"):
        (a, wa) = _eval(node[1], env, widths)
        (b, wb) = _eval(node[2], env, widths)
        assert wa == wb
        return {"bvult": a < b, "bvule": a <= b,
                "bvugt": a > b, "bvuge": a >= b}[head]
    if head == "ite":
        cond = _eval(node[1], env, widths)
        return _eval(node[2] if cond else node[3], env, widths)
    if head in ("bvadd", "bvsub", "bvand", "bvor", "bvxor", "bvshl", "bvlshr"):
        (a, wa) = _eval(node[1], env, widths)
        (b, wb) = _eval(node[2], env, widths)
        assert wa == wb
        if head == "bvadd":
            return _mask(a + b, wa), wa
        if head == "bvsub":
            return _mask(a - b, wa), wa
        if head == "bvand":
            return a & b, wa
        if head == "bvor":
            return a | b, wa
        if head == "bvxor":
            return a ^ b, wa
        if head == "bvshl":
            return (_mask(a << b, wa) if b < wa else 0), wa
        return (a >> b if b < wa else 0), wa
    if head == "bvnot":
        (a, wa) = _eval(node[1], env, widths)
        return _mask(~a, wa), wa
    if head == "bvneg":
        (a, wa) = _eval(node[1], env, widths)
        return _mask(-a, wa), wa
    if head == "concat":
        value, width = 0, 0
        for sub in node[1:]:
            v, w = _eval(sub, env, widths)
            value = (value << w) | v
            width += w
        return value, width
    raise ValueError(f"unsupported node {head!r}")


def check_script(script: str, limit: int = 1 << 20) -> bool:
    """True when some assignment satisfies every assert in the script."""
    widths = {name: int(width) for name, width in _DECL_RE.findall(script)}
    asserts = [node[1] for node in _parse_all(script)
               if isinstance(node, list) and node and node[0] == "assert"]
    names = sorted(widths)
    domain = 1
    for name in names:
        domain *= 1 << widths[name]
    if domain > limit:
        raise ValueError("script too large for the reference evaluator")
    for values in itertools.product(*(range(1 << widths[n]) for n in names)):
        env = dict(zip(names, values))
        if all(_eval(a, env, widths) for a in asserts):
            return True
    return False
