"""Operations on host-graph label values (tuples of int/str atoms) and marks."""
from __future__ import annotations


class Undefined(Exception):
    """A term has no value (ill-typed operand, division by zero, ...)."""


def int_of(v: tuple) -> int:
    if len(v) == 1 and isinstance(v[0], int) and not isinstance(v[0], bool):
        return v[0]
    raise Undefined(f"{v!r} is not an integer")


def str_of(v: tuple) -> str:
    if len(v) == 1 and isinstance(v[0], str):
        return v[0]
    raise Undefined(f"{v!r} is not a string")


def gp_div(a: int, b: int) -> int:
    """Integer division truncating towards zero."""
    if b == 0:
        raise Undefined("division by zero")
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def arith(op: str, a: tuple, b: tuple) -> tuple:
    x, y = int_of(a), int_of(b)
    if op == "+":
        return (x + y,)
    if op == "-":
        return (x - y,)
    if op == "*":
        return (x * y,)
    return (gp_div(x, y),)


def compare(op: str, a: tuple, b: tuple) -> bool:
    if op == "=":
        return a == b
    if op == "!=":
        return a != b
    x, y = int_of(a), int_of(b)
    return {"<": x < y, "<=": x <= y, ">": x > y, ">=": x >= y}[op]


def mark_equal(a: str, b: str) -> bool:
    """Mark equality where ``any`` stands for every mark other than none."""
    if a == "any":
        return b != "none"
    if b == "any":
        return a != "none"
    return a == b


def has_type(kind: str, v: tuple) -> bool:
    if len(v) != 1:
        return kind == "list"
    a = v[0]
    if kind == "int":
        return isinstance(a, int) and not isinstance(a, bool)
    if kind == "string":
        return isinstance(a, str)
    if kind == "char":
        return isinstance(a, str) and len(a) == 1
    return kind in ("atom", "list")
