"""Terms and formulas of the first-order assertion language.

One AST serves three purposes: GP 2 label expressions in rule graphs,
rule-schema conditions, and first-order assertions (possibly with node and
edge identifiers embedded, i.e. conditions over a graph).

All nodes are frozen dataclasses, so formulas are hashable and compare
structurally.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

NODE_MARKS = ("none", "red", "green", "blue", "grey")
EDGE_MARKS = ("none", "red", "green", "blue", "dashed")
ALL_MARKS = ("none", "red", "green", "blue", "grey", "dashed", "any")

# sorts of first-order variables
NODE, EDGE, LABEL = "node", "edge", "label"
TYPE_PREDICATES = ("int", "char", "string", "atom")
COMPARISONS = ("=", "!=", "<", "<=", ">", ">=")


class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Term):
    name: str
    sort: str = LABEL


@dataclass(frozen=True)
class NodeId(Term):
    """A node identifier of a specific graph used as a constant."""
    name: str


@dataclass(frozen=True)
class EdgeId(Term):
    name: str


@dataclass(frozen=True)
class IntLit(Term):
    value: int


@dataclass(frozen=True)
class StrLit(Term):
    value: str


@dataclass(frozen=True)
class EmptyList(Term):
    pass


@dataclass(frozen=True)
class Concat(Term):
    """List concatenation ``a : b : ...``."""
    items: tuple


@dataclass(frozen=True)
class StrCat(Term):
    """String concatenation ``a . b . ...``."""
    items: tuple


@dataclass(frozen=True)
class Arith(Term):
    op: str
    left: Term
    right: Term


@dataclass(frozen=True)
class Degree(Term):
    which: str  # "indeg" | "outdeg"
    node: Term


@dataclass(frozen=True)
class Length(Term):
    arg: Term


@dataclass(frozen=True)
class LabelOf(Term):
    sort: str  # NODE | EDGE
    arg: Term


@dataclass(frozen=True)
class MarkOf(Term):
    sort: str
    arg: Term


@dataclass(frozen=True)
class MarkConst(Term):
    name: str


@dataclass(frozen=True)
class Endpoint(Term):
    which: str  # "s" | "t"
    edge: Term


@dataclass(frozen=True)
class Aux(Term):
    """``incon(v)`` / ``outcon(v)``: edges at ``v`` outside the match image."""
    kind: str
    node: Term


class Formula:
    __slots__ = ()

    def __and__(self, other):
        return conj(self, other)

    def __or__(self, other):
        return disj(self, other)

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True)
class Bool(Formula):
    value: bool


TRUE = Bool(True)
FALSE = Bool(False)


@dataclass(frozen=True)
class TypePred(Formula):
    kind: str
    arg: Term


@dataclass(frozen=True)
class Root(Formula):
    node: Term


@dataclass(frozen=True)
class Cmp(Formula):
    op: str
    left: Term
    right: Term


@dataclass(frozen=True)
class EdgePred(Formula):
    """``edge(v, w[, label][, mark])``."""
    src: Term
    tgt: Term
    label: Term | None = None
    mark: Term | None = None


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    args: tuple


@dataclass(frozen=True)
class Or(Formula):
    args: tuple


@dataclass(frozen=True)
class Exists(Formula):
    sort: str  # NODE | EDGE | LABEL
    var: str
    body: Formula


Node = Union[Term, Formula]


def concat(*items: Term) -> Term:
    flat: list[Term] = []
    for it in items:
        if isinstance(it, Concat):
            flat.extend(it.items)
        else:
            flat.append(it)
    if len(flat) == 1:
        return flat[0]
    return Concat(tuple(flat))


def strcat(*items: Term) -> Term:
    flat: list[Term] = []
    for it in items:
        if isinstance(it, StrCat):
            flat.extend(it.items)
        else:
            flat.append(it)
    if len(flat) == 1:
        return flat[0]
    return StrCat(tuple(flat))


def conj(*args: Formula) -> Formula:
    """n-ary conjunction, flattening nested conjunctions."""
    flat: list[Formula] = []
    for a in args:
        if isinstance(a, And):
            flat.extend(a.args)
        else:
            flat.append(a)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat))


def disj(*args: Formula) -> Formula:
    flat: list[Formula] = []
    for a in args:
        if isinstance(a, Or):
            flat.extend(a.args)
        else:
            flat.append(a)
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return Or(tuple(flat))


def neg(f: Formula) -> Formula:
    return Not(f)


def forall(sort: str, var: str, body: Formula) -> Formula:
    return Not(Exists(sort, var, Not(body)))


def exists_many(sort: str, names, body: Formula) -> Formula:
    for name in reversed(list(names)):
        body = Exists(sort, name, body)
    return body


def eq(a: Term, b: Term) -> Cmp:
    return Cmp("=", a, b)


def ne(a: Term, b: Term) -> Cmp:
    return Cmp("!=", a, b)


MARK = "mark"


def term_sort(t: Term) -> str:
    """NODE, EDGE, LABEL or MARK."""
    if isinstance(t, Var):
        return t.sort
    if isinstance(t, (NodeId, Endpoint)):
        return NODE
    if isinstance(t, EdgeId):
        return EDGE
    if isinstance(t, (MarkOf, MarkConst)):
        return MARK
    return LABEL


# -- generic traversal -------------------------------------------------------

_TERM_CHILDREN = {
    Var: (), NodeId: (), EdgeId: (), IntLit: (), StrLit: (), EmptyList: (),
    MarkConst: (),
    Arith: ("left", "right"), Degree: ("node",), Length: ("arg",),
    LabelOf: ("arg",), MarkOf: ("arg",), Endpoint: ("edge",), Aux: ("node",),
}


def children(n: Node) -> Iterator[Node]:
    if isinstance(n, (Concat, StrCat)):
        yield from n.items
    elif isinstance(n, (And, Or)):
        yield from n.args
    elif isinstance(n, Not):
        yield n.arg
    elif isinstance(n, Exists):
        yield n.body
    elif isinstance(n, Cmp):
        yield n.left
        yield n.right
    elif isinstance(n, (TypePred,)):
        yield n.arg
    elif isinstance(n, Root):
        yield n.node
    elif isinstance(n, EdgePred):
        yield n.src
        yield n.tgt
        if n.label is not None:
            yield n.label
        if n.mark is not None:
            yield n.mark
    elif isinstance(n, Bool):
        return
    else:
        for attr in _TERM_CHILDREN[type(n)]:
            yield getattr(n, attr)


def map_children(n: Node, fn) -> Node:
    """Rebuild ``n`` with ``fn`` applied to each direct child."""
    if isinstance(n, Concat):
        return concat(*(fn(i) for i in n.items))
    if isinstance(n, StrCat):
        return strcat(*(fn(i) for i in n.items))
    if isinstance(n, And):
        return And(tuple(fn(a) for a in n.args))
    if isinstance(n, Or):
        return Or(tuple(fn(a) for a in n.args))
    if isinstance(n, Not):
        return Not(fn(n.arg))
    if isinstance(n, Exists):
        return Exists(n.sort, n.var, fn(n.body))
    if isinstance(n, Cmp):
        return Cmp(n.op, fn(n.left), fn(n.right))
    if isinstance(n, TypePred):
        return TypePred(n.kind, fn(n.arg))
    if isinstance(n, Root):
        return Root(fn(n.node))
    if isinstance(n, EdgePred):
        return EdgePred(fn(n.src), fn(n.tgt),
                        None if n.label is None else fn(n.label),
                        None if n.mark is None else fn(n.mark))
    if isinstance(n, Arith):
        return Arith(n.op, fn(n.left), fn(n.right))
    if isinstance(n, Degree):
        return Degree(n.which, fn(n.node))
    if isinstance(n, Length):
        return Length(fn(n.arg))
    if isinstance(n, LabelOf):
        return LabelOf(n.sort, fn(n.arg))
    if isinstance(n, MarkOf):
        return MarkOf(n.sort, fn(n.arg))
    if isinstance(n, Endpoint):
        return Endpoint(n.which, fn(n.edge))
    if isinstance(n, Aux):
        return Aux(n.kind, fn(n.node))
    return n


def walk(n: Node) -> Iterator[Node]:
    """Pre-order traversal, not respecting binders."""
    stack = [n]
    while stack:
        cur = stack.pop()
        yield cur
        stack.extend(reversed(list(children(cur))))


def free_vars(n: Node) -> dict[str, str]:
    """Free variables of ``n`` as ``{name: sort}``, in order of occurrence."""
    out: dict[str, str] = {}

    def go(x: Node, bound: frozenset):
        if isinstance(x, Var):
            if x.name not in bound and x.name not in out:
                out[x.name] = x.sort
            return
        if isinstance(x, Exists):
            go(x.body, bound | {x.var})
            return
        for c in children(x):
            go(c, bound)

    go(n, frozenset())
    return out


def all_names(n: Node) -> set[str]:
    """Every variable name occurring free or bound in ``n``."""
    names = set()
    for x in walk(n):
        if isinstance(x, Var):
            names.add(x.name)
        elif isinstance(x, Exists):
            names.add(x.var)
    return names


def constants(n: Node) -> tuple[list[str], list[str]]:
    """Node and edge identifiers embedded in ``n``, in order of occurrence."""
    nodes: dict[str, None] = {}
    edges: dict[str, None] = {}
    for x in walk(n):
        if isinstance(x, NodeId):
            nodes.setdefault(x.name)
        elif isinstance(x, EdgeId):
            edges.setdefault(x.name)
    return list(nodes), list(edges)


def contains(n: Node, pred) -> bool:
    return any(pred(x) for x in walk(n))


def is_closed(f: Formula) -> bool:
    return not free_vars(f)


def fresh_name(base: str, used) -> str:
    name = base
    while name in used:
        name += "'"
    return name
