"""Satisfaction of formulas on host graphs.

Formulas are compiled once into Python closures and can then be evaluated
on many graphs.  Node and edge variables range over the graph; label
variables range over a bounded :class:`LabelUniverse` extended with the
labels occurring in the graph, except where a conjunct pins the variable
down (``x = t`` or ``t1 = t2`` linear in ``x``), in which case the unique
candidate value is computed directly.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping, Optional

from . import formula as F
from . import values as V
from .errors import ResidualAuxTerm, UnboundVariable
from .graph import Graph

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LabelUniverse:
    int_range: tuple = (-2, 3)
    chars: tuple = ("a", "b")
    max_string_len: int = 1
    max_list_len: int = 2

    def __post_init__(self):
        lo, hi = self.int_range
        if lo > hi or self.max_string_len < 0 or self.max_list_len < 0:
            raise ValueError("label universe bounds must be finite and non-negative")

    def ints(self) -> list[int]:
        return list(range(self.int_range[0], self.int_range[1] + 1))

    def strings(self) -> list[str]:
        out = []
        for n in range(self.max_string_len + 1):
            out.extend("".join(p) for p in itertools.product(self.chars, repeat=n))
        return out

    def atoms(self) -> list:
        return self.ints() + self.strings()

    def lists(self) -> list[tuple]:
        return _lists(self)


@lru_cache(maxsize=32)
def _lists(u: LabelUniverse) -> list[tuple]:
    atoms = u.atoms()
    out = []
    for n in range(u.max_list_len + 1):
        out.extend(itertools.product(atoms, repeat=n))
    return out


DEFAULT_UNIVERSE = LabelUniverse()


class GraphCtx:
    """Pre-computed lookup tables for evaluating many formulas on one graph."""
    __slots__ = ("graph", "nodes", "edges", "nlabel", "nmark", "nroot", "elabel",
                 "emark", "src", "tgt", "indeg", "outdeg", "between", "universe",
                 "_domains")

    def __init__(self, g: Graph, universe: LabelUniverse = DEFAULT_UNIVERSE):
        self.graph = g
        self.universe = universe
        self.nodes = list(g.nodes)
        self.edges = list(g.edges)
        self.nlabel = {v: n.label for v, n in g.nodes.items()}
        self.nmark = {v: n.mark for v, n in g.nodes.items()}
        self.nroot = {v: bool(n.root) for v, n in g.nodes.items()}
        self.elabel = {k: e.label for k, e in g.edges.items()}
        self.emark = {k: e.mark for k, e in g.edges.items()}
        self.src = {k: e.src for k, e in g.edges.items()}
        self.tgt = {k: e.tgt for k, e in g.edges.items()}
        self.indeg = dict.fromkeys(g.nodes, 0)
        self.outdeg = dict.fromkeys(g.nodes, 0)
        self.between: dict = {}
        for k, e in g.edges.items():
            self.indeg[e.tgt] += 1
            self.outdeg[e.src] += 1
            self.between.setdefault((e.src, e.tgt), []).append(k)
        self._domains: dict = {}

    def label_domain(self, kind: Optional[str]) -> list[tuple]:
        """Candidate values for a label variable, optionally restricted by a
        type predicate."""
        if kind in self._domains:
            return self._domains[kind]
        u = self.universe
        seen = dict.fromkeys(u.lists())
        for lab in itertools.chain(self.nlabel.values(), self.elabel.values()):
            seen.setdefault(lab)
            for a in lab:
                seen.setdefault((a,))
        dom = list(seen)
        if kind is not None:
            dom = [v for v in dom if V.has_type(kind, v)]
        self._domains[kind] = dom
        return dom


Env = dict
TermFn = Callable[[GraphCtx, Env], object]
FormulaFn = Callable[[GraphCtx, Env], bool]


# -- terms ------------------------------------------------------------------

def _undef(msg):
    raise V.Undefined(msg)


def compile_term(t: F.Term) -> TermFn:
    if isinstance(t, F.Var):
        name = t.name

        def var(ctx, env):
            try:
                return env[name]
            except KeyError:
                raise UnboundVariable(f"variable {name!r} has no value") from None
        return var
    if isinstance(t, (F.NodeId, F.EdgeId)):
        ident = t.name
        return lambda ctx, env: ident
    if isinstance(t, F.IntLit):
        val = (t.value,)
        return lambda ctx, env: val
    if isinstance(t, F.StrLit):
        sval = (t.value,)
        return lambda ctx, env: sval
    if isinstance(t, F.EmptyList):
        return lambda ctx, env: ()
    if isinstance(t, F.MarkConst):
        mark = t.name
        return lambda ctx, env: mark
    if isinstance(t, F.Concat):
        fns = [compile_term(i) for i in t.items]

        def cat(ctx, env):
            out: tuple = ()
            for f in fns:
                out += f(ctx, env)
            return out
        return cat
    if isinstance(t, F.StrCat):
        fns = [compile_term(i) for i in t.items]
        return lambda ctx, env: ("".join(V.str_of(f(ctx, env)) for f in fns),)
    if isinstance(t, F.Arith):
        op, lf, rf = t.op, compile_term(t.left), compile_term(t.right)
        return lambda ctx, env: V.arith(op, lf(ctx, env), rf(ctx, env))
    if isinstance(t, F.Degree):
        nf = compile_term(t.node)
        if t.which == "indeg":
            return lambda ctx, env: (_lookup(ctx.indeg, nf(ctx, env)),)
        return lambda ctx, env: (_lookup(ctx.outdeg, nf(ctx, env)),)
    if isinstance(t, F.Length):
        af = compile_term(t.arg)
        return lambda ctx, env: (len(af(ctx, env)),)
    if isinstance(t, F.LabelOf):
        af = compile_term(t.arg)
        table = "nlabel" if t.sort == F.NODE else "elabel"
        return lambda ctx, env: _lookup(getattr(ctx, table), af(ctx, env))
    if isinstance(t, F.MarkOf):
        af = compile_term(t.arg)
        table = "nmark" if t.sort == F.NODE else "emark"
        return lambda ctx, env: _lookup(getattr(ctx, table), af(ctx, env))
    if isinstance(t, F.Endpoint):
        af = compile_term(t.edge)
        table = "src" if t.which == "s" else "tgt"
        return lambda ctx, env: _lookup(getattr(ctx, table), af(ctx, env))
    if isinstance(t, F.Aux):
        raise ResidualAuxTerm(f"{t.kind} term reached evaluation")
    raise TypeError(f"not a term: {t!r}")


def _lookup(table, key):
    try:
        return table[key]
    except KeyError:
        raise V.Undefined(f"{key!r} is not an item of the graph") from None


# -- formulas ---------------------------------------------------------------

def _guard(fn: FormulaFn, what: F.Formula) -> FormulaFn:
    """Ill-defined atomic formulas are false; the first occurrence is logged."""
    def guarded(ctx, env):
        try:
            return fn(ctx, env)
        except V.Undefined as exc:
            log.debug("atomic formula treated as false: %s", exc)
            return False
    return guarded


def compile_formula(f: F.Formula) -> FormulaFn:
    """Compile ``f`` to ``fn(ctx, env) -> bool``."""
    if isinstance(f, F.Bool):
        val = f.value
        return lambda ctx, env: val
    if isinstance(f, F.Not):
        inner = compile_formula(f.arg)
        return lambda ctx, env: not inner(ctx, env)
    if isinstance(f, F.And):
        fns = [compile_formula(a) for a in f.args]
        return lambda ctx, env: all(fn(ctx, env) for fn in fns)
    if isinstance(f, F.Or):
        fns = [compile_formula(a) for a in f.args]
        return lambda ctx, env: any(fn(ctx, env) for fn in fns)
    if isinstance(f, F.Exists):
        return _compile_exists(f)
    if isinstance(f, F.Cmp):
        lf, rf, op = compile_term(f.left), compile_term(f.right), f.op
        if F.term_sort(f.left) == F.MARK:
            if op == "=":
                return _guard(lambda ctx, env: V.mark_equal(lf(ctx, env), rf(ctx, env)), f)
            return _guard(lambda ctx, env: not V.mark_equal(lf(ctx, env), rf(ctx, env)), f)
        if op == "=":
            return _guard(lambda ctx, env: lf(ctx, env) == rf(ctx, env), f)
        if op == "!=":
            return _guard(lambda ctx, env: lf(ctx, env) != rf(ctx, env), f)
        return _guard(lambda ctx, env: V.compare(op, lf(ctx, env), rf(ctx, env)), f)
    if isinstance(f, F.TypePred):
        af, kind = compile_term(f.arg), f.kind
        return _guard(lambda ctx, env: V.has_type(kind, af(ctx, env)), f)
    if isinstance(f, F.Root):
        nf = compile_term(f.node)
        return _guard(lambda ctx, env: _lookup(ctx.nroot, nf(ctx, env)), f)
    if isinstance(f, F.EdgePred):
        return _guard(_compile_edge_pred(f), f)
    raise TypeError(f"not a formula: {f!r}")


def _compile_edge_pred(f: F.EdgePred) -> FormulaFn:
    sf, tf = compile_term(f.src), compile_term(f.tgt)
    lf = compile_term(f.label) if f.label is not None else None
    mf = compile_term(f.mark) if f.mark is not None else None

    def edge_pred(ctx, env):
        s, t = sf(ctx, env), tf(ctx, env)
        if s not in ctx.nlabel or t not in ctx.nlabel:
            raise V.Undefined("edge predicate on a non-node")
        lab = lf(ctx, env) if lf else None
        mark = mf(ctx, env) if mf else None
        for k in ctx.between.get((s, t), ()):
            if lab is not None and ctx.elabel[k] != lab:
                continue
            if mark is not None and mark != "any" and ctx.emark[k] != mark:
                continue
            return True
        return False
    return edge_pred


def _conjuncts(f: F.Formula) -> list:
    return list(f.args) if isinstance(f, F.And) else [f]


def _compile_exists(f: F.Exists) -> FormulaFn:
    x = f.var
    args = _conjuncts(f.body)
    dep = [a for a in args if x in F.free_vars(a)]
    ind = [a for a in args if x not in F.free_vars(a)]
    if ind and dep:
        # conjuncts not mentioning x are checked once, outside the loop
        outer = compile_formula(F.conj(*ind))
        inner = _compile_exists(F.Exists(f.sort, x, F.conj(*dep)))
        return lambda ctx, env: outer(ctx, env) and inner(ctx, env)
    body = compile_formula(f.body)
    if f.sort in (F.NODE, F.EDGE):
        attr = "nodes" if f.sort == F.NODE else "edges"

        def exists_item(ctx, env):
            saved = env.get(x, _MISSING)
            try:
                for item in getattr(ctx, attr):
                    env[x] = item
                    if body(ctx, env):
                        return True
                return False
            finally:
                _restore(env, x, saved)
        return exists_item
    return _compile_exists_label(f, body)


_MISSING = object()


def _restore(env, x, saved):
    if saved is _MISSING:
        env.pop(x, None)
    else:
        env[x] = saved


def _witness_candidates(x: str, body: F.Formula):
    """Conjuncts fixing the value of ``x``, looking through directly nested
    label quantifiers whose variables the witness term must avoid."""
    inner: set[str] = set()
    cur = body
    found = []
    kind = None
    while True:
        for a in _conjuncts(cur):
            if isinstance(a, F.Cmp) and a.op == "=":
                for lhs, rhs in ((a.left, a.right), (a.right, a.left)):
                    if lhs == F.Var(x, F.LABEL):
                        fv = set(F.free_vars(rhs))
                        if x not in fv and not fv & inner:
                            found.append(("eq", rhs))
                    elif _linear_in(lhs, x) and not set(F.free_vars(lhs)) - {x} & inner:
                        fv = set(F.free_vars(rhs))
                        if x not in fv and not fv & inner:
                            found.append(("lin", lhs, rhs))
            if isinstance(a, F.TypePred) and a.arg == F.Var(x, F.LABEL) and not inner:
                kind = kind or a.kind
        if isinstance(cur, F.Exists) and cur.sort == F.LABEL:
            inner.add(cur.var)
            cur = cur.body
            continue
        return found, kind


def _linear_in(t: F.Term, x: str) -> bool:
    """``t`` is a +/- tree with exactly one occurrence of the variable x."""
    occurrences = sum(1 for n in F.walk(t) if isinstance(n, F.Var) and n.name == x)
    if occurrences != 1 or t == F.Var(x, F.LABEL):
        return False

    def path(n):
        if n == F.Var(x, F.LABEL):
            return True
        if isinstance(n, F.Arith) and n.op in "+-":
            return path(n.left) or path(n.right)
        return False
    return path(t)


def _solver(lhs: F.Term, rhs: F.Term, x: str):
    """Return fn(ctx, env) computing the unique x with lhs = rhs, or raising
    Undefined."""
    rf = compile_term(rhs)
    steps = []
    cur = lhs
    while cur != F.Var(x, F.LABEL):
        in_left = F.Var(x, F.LABEL) in set(F.walk(cur.left))
        other = compile_term(cur.right if in_left else cur.left)
        steps.append((cur.op, in_left, other))
        cur = cur.left if in_left else cur.right

    def solve(ctx, env):
        target = V.int_of(rf(ctx, env))
        for op, in_left, other in steps:
            o = V.int_of(other(ctx, env))
            if op == "+":
                target -= o
            elif in_left:  # (x ... ) - o = target
                target += o
            else:  # o - (x ...) = target
                target = o - target
        return (target,)
    return solve


def _compile_exists_label(f: F.Exists, body: FormulaFn) -> FormulaFn:
    x = f.var
    found, kind = _witness_candidates(x, f.body)
    if found:
        cand = found[0]
        wf = compile_term(cand[1]) if cand[0] == "eq" else _solver(cand[1], cand[2], x)

        def exists_witness(ctx, env):
            saved = env.get(x, _MISSING)
            try:
                try:
                    env[x] = _missing_guard(wf, ctx, env)
                except V.Undefined:
                    return False
                return body(ctx, env)
            finally:
                _restore(env, x, saved)
        return exists_witness

    def exists_label(ctx, env):
        saved = env.get(x, _MISSING)
        try:
            for val in ctx.label_domain(kind):
                env[x] = val
                if body(ctx, env):
                    return True
            return False
        finally:
            _restore(env, x, saved)
    return exists_label


def _missing_guard(wf, ctx, env):
    val = wf(ctx, env)
    if not isinstance(val, tuple):
        raise V.Undefined("witness is not a label")
    return val


# -- public API ---------------------------------------------------------------

def _cost(f: F.Formula) -> int:
    return sum(1 for x in F.walk(f) if isinstance(x, F.Exists))


def _cheap_first(f):
    if isinstance(f, (F.And, F.Or)):
        args = sorted((_cheap_first(a) for a in f.args), key=_cost)
        return type(f)(tuple(args))
    if isinstance(f, F.Formula):
        return F.map_children(f, _cheap_first)
    return f


def plan(f: F.Formula) -> F.Formula:
    """An equivalent formula that evaluates faster: conjuncts sit at the
    outermost quantifier binding their variables, and quantifier-free
    operands of and/or come first."""
    from .fol import miniscope
    return _cheap_first(miniscope(f))


@lru_cache(maxsize=4096)
def compiled(f: F.Formula) -> FormulaFn:
    return compile_formula(plan(f))


def evaluate(c: F.Formula, g: Graph | GraphCtx, universe: LabelUniverse = DEFAULT_UNIVERSE,
             alpha: Optional[Mapping[str, object]] = None) -> bool:
    """Truth value of ``c`` on ``g`` under the assignment ``alpha``.

    ``alpha`` maps free node/edge variables to identifiers and free label
    variables to label tuples.  Node and edge constants denote the graph
    items with those identifiers.
    """
    ctx = g if isinstance(g, GraphCtx) else GraphCtx(g, universe)
    env = dict(alpha or {})
    missing = [v for v in F.free_vars(c) if v not in env]
    if missing:
        raise UnboundVariable(f"free variables without values: {', '.join(missing)}")
    return compiled(c)(ctx, env)
