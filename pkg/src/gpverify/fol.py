"""Syntactic operations on formulas: substitution, simplification and
canonical forms used to compare formulas structurally."""
from __future__ import annotations

import itertools
from typing import Mapping, Union

from . import formula as F
from . import values as V
from .errors import KindMismatch
from .frontend import print_formula, print_term

Key = Union[str, F.Term]


# -- substitution -----------------------------------------------------------

def _keyvars(k: F.Term) -> set[str]:
    return set(F.free_vars(k))


def substitute(c: F.Node, mapping: Mapping[Key, F.Term] | Key, b: F.Term | None = None):
    """Replace variables, or the patterns ``s(x)``/``t(x)``, by terms.

    ``substitute(c, "x", NodeId("1"))`` and ``substitute(c, {var: term})``
    are both accepted.  String keys name variables of any sort.  Bound
    variables are renamed when a replacement would be captured; binders of
    a key's variable shadow that key.
    """
    if not isinstance(mapping, Mapping):
        mapping = {mapping: b}
    resolved: dict = {}
    names: dict[str, F.Term] = {}
    for k, v in mapping.items():
        if isinstance(k, str):
            names[k] = v
        else:
            ks, vs = F.term_sort(k), F.term_sort(v)
            if ks != vs:
                raise KindMismatch(f"cannot replace {print_term(k)} by {print_term(v)}")
            resolved[k] = v
    for name, v in names.items():
        sort = _sort_of_free(c, name)
        if sort is not None:
            if sort != F.term_sort(v):
                raise KindMismatch(f"cannot replace {sort} variable {name} by {print_term(v)}")
            resolved[F.Var(name, sort)] = v
    if not resolved:
        return c
    return _subst(c, resolved)


def _sort_of_free(c, name):
    return F.free_vars(c).get(name)


def _subst(n, m: dict):
    if not m:
        return n
    if isinstance(n, F.Term) and n in m:
        return m[n]
    if isinstance(n, F.Exists):
        m2 = {k: v for k, v in m.items() if n.var not in _keyvars(k)}
        if not m2:
            return n
        incoming = set()
        for v in m2.values():
            incoming |= set(F.free_vars(v))
        if n.var in incoming:
            used = F.all_names(n) | incoming
            for k in m2:
                used |= _keyvars(k)
            new = F.fresh_name(n.var, used)
            body = _subst(n.body, {F.Var(n.var, n.sort): F.Var(new, n.sort)})
            return F.Exists(n.sort, new, _subst(body, m2))
        return F.Exists(n.sort, n.var, _subst(n.body, m2))
    return F.map_children(n, lambda ch: _subst(ch, m))


def rename_free(c: F.Node, renaming: Mapping[str, str]) -> F.Node:
    """Rename free variables (keeping sorts)."""
    fv = F.free_vars(c)
    m = {F.Var(k, fv[k]): F.Var(v, fv[k]) for k, v in renaming.items() if k in fv}
    return _subst(c, m) if m else c


# -- ground evaluation --------------------------------------------------------

def const_value(t: F.Term):
    """Value of a ground label or mark term, else None."""
    try:
        return _cv(t)
    except (V.Undefined, _NotGround):
        return None


class _NotGround(Exception):
    pass


def _cv(t):
    if isinstance(t, F.IntLit):
        return (t.value,)
    if isinstance(t, F.StrLit):
        return (t.value,)
    if isinstance(t, F.EmptyList):
        return ()
    if isinstance(t, F.MarkConst):
        return t.name
    if isinstance(t, F.Concat):
        out: tuple = ()
        for i in t.items:
            out += _cv(i)
        return out
    if isinstance(t, F.StrCat):
        return ("".join(V.str_of(_cv(i)) for i in t.items),)
    if isinstance(t, F.Arith):
        return V.arith(t.op, _cv(t.left), _cv(t.right))
    if isinstance(t, F.Length):
        return (len(_cv(t.arg)),)
    raise _NotGround()


def _value_term(v: tuple) -> F.Term:
    if not v:
        return F.EmptyList()
    items = [F.IntLit(a) if isinstance(a, int) else F.StrLit(a) for a in v]
    return items[0] if len(items) == 1 else F.Concat(tuple(items))


def _has_arith(t) -> bool:
    return F.contains(t, lambda x: isinstance(x, F.Arith))


def _fold_term(t: F.Term) -> F.Term:
    if isinstance(t, (F.Arith, F.Length, F.StrCat)):
        t = F.map_children(t, _fold_term)
        v = const_value(t)
        if v is not None and not isinstance(v, str):
            return _value_term(v)
        return t
    if isinstance(t, F.Concat):
        return F.map_children(t, _fold_term)
    return t


def _ground_cmp(c: F.Cmp):
    l, r = c.left, c.right
    if isinstance(l, (F.NodeId, F.EdgeId)) and isinstance(r, (F.NodeId, F.EdgeId)):
        same = l == r
        return same if c.op == "=" else not same
    if l == r and c.op in ("=", "!=") and not _has_arith(l):
        return c.op == "="
    lv, rv = const_value(l), const_value(r)
    if lv is None or rv is None:
        return None
    if isinstance(lv, str) or isinstance(rv, str):
        if not (isinstance(lv, str) and isinstance(rv, str)):
            return None
        same = V.mark_equal(lv, rv)
        return same if c.op == "=" else not same
    try:
        return V.compare(c.op, lv, rv)
    except V.Undefined:
        return False


# -- simplification -----------------------------------------------------------

_FLIP = {"=": "!=", "!=": "="}


def simplify(c: F.Formula) -> F.Formula:
    """Boolean simplification with negations pushed down to atoms and
    quantifiers; ground atoms are evaluated."""
    if isinstance(c, F.Bool):
        return c
    if isinstance(c, F.Not):
        return _negate(simplify(c.arg))
    if isinstance(c, F.And):
        out = []
        for a in c.args:
            a = simplify(a)
            if a == F.FALSE:
                return F.FALSE
            if a == F.TRUE:
                continue
            out.extend(a.args if isinstance(a, F.And) else (a,))
        return F.conj(*dict.fromkeys(out))
    if isinstance(c, F.Or):
        out = []
        for a in c.args:
            a = simplify(a)
            if a == F.TRUE:
                return F.TRUE
            if a == F.FALSE:
                continue
            out.extend(a.args if isinstance(a, F.Or) else (a,))
        return F.disj(*dict.fromkeys(out))
    if isinstance(c, F.Exists):
        body = simplify(c.body)
        if body == F.FALSE:
            return F.FALSE
        if body == F.TRUE and c.sort == F.LABEL:
            return F.TRUE
        return F.Exists(c.sort, c.var, body)
    if isinstance(c, F.Cmp):
        c = F.Cmp(c.op, _fold_term(c.left), _fold_term(c.right))
        g = _ground_cmp(c)
        return c if g is None else F.Bool(g)
    if isinstance(c, F.TypePred):
        arg = _fold_term(c.arg)
        v = const_value(arg)
        if v is not None and not isinstance(v, str):
            return F.Bool(V.has_type(c.kind, v))
        return F.TypePred(c.kind, arg)
    if isinstance(c, F.EdgePred):
        return F.map_children(c, lambda t: _fold_term(t) if isinstance(t, F.Term) else t)
    return c


def _negate(a: F.Formula) -> F.Formula:
    """Negation of an already simplified formula."""
    if isinstance(a, F.Bool):
        return F.Bool(not a.value)
    if isinstance(a, F.Not):
        return a.arg
    if isinstance(a, F.Or):
        return F.conj(*(_negate(x) for x in a.args))
    if isinstance(a, F.And):
        return F.disj(*(_negate(x) for x in a.args))
    if isinstance(a, F.Cmp) and a.op in _FLIP and not _has_arith(a.left) \
            and not _has_arith(a.right):
        return F.Cmp(_FLIP[a.op], a.left, a.right)
    return F.Not(a)


# -- canonical forms ----------------------------------------------------------

_MIRROR = {">": "<", ">=": "<="}


def miniscope(c: F.Formula) -> F.Formula:
    """Move conjuncts that do not mention a quantified variable out of its
    scope, distributing quantifiers over disjunctions first."""
    if isinstance(c, F.Exists):
        body = miniscope(c.body)
        if isinstance(body, F.Or):
            return F.disj(*(miniscope(F.Exists(c.sort, c.var, a)) for a in body.args))
        if body != F.TRUE:
            args = body.args if isinstance(body, F.And) else (body,)
            dep = [a for a in args if c.var in F.free_vars(a)]
            ind = [a for a in args if c.var not in F.free_vars(a)]
            if ind:
                # with no dependent conjunct left, keep the non-emptiness
                # claim as exists x (true); label domains are never empty
                rest = F.Exists(c.sort, c.var, F.conj(*dep)) if dep or c.sort != F.LABEL \
                    else F.TRUE
                return F.conj(*ind, rest)
        return F.Exists(c.sort, c.var, body)
    return F.map_children(c, lambda x: miniscope(x) if isinstance(x, F.Formula) else x)


def _rename_term(t: F.Term, ren: dict) -> F.Term:
    if isinstance(t, F.Var):
        return F.Var(ren[t.name], t.sort) if t.name in ren else t
    return F.map_children(t, lambda x: _rename_term(x, ren))


def _key(x) -> str:
    return print_formula(x) if isinstance(x, F.Formula) else print_term(x)


def _canon(c: F.Formula, depth: int, ren: dict) -> F.Formula:
    if isinstance(c, F.Exists):
        chain, body = [c.var], c.body
        while isinstance(body, F.Exists) and body.sort == c.sort:
            chain.append(body.var)
            body = body.body
        perms = itertools.permutations(chain) if len(chain) <= 5 else [chain]
        best = None
        for perm in perms:
            r2 = dict(ren)
            names = []
            for i, v in enumerate(perm):
                names.append(f"_{depth + i}")
                r2[v] = names[-1]
            cand = F.exists_many(c.sort, names, _canon(body, depth + len(chain), r2))
            k = _key(cand)
            if best is None or k < best[0]:
                best = (k, cand)
        return best[1]
    if isinstance(c, (F.And, F.Or)):
        args: dict[str, F.Formula] = {}
        for a in c.args:
            a = _canon(a, depth, ren)
            for x in (a.args if type(a) is type(c) else (a,)):
                args.setdefault(_key(x), x)
        items = [args[k] for k in sorted(args)]
        return (F.conj if isinstance(c, F.And) else F.disj)(*items)
    if isinstance(c, F.Not):
        return F.Not(_canon(c.arg, depth, ren))
    if isinstance(c, F.Cmp):
        l, r = _rename_term(c.left, ren), _rename_term(c.right, ren)
        op = c.op
        if op in _MIRROR:
            op, l, r = _MIRROR[op], r, l
        if op in ("=", "!=") and _key(r) < _key(l):
            l, r = r, l
        return F.Cmp(op, l, r)
    return F.map_children(c, lambda t: _rename_term(t, ren))


def canonical(c: F.Formula) -> F.Formula:
    """A normal form in which formulas differing only by ordering of
    conjuncts/disjuncts, orientation of symmetric comparisons, bound-variable
    names, order of adjacent quantifiers or quantifier scope are identical."""
    prev = None
    cur = c
    while cur != prev:
        prev = cur
        cur = _canon(miniscope(simplify(cur)), 0, {})
    return cur


def equal_canonical(a: F.Formula, b: F.Formula) -> bool:
    return canonical(a) == canonical(b)


def _debruijn(c, depth: int, ren: dict):
    if isinstance(c, F.Exists):
        r2 = dict(ren)
        r2[c.var] = f"_{depth}"
        return F.Exists(c.sort, r2[c.var], _debruijn(c.body, depth + 1, r2))
    if isinstance(c, F.Formula):
        return F.map_children(c, lambda x: _debruijn(x, depth, ren))
    return _rename_term(c, ren)


def alpha_equivalent(a: F.Formula, b: F.Formula) -> bool:
    """Equal up to consistent renaming of bound variables."""
    return _debruijn(a, 0, {}) == _debruijn(b, 0, {})
