"""Strongest liberal postconditions of rule schemata.

The chain is precondition -> Split -> Val (with Dang) = Lift -> Adj ->
Shift -> Var -> Post.  Intermediate results are conditions over a rule
graph: node and edge identifiers of that graph occur as constants.

Bidirectional edges are handled by expanding a rule into its directed
variants: the postcondition of the rule is the disjunction of the variants'
postconditions, and the weakest precondition the conjunction.  Left-hand
``any`` marks are expanded into a disjunction over the concrete marks they
may have matched, so that the mark is known throughout one disjunct.
"""
from __future__ import annotations

import itertools
from dataclasses import replace
from typing import Iterable, Mapping, Union

from . import formula as F
from .errors import ResidualAuxTerm, VariableClash
from .fol import _value_term, simplify, substitute
from .graph import Graph, natural_key
from .rules import GeneralisedRule, RuleSchema

AnyRule = Union[RuleSchema, GeneralisedRule]

FRESH_POOL = ("u", "v", "w", "y", "z")


def _generalise(r: AnyRule) -> GeneralisedRule:
    return r.generalised() if isinstance(r, RuleSchema) else r


def _nodes(g: Graph) -> list[str]:
    return sorted(g.nodes, key=natural_key)


def _edges(g: Graph) -> list[str]:
    return sorted(g.edges, key=natural_key)


def _interface(r) -> set:
    return set(r.interface)


# -- edge predicates ----------------------------------------------------------

def desugar_edges(c: F.Formula) -> F.Formula:
    """Rewrite ``edge(v, w, l, m)`` as an edge quantifier.

    A mark argument ``any`` imposes no constraint on the edge mark.
    """
    if isinstance(c, F.EdgePred):
        y = F.fresh_name("y", F.all_names(c))
        e = F.Var(y, F.EDGE)
        parts = [F.eq(F.Endpoint("s", e), c.src), F.eq(F.Endpoint("t", e), c.tgt)]
        if c.label is not None:
            parts.append(F.eq(F.LabelOf(F.EDGE, e), c.label))
        if c.mark is not None and c.mark != F.MarkConst("any"):
            parts.append(F.eq(F.MarkOf(F.EDGE, e), c.mark))
        return F.Exists(F.EDGE, y, F.conj(*parts))
    if isinstance(c, F.Formula):
        return F.map_children(c, lambda x: desugar_edges(x) if isinstance(x, F.Formula) else x)
    return c


# -- Split ----------------------------------------------------------------------

def _occurs(c: F.Formula, pattern: F.Term) -> bool:
    probe = F.NodeId("\0probe")
    return substitute(c, {pattern: probe}) != c


def split(c: F.Formula, r: AnyRule) -> F.Formula:
    """Case split of a condition over node and edge quantifiers against
    the left-hand graph of ``r``, giving a condition over that graph."""
    r = _generalise(r)
    params = {v for v, _ in r.params}
    for x in F.walk(c):
        if isinstance(x, F.Exists) and x.var in params:
            raise VariableClash(f"bound variable {x.var} is also a variable of rule {r.name}")
    nodes = [F.NodeId(v) for v in _nodes(r.lhs)]
    edges = [F.EdgeId(e) for e in _edges(r.lhs)]
    return _split(desugar_edges(c), nodes, edges)


def _split(c: F.Formula, nodes: list, edges: list) -> F.Formula:
    if isinstance(c, (F.And, F.Or, F.Not)):
        return F.map_children(c, lambda a: _split(a, nodes, edges))
    if not isinstance(c, F.Exists):
        return c
    x = F.Var(c.var, c.sort)
    if c.sort == F.LABEL:
        return F.Exists(c.sort, c.var, _split(c.body, nodes, edges))
    consts = nodes if c.sort == F.NODE else edges
    cases = [_split(substitute(c.body, {x: k}), nodes, edges) for k in consts]
    outside = [F.ne(x, k) for k in consts]
    if c.sort == F.NODE:
        rest = _split(c.body, nodes, edges)
    else:
        rest = _inc(c.body, x, nodes, edges)
    return F.disj(*cases, F.Exists(c.sort, c.var, F.conj(*outside, rest)))


def _inc(body: F.Formula, x: F.Var, nodes: list, edges: list) -> F.Formula:
    """Case analysis on whether the endpoints of ``x`` lie in the match.

    Only endpoints that occur in ``body`` are split on; splitting on an
    absent one would produce equivalent disjuncts.
    """
    ends = [F.Endpoint(w, x) for w in ("s", "t") if _occurs(body, F.Endpoint(w, x))]
    options = []
    for end in ends:
        options.append([(F.eq(end, v), {end: v}) for v in nodes]
                       + [(F.conj(*(F.ne(end, v) for v in nodes)), {})])
    out = []
    for combo in itertools.product(*options):
        guard = F.conj(*(g for g, _ in combo))
        mapping = {}
        for _, m in combo:
            mapping.update(m)
        out.append(F.conj(guard, _split(substitute(body, mapping), nodes, edges)))
    return F.disj(*out)


# -- Dang ----------------------------------------------------------------------

def dang(r: AnyRule) -> F.Formula:
    """Deleted nodes have no edges beyond those in the left-hand graph."""
    L = r.lhs
    keep = _interface(r)
    parts = []
    for v in _nodes(L):
        if v in keep:
            continue
        n = F.NodeId(v)
        parts.append(F.eq(F.Degree("indeg", n), F.IntLit(L.indeg(v))))
        parts.append(F.eq(F.Degree("outdeg", n), F.IntLit(L.outdeg(v))))
    return F.conj(*parts)


# -- Val -------------------------------------------------------------------------

def any_choices(g: Graph) -> list[dict]:
    """All ways to resolve the ``any`` marks of ``g`` to concrete marks,
    keyed by ``("node", id)`` / ``("edge", id)``."""
    slots = [(("node", v), F.NODE_MARKS) for v in _nodes(g) if g.nodes[v].mark == "any"]
    slots += [(("edge", e), F.EDGE_MARKS) for e in _edges(g) if g.edges[e].mark == "any"]
    choices = [[m for m in marks if m != "none"] for _, marks in slots]
    return [dict(zip((k for k, _ in slots), combo)) for combo in itertools.product(*choices)]


def _mark(mark: str, key, mu: Mapping) -> F.Term:
    return F.MarkConst(mu.get(key, mark))


def val(d: F.Formula, r: AnyRule, mu: Mapping = None) -> F.Formula:
    """Replace attributes of left-hand constants by their values in L.

    ``mu`` fixes the concrete marks of ``any``-marked items; without it the
    result is the disjunction over all such choices.
    """
    if mu is None:
        choices = any_choices(r.lhs)
        return simplify(F.disj(*(val(d, r, m) for m in choices)))
    return simplify(_val(d, r.lhs, _interface(r), mu))


def _val(n, L: Graph, keep: set, mu: Mapping):
    n = F.map_children(n, lambda ch: _val(ch, L, keep, mu))
    if isinstance(n, F.Endpoint) and isinstance(n.edge, F.EdgeId) and n.edge.name in L.edges:
        e = L.edges[n.edge.name]
        return F.NodeId(e.src if n.which == "s" else e.tgt)
    if isinstance(n, F.LabelOf):
        item = _item(n.arg, L)
        if item is not None:
            return item.label
    if isinstance(n, F.MarkOf):
        item = _item(n.arg, L)
        if item is not None:
            kind = "node" if isinstance(n.arg, F.NodeId) else "edge"
            return _mark(item.mark, (kind, n.arg.name), mu)
    if isinstance(n, F.Root) and isinstance(n.node, F.NodeId) and n.node.name in L.nodes:
        return F.Bool(bool(L.nodes[n.node.name].root))
    if isinstance(n, F.Degree) and isinstance(n.node, F.NodeId) and n.node.name in L.nodes:
        v = n.node.name
        k = F.IntLit(L.indeg(v) if n.which == "indeg" else L.outdeg(v))
        if v not in keep:
            return k
        aux = "incon" if n.which == "indeg" else "outcon"
        return F.Arith("+", k, F.Aux(aux, n.node))
    return n


def _item(t: F.Term, L: Graph):
    if isinstance(t, F.NodeId):
        return L.nodes.get(t.name)
    if isinstance(t, F.EdgeId):
        return L.edges.get(t.name)
    return None


# -- Lift ------------------------------------------------------------------------

def _fresh_bound(c: F.Formula, avoid: set) -> F.Formula:
    """Rename bound variables of ``c`` whose names are in ``avoid``."""
    if isinstance(c, F.Exists):
        body = _fresh_bound(c.body, avoid)
        if c.var in avoid:
            new = F.fresh_name(c.var, avoid | F.all_names(body))
            body = substitute(body, {F.Var(c.var, c.sort): F.Var(new, c.sort)})
            return F.Exists(c.sort, new, body)
        return F.Exists(c.sort, c.var, body)
    if isinstance(c, F.Formula):
        return F.map_children(c, lambda x: _fresh_bound(x, avoid) if isinstance(x, F.Formula) else x)
    return c


def _prepare(c: F.Formula, w: GeneralisedRule) -> F.Formula:
    return _fresh_bound(c, {v for v, _ in w.params})


def _lift(c: F.Formula, w: GeneralisedRule, mu: Mapping) -> F.Formula:
    c = _prepare(c, w)
    return val(F.conj(split(F.conj(c, w.ac_left), w), dang(w)), w, mu)


def lift(c: F.Formula, w: AnyRule) -> F.Formula:
    """Left-application condition: the precondition, the dangling condition
    and the left condition of ``w``, as a condition over its left-hand graph."""
    w = _generalise(w)
    return simplify(F.disj(*(_lift(c, w, mu) for mu in any_choices(w.lhs))))


# -- Adj -------------------------------------------------------------------------

def adj(d: F.Formula, r: AnyRule) -> F.Formula:
    """Turn a condition over L into one over R."""
    keep = _interface(r)
    deleted = {F.NodeId(v) for v in r.lhs.nodes if v not in keep}
    deleted |= {F.EdgeId(e) for e in r.lhs.edges}
    new_nodes = [F.NodeId(v) for v in _nodes(r.rhs) if v not in keep]
    new_edges = [F.EdgeId(e) for e in _edges(r.rhs)]
    return simplify(_adj(d, r, keep, deleted, new_nodes, new_edges))


def _adj(c, r, keep, deleted, new_nodes, new_edges):
    if isinstance(c, F.Exists):
        body = _adj(c.body, r, keep, deleted, new_nodes, new_edges)
        x = F.Var(c.var, c.sort)
        fresh = new_nodes if c.sort == F.NODE else new_edges if c.sort == F.EDGE else []
        return F.Exists(c.sort, c.var, F.conj(*(F.ne(x, k) for k in fresh), body))
    if isinstance(c, F.Cmp) and c.op in ("=", "!=") and (c.left in deleted or c.right in deleted):
        return F.Bool(c.op == "!=")
    if isinstance(c, F.Formula):
        return F.map_children(c, lambda x: _adj(x, r, keep, deleted, new_nodes, new_edges))
    return _adj_term(c, r, keep)


def _adj_term(t: F.Term, r, keep):
    if isinstance(t, F.Aux):
        if not isinstance(t.node, F.NodeId) or t.node.name not in keep:
            raise ResidualAuxTerm(f"{t.kind} applied to a node outside the interface")
        v = t.node.name
        which = "indeg" if t.kind == "incon" else "outdeg"
        k = r.rhs.indeg(v) if which == "indeg" else r.rhs.outdeg(v)
        return F.Arith("-", F.Degree(which, t.node), F.IntLit(k))
    return F.map_children(t, lambda x: _adj_term(x, r, keep))


# -- Spec ------------------------------------------------------------------------

def _type_pred(var: str, typ: str) -> F.Formula:
    return F.TRUE if typ == "list" else F.TypePred(typ, F.Var(var))


def _var_names(t) -> list[str]:
    return [n for n, s in F.free_vars(t).items() if s == F.LABEL]


def spec(R: Graph, types: Mapping[str, str] = None, mu: Mapping = None) -> F.Formula:
    """Formula pinning down a totally labelled rule graph: every label, mark,
    root flag and endpoint of R, with the types of R's variables.  Host
    graphs are accepted too; their labels become literals."""
    R = Graph({v: replace(n, label=_value_term(n.label)) if isinstance(n.label, tuple) else n
               for v, n in R.nodes.items()},
              {k: replace(e, label=_value_term(e.label)) if isinstance(e.label, tuple) else e
               for k, e in R.edges.items()})
    types = dict(types or {})
    mu = mu or {}
    parts = []
    seen: dict[str, None] = {}
    for v in _nodes(R):
        for name in _var_names(R.nodes[v].label):
            seen.setdefault(name)
    for e in _edges(R):
        for name in _var_names(R.edges[e].label):
            seen.setdefault(name)
    parts.extend(_type_pred(x, types.get(x, "list")) for x in seen)
    for v in _nodes(R):
        n, node = F.NodeId(v), R.nodes[v]
        parts.append(F.eq(F.LabelOf(F.NODE, n), node.label))
        parts.append(_mark_fact(F.MarkOf(F.NODE, n), node.mark, ("node", v), mu))
        parts.append(F.Root(n) if node.root else F.Not(F.Root(n)))
    for k in _edges(R):
        e, edge = F.EdgeId(k), R.edges[k]
        parts.append(F.eq(F.Endpoint("s", e), F.NodeId(edge.src)))
        parts.append(F.eq(F.Endpoint("t", e), F.NodeId(edge.tgt)))
        parts.append(F.eq(F.LabelOf(F.EDGE, e), edge.label))
        parts.append(_mark_fact(F.MarkOf(F.EDGE, e), edge.mark, ("edge", k), mu))
    return F.conj(*(p for p in parts if p != F.TRUE))


def _mark_fact(term: F.Term, mark: str, key, mu: Mapping) -> F.Formula:
    if key in mu:
        return F.eq(term, F.MarkConst(mu[key]))
    if mark == "any":
        return F.ne(term, F.MarkConst("none"))
    return F.eq(term, F.MarkConst(mark))


# -- Shift -----------------------------------------------------------------------

def _preserved_any(w: GeneralisedRule, mu: Mapping) -> dict:
    """Marks of right-hand ``any`` items that keep a left-hand ``any`` mark."""
    out = {}
    for v in w.interface:
        if w.rhs.nodes.get(v) is not None and w.rhs.nodes[v].mark == "any" \
                and ("node", v) in mu:
            out[("node", v)] = mu[("node", v)]
    return out


def _param_types(w: GeneralisedRule, f: F.Formula) -> F.Formula:
    """Types of rule variables left free in ``f`` but absent from R."""
    in_r = set()
    for g in (w.rhs,):
        for item in list(g.nodes.values()) + list(g.edges.values()):
            in_r |= set(_var_names(item.label))
    fv = F.free_vars(f)
    return F.conj(*(_type_pred(x, t) for x, t in w.params if x in fv and x not in in_r))


def shift(c: F.Formula, w: AnyRule) -> F.Formula:
    """Right-application condition of ``w`` for precondition ``c``: a
    condition over the right-hand graph."""
    w = _generalise(w)
    inv = w.inverse()
    out = []
    for mu in any_choices(w.lhs):
        body = F.conj(adj(_lift(c, w, mu), w), w.ac_right,
                      spec(w.rhs, w.var_types, _preserved_any(w, mu)), dang(inv))
        out.append(F.conj(body, _param_types(w, body)))
    return simplify(F.disj(*out))


# -- Var and Post ----------------------------------------------------------------

def _fresh_names(count: int, used: set) -> list[str]:
    out = []
    for name in itertools.chain(FRESH_POOL, (f"{p}{i}" for i in itertools.count(1)
                                             for p in FRESH_POOL)):
        if len(out) == count:
            break
        if name not in used:
            out.append(name)
            used.add(name)
    return out


def variablise(d: F.Formula, nodes: Iterable[str] = None, edges: Iterable[str] = None,
               avoid: Iterable[str] = ()) -> tuple[F.Formula, list[str], list[str]]:
    """Replace node and edge constants by fresh variables.

    Returns the formula with pairwise disequalities between the new node
    variables and between the new edge variables, plus the two name lists.
    """
    found_n, found_e = F.constants(d)
    nodes = list(nodes) if nodes is not None else found_n
    edges = list(edges) if edges is not None else found_e
    used = F.all_names(d) | set(avoid)
    names = _fresh_names(len(nodes) + len(edges), used)
    vn, ve = names[:len(nodes)], names[len(nodes):]
    mapping = {F.NodeId(k): F.Var(n, F.NODE) for k, n in zip(nodes, vn)}
    mapping.update({F.EdgeId(k): F.Var(n, F.EDGE) for k, n in zip(edges, ve)})
    body = _replace_consts(d, mapping)
    diseq = [F.ne(F.Var(a, F.NODE), F.Var(b, F.NODE)) for a, b in itertools.combinations(vn, 2)]
    diseq += [F.ne(F.Var(a, F.EDGE), F.Var(b, F.EDGE)) for a, b in itertools.combinations(ve, 2)]
    return F.conj(*diseq, body), vn, ve


def _replace_consts(n, mapping):
    if isinstance(n, (F.NodeId, F.EdgeId)):
        return mapping.get(n, n)
    return F.map_children(n, lambda x: _replace_consts(x, mapping))


def close(d: F.Formula, graph: Graph, order: Iterable[str] = ()) -> F.Formula:
    """Existential closure of ``d`` after variablising the constants of ``graph``."""
    body, vn, ve = variablise(d, _nodes(graph), _edges(graph), avoid=order)
    fv = F.free_vars(body)
    labels = [x for x in order if fv.get(x) == F.LABEL]
    labels += [x for x, s in fv.items() if s == F.LABEL and x not in labels]
    return F.exists_many(F.NODE, vn, F.exists_many(F.EDGE, ve, F.exists_many(F.LABEL, labels, body)))


def post_formula(c: F.Formula, w: AnyRule) -> F.Formula:
    """Closed postcondition for one directed generalised rule."""
    w = _generalise(w)
    return simplify(close(shift(c, w), w.rhs, [v for v, _ in w.params]))


def slp_rule(c: F.Formula, r: AnyRule) -> F.Formula:
    """Strongest liberal postcondition of ``c`` with respect to ``r``."""
    w = _generalise(r)
    return simplify(F.disj(*(post_formula(c, v) for v in w.variants())))


def slp_inverse(c: F.Formula, r: AnyRule) -> F.Formula:
    w = _generalise(r)
    return simplify(F.disj(*(post_formula(c, v.inverse()) for v in w.variants())))


def wlp_rule(d: F.Formula, r: AnyRule) -> F.Formula:
    """Weakest liberal precondition: holds of G iff every graph obtained
    from G by one application of ``r`` satisfies ``d``."""
    w = _generalise(r)
    return simplify(F.conj(*(F.Not(post_formula(F.Not(d), v.inverse()))
                             for v in w.variants())))


def success_rule(r: AnyRule) -> F.Formula:
    """Holds of G iff ``r`` is applicable to G.

    The left-hand graph is specified and closed together with the condition
    and the dangling condition.  Unlike Lift, no valuation is applied: the
    degrees in the dangling condition must be read from the host graph.
    """
    w = _generalise(r)
    out = []
    for v in w.variants():
        body = F.conj(spec(v.lhs, v.var_types), v.ac_left, dang(v))
        body = F.conj(body, _types_of_free(v, body))
        out.append(close(body, v.lhs, [x for x, _ in v.params]))
    return simplify(F.disj(*out))


def _types_of_free(w: GeneralisedRule, f: F.Formula) -> F.Formula:
    in_l = set()
    for item in list(w.lhs.nodes.values()) + list(w.lhs.edges.values()):
        in_l |= set(_var_names(item.label))
    fv = F.free_vars(f)
    return F.conj(*(_type_pred(x, t) for x, t in w.params if x in fv and x not in in_l))
