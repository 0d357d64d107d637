"""Exhaustive enumeration of small host graphs and bounded implication checks.

Graphs are generated in a fixed order: by node count, then by the sorted
sequence of node states (label, mark, root), then by edge multiset.  Only
one representative per isomorphism class is produced: an edge multiset is
kept only if no state-preserving node permutation maps it to a smaller one.

:func:`reduce_bound` shrinks the mark and label alphabets and drops edges
when the formulas (and rules) under test cannot distinguish the removed
values.  The reductions are exact: every graph outside the reduced space
agrees on all formulas with some graph inside it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Optional, Sequence

from . import formula as F
from .graph import Edge, Graph, Node
from .semantics import DEFAULT_UNIVERSE, GraphCtx, LabelUniverse, compiled


@dataclass(frozen=True)
class GraphBound:
    max_nodes: int = 3
    max_edges: int = 4
    node_marks: tuple = F.NODE_MARKS
    edge_marks: tuple = F.EDGE_MARKS
    roots: tuple = (False, True)
    node_labels: tuple = ((0,),)
    edge_labels: tuple = ((0,),)
    min_nodes: int = 0

    def describe(self) -> str:
        return (f"<= {self.max_nodes} nodes, <= {self.max_edges} edges, node marks "
                f"{{{', '.join(self.node_marks)}}}, edge marks {{{', '.join(self.edge_marks)}}}, "
                f"roots {sorted(set(self.roots))}, {len(self.node_labels)} node label(s), "
                f"{len(self.edge_labels)} edge label(s)")


def _node_states(bound: GraphBound) -> list[tuple]:
    return list(itertools.product(bound.node_labels, bound.node_marks, bound.roots))


def enumerate_hosts(bound: GraphBound) -> Iterator[Graph]:
    """Every host graph within ``bound``, one per isomorphism class."""
    states = _node_states(bound)
    for n in range(bound.min_nodes, bound.max_nodes + 1):
        ids = [str(i + 1) for i in range(n)]
        slots = [(s, t, lab, mark) for s in range(n) for t in range(n)
                 for lab in bound.edge_labels for mark in bound.edge_marks]
        index = {s: i for i, s in enumerate(slots)}
        for seq in itertools.combinations_with_replacement(range(len(states)), n):
            perms = [p for p in itertools.permutations(range(n))
                     if any(p[i] != i for i in range(n))
                     and all(seq[p[i]] == seq[i] for i in range(n))]
            images = [[index[(p[s], p[t], lab, mark)] for (s, t, lab, mark) in slots]
                      for p in perms]
            nodes = {}
            for v, si in zip(ids, seq):
                lab, mark, root = states[si]
                nodes[v] = Node(lab, mark, root)
            max_e = bound.max_edges if n else 0
            for m in range(max_e + 1):
                for es in itertools.combinations_with_replacement(range(len(slots)), m):
                    if images and any(tuple(sorted(img[i] for i in es)) < es for img in images):
                        continue
                    edges = {}
                    for j, si in enumerate(es):
                        s, t, lab, mark = slots[si]
                        edges[f"e{j + 1}"] = Edge(ids[s], ids[t], lab, mark)
                    yield Graph(nodes, edges)


def count_hosts(bound: GraphBound) -> int:
    return sum(1 for _ in enumerate_hosts(bound))


# -- alphabet reduction -------------------------------------------------------

def _mark_usage(f, node: set, edge: set) -> tuple[bool, bool, bool]:
    """Record mark constants by the position (node or edge) they are
    compared in.  Returns flags: node marks compared with node marks, edge
    marks with edge marks, and node marks with edge marks."""
    nn = ee = ne = False
    placed = set()
    for x in F.walk(f):
        if isinstance(x, F.Cmp):
            sides = (x.left, x.right)
            kinds = [s.sort for s in sides if isinstance(s, F.MarkOf)]
            consts = [s for s in sides if isinstance(s, F.MarkConst)]
            if len(kinds) == 2:
                nn |= kinds == [F.NODE, F.NODE]
                ee |= kinds == [F.EDGE, F.EDGE]
                ne |= kinds[0] != kinds[1]
            elif len(kinds) == 1 and consts:
                (node if kinds[0] == F.NODE else edge).add(consts[0].name)
                placed.add(id(consts[0]))
        elif isinstance(x, F.EdgePred) and x.mark is not None:
            if isinstance(x.mark, F.MarkConst):
                edge.add(x.mark.name)
                placed.add(id(x.mark))
            else:
                ne = True
    for x in F.walk(f):
        if isinstance(x, F.MarkConst) and id(x) not in placed:
            node.add(x.name)
            edge.add(x.name)
    return nn, ee, ne


def _marks_compared_to_each_other(f) -> bool:
    return any(_mark_usage(f, set(), set()))


def _strip_label_witnesses(f):
    """Drop conjuncts ``l(t) = a`` for label variables a bound right above
    and used nowhere else; such conjuncts hold for a = the actual label."""
    if isinstance(f, F.Exists) and f.sort == F.LABEL:
        body = _strip_label_witnesses(f.body)
        occ = sum(1 for n in F.walk(body) if isinstance(n, F.Var) and n.name == f.var)
        if occ == 1 and isinstance(body, (F.And, F.Cmp)):
            args = list(body.args) if isinstance(body, F.And) else [body]
            for i, a in enumerate(args):
                if isinstance(a, F.Cmp) and a.op == "=" and F.Var(f.var) in (a.left, a.right):
                    other = a.right if a.left == F.Var(f.var) else a.left
                    if isinstance(other, F.LabelOf) and not F.free_vars(other).get(f.var):
                        return F.conj(*(args[:i] + args[i + 1:]))
        return F.Exists(f.sort, f.var, body)
    if isinstance(f, F.Formula):
        return F.map_children(f, _strip_label_witnesses)
    return f


def label_sensitive(f: F.Formula) -> bool:
    g = _strip_label_witnesses(f)
    return any(isinstance(x, F.LabelOf) or (isinstance(x, F.Exists) and x.sort == F.LABEL)
               for x in F.walk(g))


def mentions_edges(f: F.Formula) -> bool:
    return any(isinstance(x, (F.EdgeId, F.Endpoint, F.Degree, F.EdgePred))
               or (isinstance(x, F.Exists) and x.sort == F.EDGE)
               or (isinstance(x, F.Var) and x.sort == F.EDGE) for x in F.walk(f))


def mentions_roots(f: F.Formula) -> bool:
    return any(isinstance(x, F.Root) for x in F.walk(f))


def _reduce_marks(alphabet: Sequence[str], mentioned: set, spares: int) -> tuple:
    keep = [m for m in alphabet if m in mentioned]
    spare = [m for m in alphabet if m not in mentioned]
    return tuple(keep + spare[:spares])


def reduce_bound(bound: GraphBound, formulas: Iterable[F.Formula], rules: Iterable = ()) -> GraphBound:
    """Shrink ``bound`` to the values the formulas and rules can tell apart.

    * marks never named by a formula or rule are interchangeable, so one
      representative suffices; when marks are compared with each other,
      as many as there are items that can carry them;
    * if no formula reads labels, one node label and one edge label suffice;
    * a formula that never mentions edges is evaluated on edgeless graphs;
    * a formula without root predicates is evaluated on unrooted graphs.

    Rules make labels, edges and roots relevant.
    """
    formulas = list(formulas)
    rules = list(rules)
    node, edge = set(), set()
    full_n = full_e = False
    conds = [getattr(r, "condition", getattr(r, "ac_left", F.TRUE)) for r in rules]
    for f in formulas + conds:
        nn, ee, ne = _mark_usage(f, node, edge)
        full_n |= nn or ne
        full_e |= ee or ne
        if ne:
            node |= edge
            edge |= node
    for r in rules:
        for g in (r.lhs, r.rhs):
            node |= {n.mark for n in g.nodes.values()}
            edge |= {e.mark for e in g.edges.values()}
    for s in (node, edge):
        if "any" in s:
            s.add("none")
    out = replace(bound,
                  node_marks=_reduce_marks(bound.node_marks, node,
                                           bound.max_nodes if full_n else 1),
                  edge_marks=_reduce_marks(bound.edge_marks, edge,
                                           bound.max_edges if full_e else 1))
    if not rules:
        if not any(label_sensitive(f) for f in formulas):
            out = replace(out, node_labels=bound.node_labels[:1], edge_labels=bound.edge_labels[:1])
        if not any(mentions_edges(f) for f in formulas):
            out = replace(out, max_edges=0)
        if not any(mentions_roots(f) for f in formulas):
            out = replace(out, roots=(False,))
    return out


# -- implication and equivalence ---------------------------------------------

@dataclass
class Verdict:
    holds: bool
    counterexample: Optional[Graph] = None
    bound: Optional[GraphBound] = None
    universe: LabelUniverse = DEFAULT_UNIVERSE
    checked: int = 0
    detail: str = ""

    def __bool__(self):
        return self.holds


def implies_bounded(c: F.Formula, d: F.Formula, bound: GraphBound = GraphBound(),
                    universe: LabelUniverse = DEFAULT_UNIVERSE, reduce: bool = True) -> Verdict:
    """Search for a graph satisfying ``c`` but not ``d``; return the first one
    in enumeration order, or a verdict recording that none exists in bound."""
    eff = reduce_bound(bound, [c, d]) if reduce else bound
    fc, fd = compiled(c), compiled(d)
    n = 0
    for g in enumerate_hosts(eff):
        n += 1
        ctx = GraphCtx(g, universe)
        if fc(ctx, {}) and not fd(ctx, {}):
            return Verdict(False, g, eff, universe, n)
    return Verdict(True, None, eff, universe, n)


def equivalent_bounded(a: F.Formula, b: F.Formula, bound: GraphBound = GraphBound(),
                       universe: LabelUniverse = DEFAULT_UNIVERSE, reduce: bool = True) -> Verdict:
    """Search for a graph on which ``a`` and ``b`` disagree."""
    eff = reduce_bound(bound, [a, b]) if reduce else bound
    fa, fb = compiled(a), compiled(b)
    n = 0
    for g in enumerate_hosts(eff):
        n += 1
        ctx = GraphCtx(g, universe)
        va, vb = fa(ctx, {}), fb(ctx, {})
        if va != vb:
            return Verdict(False, g, eff, universe, n,
                           f"first formula {'holds' if va else 'fails'}, second "
                           f"{'holds' if vb else 'fails'}")
    return Verdict(True, None, eff, universe, n)
