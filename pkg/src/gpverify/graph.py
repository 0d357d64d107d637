"""Rule graphs, host graphs, premorphisms, isomorphism and replacement graphs.

Host-graph labels are tuples of atoms (``int`` or ``str``); a list of length
one is identified with its single atom, so the integer 5 is ``(5,)`` and the
empty list is ``()``.  Rule-graph labels are expression terms from
:mod:`gpverify.formula`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Union

from . import formula as F

Label = tuple
RuleLabel = Union[Label, F.Term]


class NotInjective(ValueError):
    pass


@dataclass(frozen=True)
class Node:
    label: Optional[RuleLabel]
    mark: Optional[str]
    root: Optional[bool] = False


@dataclass(frozen=True)
class Edge:
    src: str
    tgt: str
    label: RuleLabel
    mark: str
    bidirectional: bool = False


def natural_key(s: str):
    return [(0, int(p), "") if p.isdigit() else (1, 0, p)
            for p in re.split(r"(\d+)", s) if p]


@dataclass(frozen=True, eq=False)
class Graph:
    """A (rule or host) graph; treat as immutable.

    Node and edge insertion order is significant only for printing and for
    deterministic enumeration.
    """
    nodes: Mapping[str, Node] = field(default_factory=dict)
    edges: Mapping[str, Edge] = field(default_factory=dict)

    def __eq__(self, other):
        return (isinstance(other, Graph) and dict(self.nodes) == dict(other.nodes)
                and dict(self.edges) == dict(other.edges))

    def __hash__(self):
        return hash((frozenset(self.nodes.items()), frozenset(self.edges.items())))

    def __repr__(self):
        ns = ", ".join(f"{k}:{_short(v.label)}/{v.mark}{'*' if v.root else ''}"
                       for k, v in self.nodes.items())
        es = ", ".join(f"{k}:{e.src}->{e.tgt}:{_short(e.label)}/{e.mark}"
                       for k, e in self.edges.items())
        return f"Graph([{ns}] [{es}])"

    # -- queries ------------------------------------------------------------

    def indeg(self, v: str) -> int:
        return sum(1 for e in self.edges.values() if e.tgt == v)

    def outdeg(self, v: str) -> int:
        return sum(1 for e in self.edges.values() if e.src == v)

    def incident(self, v: str) -> list[str]:
        return [k for k, e in self.edges.items() if e.src == v or e.tgt == v]

    def is_total(self) -> bool:
        return all(n.label is not None and n.mark is not None and n.root is not None
                   for n in self.nodes.values())

    def sorted_nodes(self) -> list[str]:
        return sorted(self.nodes, key=natural_key)

    def sorted_edges(self) -> list[str]:
        return sorted(self.edges, key=natural_key)

    # -- functional updates -------------------------------------------------

    def with_node(self, v: str, node: Node) -> "Graph":
        nodes = dict(self.nodes)
        nodes[v] = node
        return Graph(nodes, dict(self.edges))

    def with_edge(self, e: str, edge: Edge) -> "Graph":
        edges = dict(self.edges)
        edges[e] = edge
        return Graph(dict(self.nodes), edges)

    def remark_node(self, v: str, mark: str) -> "Graph":
        return self.with_node(v, replace(self.nodes[v], mark=mark))


def _short(label):
    if isinstance(label, tuple):
        return format_label(label)
    return str(label)


def format_label(label: Label) -> str:
    if not label:
        return "empty"
    parts = []
    for atom in label:
        parts.append(f'"{atom}"' if isinstance(atom, str) else str(atom))
    return ":".join(parts)


def _is_host_label(label) -> bool:
    return isinstance(label, tuple) and all(
        (isinstance(a, int) and not isinstance(a, bool))
        or (isinstance(a, str) and '"' not in a) for a in label)


def validate_host_graph(g: Graph) -> tuple[bool, list[str]]:
    """Check the host-graph invariants; return ``(ok, diagnostics)``."""
    problems = []
    for v, n in g.nodes.items():
        if n.label is None or n.mark is None or n.root is None:
            problems.append(f"node {v}: not totally labelled")
            continue
        if not _is_host_label(n.label):
            problems.append(f"node {v}: label {n.label!r} is not a host list")
        if n.mark not in F.NODE_MARKS:
            problems.append(f"node {v}: mark {n.mark!r} not allowed on host nodes")
    for k, e in g.edges.items():
        if e.src not in g.nodes or e.tgt not in g.nodes:
            problems.append(f"edge {k}: dangling endpoint")
        if not _is_host_label(e.label):
            problems.append(f"edge {k}: label {e.label!r} is not a host list")
        if e.mark not in F.EDGE_MARKS:
            problems.append(f"edge {k}: mark {e.mark!r} not allowed on host edges")
        if e.bidirectional:
            problems.append(f"edge {k}: bidirectional edges only occur in rules")
    return not problems, problems


@dataclass(frozen=True)
class Premorphism:
    node_map: Mapping[str, str]
    edge_map: Mapping[str, str]

    def is_injective(self) -> bool:
        return (len(set(self.node_map.values())) == len(self.node_map)
                and len(set(self.edge_map.values())) == len(self.edge_map))

    def ids(self) -> dict[str, str]:
        out = dict(self.node_map)
        out.update(self.edge_map)
        return out

    def __hash__(self):
        return hash((frozenset(self.node_map.items()), frozenset(self.edge_map.items())))


# -- isomorphism ------------------------------------------------------------

def _node_sig(g: Graph, v: str):
    n = g.nodes[v]
    loops = sorted((format_label(e.label), e.mark) for e in g.edges.values()
                   if e.src == v and e.tgt == v)
    return (_short(n.label), n.mark, bool(n.root), g.indeg(v), g.outdeg(v), tuple(loops))


def invariant_key(g: Graph):
    """An isomorphism invariant, used to bucket graphs before exact tests."""
    nodes = sorted(_node_sig(g, v) for v in g.nodes)
    edges = sorted((_short(e.label), e.mark) for e in g.edges.values())
    return (tuple(nodes), tuple(edges))


def _edge_table(g: Graph) -> dict:
    table: dict = {}
    for k, e in g.edges.items():
        table.setdefault((e.src, e.tgt), []).append(((_short(e.label), e.mark), k))
    for lst in table.values():
        lst.sort()
    return table


def isomorphic(g: Graph, h: Graph) -> Optional[Premorphism]:
    """Return a label, mark and root preserving bijection ``g -> h`` or None."""
    if len(g.nodes) != len(h.nodes) or len(g.edges) != len(h.edges):
        return None
    if invariant_key(g) != invariant_key(h):
        return None
    gsig = {v: _node_sig(g, v) for v in g.nodes}
    hsig = {v: _node_sig(h, v) for v in h.nodes}
    gt, ht = _edge_table(g), _edge_table(h)
    order = sorted(g.nodes, key=lambda v: (sum(1 for w in hsig if hsig[w] == gsig[v]),
                                           natural_key(v)))
    hnodes = h.sorted_nodes()
    mapping: dict[str, str] = {}
    used: set[str] = set()

    def pair_ok(a, b):
        ea = [s for s, _ in gt.get((a, b), [])]
        eb = [s for s, _ in ht.get((mapping[a], mapping[b]), [])]
        return ea == eb

    def bt(i):
        if i == len(order):
            return True
        v = order[i]
        for w in hnodes:
            if w in used or hsig[w] != gsig[v]:
                continue
            mapping[v] = w
            used.add(w)
            if all(pair_ok(v, u) and pair_ok(u, v) for u in order[:i + 1]):
                if bt(i + 1):
                    return True
            del mapping[v]
            used.discard(w)
        return False

    if not bt(0):
        return None
    edge_map = {}
    for (a, b), lst in gt.items():
        for (_, ka), (_, kb) in zip(lst, ht[(mapping[a], mapping[b])]):
            edge_map[ka] = kb
    return Premorphism(dict(mapping), edge_map)


def dedupe_isomorphic(graphs: Iterable[Graph]) -> list[Graph]:
    """Keep the first representative of each isomorphism class."""
    buckets: dict = {}
    out = []
    for g in graphs:
        key = invariant_key(g)
        bucket = buckets.setdefault(key, [])
        if any(isomorphic(g, h) is not None for h in bucket):
            continue
        bucket.append(g)
        out.append(g)
    return out


# -- replacement graphs -----------------------------------------------------

def replacement_graph(g: Graph, m: Premorphism) -> Graph:
    """Rename ``g`` so that the image of ``m`` carries the source identifiers.

    ``m`` maps identifiers of a rule graph ``L`` into ``g``.  Nodes and edges
    outside the image keep their names unless those collide with a name of
    ``L``, in which case ``'`` is appended until the name is unused.
    """
    if not m.is_injective():
        raise NotInjective("replacement graph needs an injective premorphism")
    inv_n = {h: l for l, h in m.node_map.items()}
    inv_e = {h: l for l, h in m.edge_map.items()}
    taken_n = set(m.node_map)
    taken_e = set(m.edge_map)
    rename_n: dict[str, str] = {}
    for v in g.nodes:
        if v in inv_n:
            rename_n[v] = inv_n[v]
    for v in g.nodes:
        if v in inv_n:
            continue
        name = v
        while name in taken_n:
            name += "'"
        taken_n.add(name)
        rename_n[v] = name
    rename_e: dict[str, str] = {}
    for e in g.edges:
        if e in inv_e:
            rename_e[e] = inv_e[e]
    for e in g.edges:
        if e in inv_e:
            continue
        name = e
        while name in taken_e:
            name += "'"
        taken_e.add(name)
        rename_e[e] = name
    nodes = {rename_n[v]: n for v, n in g.nodes.items()}
    edges = {rename_e[k]: replace(e, src=rename_n[e.src], tgt=rename_n[e.tgt])
             for k, e in g.edges.items()}
    return Graph(nodes, edges)


def freshen(name: str, used) -> str:
    while name in used:
        name += "'"
    return name
