"""Rule application and program execution.

Matching finds injective premorphisms from the left-hand graph by
backtracking, binding rule variables by unifying simple label patterns with
host lists.  Application is the operational reading of the natural double
pushout: delete the images of ``L - K`` and of all left-hand edges, relabel
the interface images, add fresh copies of ``R - K`` and of all right-hand
edges.
"""
from __future__ import annotations

import itertools
import sys
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Union

from . import formula as F
from . import program as P
from . import values as V
from .errors import UniverseTooSmall, UnknownRule
from .fol import substitute
from .graph import Edge, Graph, Node, Premorphism, freshen, invariant_key, isomorphic
from .rules import GeneralisedRule, RuleSchema
from .semantics import (DEFAULT_UNIVERSE, GraphCtx, LabelUniverse, compile_formula,
                        compile_term)

AnyRule = Union[RuleSchema, GeneralisedRule]


@dataclass(frozen=True)
class LabelAssignment:
    labels: tuple  # ((variable, value), ...)
    node_marks: tuple = ()  # ((left-hand node, mark), ...) for any-marked nodes
    edge_marks: tuple = ()

    def as_dict(self) -> dict:
        return dict(self.labels)


@dataclass(frozen=True)
class Match:
    rule: AnyRule  # the directed variant that matched
    morphism: Premorphism
    assignment: LabelAssignment


# -- pattern unification ------------------------------------------------------

def _items(t: F.Term) -> tuple:
    return t.items if isinstance(t, F.Concat) else (t,)


def _atom_ok(typ: str, a) -> bool:
    return V.has_type(typ, (a,)) if typ != "list" else True


def unify(pattern: F.Term, value: tuple, types: dict, binding: dict) -> Optional[dict]:
    """Extend ``binding`` so that ``pattern`` denotes ``value``; None if impossible.

    ``pattern`` must be simple.  The list variable, if any, absorbs whatever
    the fixed-length items before and after it leave over.
    """
    items = [i for i in _items(pattern) if not isinstance(i, F.EmptyList)]
    lv = [k for k, i in enumerate(items) if isinstance(i, F.Var) and types.get(i.name) == "list"]
    if len(lv) > 1:
        raise ValueError("pattern is not simple")
    out = dict(binding)
    if lv:
        k = lv[0]
        pre, post = items[:k], items[k + 1:]
        if len(pre) + len(post) > len(value):
            return None
        mid = value[len(pre):len(value) - len(post)]
        pairs = list(zip(pre, value[:len(pre)])) + list(zip(post, value[len(value) - len(post):]))
        name = items[k].name
        if name in out and out[name] != mid:
            return None
        out[name] = mid
    else:
        if len(items) != len(value):
            return None
        pairs = list(zip(items, value))
    for item, atom in pairs:
        if not _unify_atom(item, atom, types, out):
            return None
    return out


def _unify_atom(item: F.Term, atom, types: dict, out: dict) -> bool:
    if isinstance(item, F.IntLit):
        return isinstance(atom, int) and atom == item.value
    if isinstance(item, F.StrLit):
        return isinstance(atom, str) and atom == item.value
    if isinstance(item, F.Var):
        typ = types.get(item.name, "list")
        if not _atom_ok(typ, atom):
            return False
        if item.name in out:
            return out[item.name] == (atom,)
        out[item.name] = (atom,)
        return True
    if isinstance(item, F.StrCat):
        return isinstance(atom, str) and _unify_string(item.items, atom, types, out)
    raise ValueError(f"pattern item {item!r} is not simple")


def _unify_string(parts, s: str, types: dict, out: dict) -> bool:
    sv = [k for k, p in enumerate(parts) if isinstance(p, F.Var) and types.get(p.name) == "string"]

    def width(p):
        return len(p.value) if isinstance(p, F.StrLit) else 1

    if sv:
        k = sv[0]
        pre, post = parts[:k], parts[k + 1:]
        lp, ls = sum(map(width, pre)), sum(map(width, post))
        if lp + ls > len(s):
            return False
        if not _unify_fixed(pre, s[:lp], out) or not _unify_fixed(post, s[len(s) - ls:], out):
            return False
        name, mid = parts[k].name, s[lp:len(s) - ls]
        if name in out and out[name] != (mid,):
            return False
        out[name] = (mid,)
        return True
    if sum(map(width, parts)) != len(s):
        return False
    return _unify_fixed(parts, s, out)


def _unify_fixed(parts, s: str, out: dict) -> bool:
    pos = 0
    for p in parts:
        if isinstance(p, F.StrLit):
            if s[pos:pos + len(p.value)] != p.value:
                return False
            pos += len(p.value)
        else:  # char variable
            c = (s[pos],)
            if p.name in out and out[p.name] != c:
                return False
            out[p.name] = c
            pos += 1
    return True


def _is_simple_pattern(t: F.Term, types: dict) -> bool:
    from .frontend import is_simple
    return is_simple(t, types)


# -- matching -----------------------------------------------------------------

def _mark_ok(rule_mark: str, host_mark: str) -> bool:
    return host_mark != "none" if rule_mark == "any" else rule_mark == host_mark


def _constants_as_vars(f: F.Formula, lhs: Graph) -> F.Formula:
    """Turn node/edge constants of a condition over ``lhs`` into variables
    bound by the match, so one compiled closure serves every match."""
    m = {}
    for v in lhs.nodes:
        m[F.NodeId(v)] = F.Var("@" + v, F.NODE)
    for k in lhs.edges:
        m[F.EdgeId(k)] = F.Var("@@" + k, F.EDGE)
    return substitute(f, m) if m else f


class _Compiled:
    """Per-rule-variant compiled conditions and label expressions."""

    def __init__(self, rule: AnyRule):
        self.rule = rule
        self.types = rule.var_types
        ac_left = rule.condition if isinstance(rule, RuleSchema) else rule.ac_left
        ac_right = F.TRUE if isinstance(rule, RuleSchema) else rule.ac_right
        self.left = compile_formula(_constants_as_vars(ac_left, rule.lhs)) \
            if ac_left != F.TRUE else None
        self.right = compile_formula(_constants_as_vars(ac_right, rule.rhs)) \
            if ac_right != F.TRUE else None
        self.right_false = ac_right == F.FALSE
        L = rule.lhs
        self.simple = {}
        self.complex = {}
        for key, lab in [(("n", v), n.label) for v, n in L.nodes.items()] + \
                        [(("e", k), e.label) for k, e in L.edges.items()]:
            if _is_simple_pattern(lab, self.types):
                self.simple[key] = lab
            else:
                self.complex[key] = compile_term(_constants_as_vars_term(lab, L))
        self.rhs_terms = {}
        for v, n in rule.rhs.nodes.items():
            self.rhs_terms[("n", v)] = compile_term(_constants_as_vars_term(n.label, L))
        for k, e in rule.rhs.edges.items():
            self.rhs_terms[("e", k)] = compile_term(_constants_as_vars_term(e.label, L))
        lvars = set()
        for x in list(L.nodes.values()) + list(L.edges.values()):
            lvars |= set(F.free_vars(x.label))
        # generalised rules may introduce variables on the right only; these
        # take every value of their type in the label universe
        self.rhs_only = []
        for x in list(rule.rhs.nodes.values()) + list(rule.rhs.edges.values()):
            for v in F.free_vars(x.label):
                if v not in lvars and v not in self.rhs_only:
                    self.rhs_only.append(v)
        self.complex_vars = []
        bound_simple = set()
        for lab in self.simple.values():
            bound_simple |= set(F.free_vars(lab))
        for key in list(self.complex):
            lab = L.nodes[key[1]].label if key[0] == "n" else L.edges[key[1]].label
            for v in F.free_vars(lab):
                if v not in bound_simple and v not in self.complex_vars:
                    self.complex_vars.append(v)


def _constants_as_vars_term(t: F.Term, lhs: Graph) -> F.Term:
    m = {F.NodeId(v): F.Var("@" + v, F.NODE) for v in lhs.nodes}
    return substitute(t, m) if any(isinstance(x, F.NodeId) for x in F.walk(t)) else t


_CACHE: dict = {}


def _compiled(rule: AnyRule) -> _Compiled:
    key = id(rule)
    hit = _CACHE.get(key)
    if hit is None or hit[0] is not rule:
        hit = (rule, _Compiled(rule))
        _CACHE[key] = hit
    return hit[1]


def _variants(rule: AnyRule) -> list:
    key = ("variants", id(rule))
    hit = _CACHE.get(key)
    if hit is None or hit[0] is not rule:
        hit = (rule, rule.variants() if rule.has_bidirectional() else [rule])
        _CACHE[key] = hit
    return hit[1]


def _structural_matches(L: Graph, g: Graph) -> Iterator[tuple[dict, dict]]:
    """Injective premorphisms respecting marks and rootedness (labels aside)."""
    lnodes = list(L.nodes)
    hnodes = g.sorted_nodes()
    ledges = list(L.edges)
    hedges = g.sorted_edges()
    node_map: dict[str, str] = {}
    used_n: set[str] = set()

    def node_ok(v, w):
        a, b = L.nodes[v], g.nodes[w]
        return bool(a.root) == bool(b.root) and _mark_ok(a.mark, b.mark)

    def edges_bt(i, edge_map, used_e):
        if i == len(ledges):
            yield dict(edge_map)
            return
        le = L.edges[ledges[i]]
        s, t = node_map[le.src], node_map[le.tgt]
        for he in hedges:
            if he in used_e:
                continue
            h = g.edges[he]
            if h.src != s or h.tgt != t or not _mark_ok(le.mark, h.mark):
                continue
            edge_map[ledges[i]] = he
            used_e.add(he)
            yield from edges_bt(i + 1, edge_map, used_e)
            del edge_map[ledges[i]]
            used_e.discard(he)

    def nodes_bt(i):
        if i == len(lnodes):
            for em in edges_bt(0, {}, set()):
                yield dict(node_map), em
            return
        v = lnodes[i]
        for w in hnodes:
            if w in used_n or not node_ok(v, w):
                continue
            node_map[v] = w
            used_n.add(w)
            yield from nodes_bt(i + 1)
            del node_map[v]
            used_n.discard(w)

    yield from nodes_bt(0)


def _match_env(nm: dict, em: dict, labels: dict) -> dict:
    env = dict(labels)
    for v, w in nm.items():
        env["@" + v] = w
    for k, h in em.items():
        env["@@" + k] = h
    return env


def _label_assignments(comp: _Compiled, L: Graph, g: Graph, nm: dict, em: dict,
                       ctx: GraphCtx, universe: Optional[LabelUniverse]) -> Iterator[dict]:
    binding: Optional[dict] = {}
    for (kind, x), pat in comp.simple.items():
        value = g.nodes[nm[x]].label if kind == "n" else g.edges[em[x]].label
        binding = unify(pat, value, comp.types, binding)
        if binding is None:
            return
    if not comp.complex:
        yield binding
        return
    if universe is None:
        raise ValueError("non-simple left-hand side needs a label universe")
    free = [v for v in comp.complex_vars if v not in binding]
    domains = []
    for v in free:
        typ = comp.types.get(v, "list")
        domains.append([val for val in ctx.label_domain(None) if V.has_type(typ, val)])
    found = False
    for combo in itertools.product(*domains):
        b = dict(binding)
        b.update(zip(free, combo))
        env = _match_env(nm, em, b)
        ok = True
        for (kind, x), fn in comp.complex.items():
            value = g.nodes[nm[x]].label if kind == "n" else g.edges[em[x]].label
            try:
                if fn(ctx, env) != value:
                    ok = False
                    break
            except V.Undefined:
                ok = False
                break
        if ok:
            found = True
            yield b
    if not found and free:
        warnings.warn(UniverseTooSmall(
            f"{comp.rule.name}: no values for {', '.join(free)} within the label universe"),
            stacklevel=3)


def find_matches(rule: AnyRule, g: Graph, universe: Optional[LabelUniverse] = DEFAULT_UNIVERSE,
                 ctx: Optional[GraphCtx] = None) -> list[Match]:
    """All matches of ``rule`` (each directed variant) in ``g`` whose label
    assignment satisfies the left application condition."""
    ctx = ctx or GraphCtx(g, universe or DEFAULT_UNIVERSE)
    out = []
    for variant in _variants(rule):
        comp = _compiled(variant)
        L = variant.lhs
        for nm, em in _structural_matches(L, g):
            for labels in _label_assignments(comp, L, g, nm, em, ctx, universe):
                if comp.left is not None and not comp.left(ctx, _match_env(nm, em, labels)):
                    continue
                mu_v = tuple((v, g.nodes[nm[v]].mark) for v, n in L.nodes.items() if n.mark == "any")
                mu_e = tuple((k, g.edges[em[k]].mark) for k, e in L.edges.items() if e.mark == "any")
                out.append(Match(variant, Premorphism(nm, em),
                                 LabelAssignment(tuple(labels.items()), mu_v, mu_e)))
    return out


def check_dangling(rule: AnyRule, g: Graph, m: Premorphism) -> bool:
    """No deleted node may keep an edge outside the match image."""
    image = set(m.edge_map.values())
    for v in rule.lhs.nodes:
        if v in rule.interface:
            continue
        w = m.node_map[v]
        for k, e in g.edges.items():
            if (e.src == w or e.tgt == w) and k not in image:
                return False
    return True


# -- application ----------------------------------------------------------------

def _rewrite(match: Match, g: Graph, ctx: GraphCtx) -> list[tuple[Graph, dict]]:
    """Results of applying a match, with the comatch R -> H.

    More than one result arises only for generalised rules whose right-hand
    side marks a node or edge ``any``.
    """
    rule = match.rule
    comp = _compiled(rule)
    nm, em = match.morphism.node_map, match.morphism.edge_map
    labels = match.assignment.as_dict()
    env = _match_env(nm, em, labels)
    L, R = rule.lhs, rule.rhs
    deleted = {nm[v] for v in L.nodes if v not in rule.interface}
    gone_edges = set(em.values())
    nodes = {v: n for v, n in g.nodes.items() if v not in deleted}
    edges = {k: e for k, e in g.edges.items() if k not in gone_edges}
    try:
        rvals = {key: fn(ctx, env) for key, fn in comp.rhs_terms.items()}
    except V.Undefined:
        return []
    comatch: dict[str, str] = {}
    choices = []  # (kind, id, options)
    for v, rn in R.nodes.items():
        if v in rule.interface:
            w = nm[v]
        else:
            w = freshen(v, set(nodes) | set(g.nodes))
        comatch[v] = w
        mark = rn.mark
        if mark == "any":
            lmark = L.nodes[v].mark if v in L.nodes else None
            if lmark == "any":
                mark = g.nodes[nm[v]].mark
            else:
                choices.append(("n", w, [m for m in F.NODE_MARKS if m != "none"]))
                mark = "none"
        nodes[w] = Node(rvals[("n", v)], mark, bool(rn.root))
    for k, re in R.edges.items():
        h = freshen(k, set(edges) | set(g.edges))
        comatch["@@" + k] = h
        mark = re.mark
        if mark == "any":
            if k in L.edges and L.edges[k].mark == "any":
                mark = g.edges[em[k]].mark
            else:
                choices.append(("e", h, [m for m in F.EDGE_MARKS if m != "none"]))
                mark = "none"
        edges[h] = Edge(comatch[re.src], comatch[re.tgt], rvals[("e", k)], mark)
    base = Graph(nodes, edges)
    node_co = {v: w for v, w in comatch.items() if not v.startswith("@@")}
    edge_co = {v[2:]: w for v, w in comatch.items() if v.startswith("@@")}
    co = {"nodes": node_co, "edges": edge_co}
    if not choices:
        return [(base, co)]
    out = []
    for combo in itertools.product(*(opts for _, _, opts in choices)):
        ns, es = dict(base.nodes), dict(base.edges)
        for (kind, ident, _), mark in zip(choices, combo):
            if kind == "n":
                n = ns[ident]
                ns[ident] = Node(n.label, mark, n.root)
            else:
                e = es[ident]
                es[ident] = Edge(e.src, e.tgt, e.label, mark)
        out.append((Graph(ns, es), co))
    return out


class GraphSet:
    """Graphs kept up to isomorphism, in insertion order."""

    def __init__(self, graphs: Iterable[Graph] = ()):
        self._buckets: dict = {}
        self._items: list[Graph] = []
        for g in graphs:
            self.add(g)

    def find(self, g: Graph) -> Optional[Graph]:
        for h in self._buckets.get(invariant_key(g), ()):
            if isomorphic(g, h) is not None:
                return h
        return None

    def add(self, g: Graph) -> bool:
        key = invariant_key(g)
        bucket = self._buckets.setdefault(key, [])
        for h in bucket:
            if isomorphic(g, h) is not None:
                return False
        bucket.append(g)
        self._items.append(g)
        return True

    def discard(self, g: Graph):
        bucket = self._buckets.get(invariant_key(g), [])
        for i, h in enumerate(bucket):
            if isomorphic(g, h) is not None:
                bucket.pop(i)
                self._items.remove(h)
                return

    def __contains__(self, g: Graph) -> bool:
        return self.find(g) is not None

    def __iter__(self):
        return iter(self._items)

    def __len__(self):
        return len(self._items)

    def __bool__(self):
        return bool(self._items)

    def update(self, graphs: Iterable[Graph]):
        for g in graphs:
            self.add(g)


def _rewrites(match: Match, comp: _Compiled, g: Graph, ctx: GraphCtx):
    if not comp.rhs_only:
        for res in _rewrite(match, g, ctx):
            yield match, res
        return
    domains = [[val for val in ctx.label_domain(None)
                if V.has_type(comp.types.get(v, "list"), val)] for v in comp.rhs_only]
    for combo in itertools.product(*domains):
        labels = match.assignment.labels + tuple(zip(comp.rhs_only, combo))
        m2 = Match(match.rule, match.morphism,
                   LabelAssignment(labels, match.assignment.node_marks,
                                   match.assignment.edge_marks))
        for res in _rewrite(m2, g, ctx):
            yield m2, res


def apply(rule: AnyRule, g: Graph, universe: LabelUniverse = DEFAULT_UNIVERSE) -> list[Graph]:
    """All results of applying ``rule`` to ``g``, up to isomorphism."""
    return list(_apply(rule, g, universe))


def _apply(rule: AnyRule, g: Graph, universe: LabelUniverse) -> GraphSet:
    ctx = GraphCtx(g, universe)
    out = GraphSet()
    for base_match in find_matches(rule, g, universe, ctx):
        if not check_dangling(base_match.rule, g, base_match.morphism):
            continue
        comp = _compiled(base_match.rule)
        for match, (h, co) in _rewrites(base_match, comp, g, ctx):
            if comp.right_false:
                continue
            if comp.right is not None:
                env = dict(match.assignment.as_dict())
                for v, w in co["nodes"].items():
                    env["@" + v] = w
                for k, w in co["edges"].items():
                    env["@@" + k] = w
                if not comp.right(GraphCtx(h, universe), env):
                    continue
            out.add(h)
    return out


def apply_generalised(w: GeneralisedRule, g: Graph,
                      universe: LabelUniverse = DEFAULT_UNIVERSE) -> list[Graph]:
    """Apply a generalised rule: left-hand labels need not be simple, and a
    match counts only if the left condition holds before and the right
    condition holds after the step."""
    return apply(w, g, universe)


# -- programs -----------------------------------------------------------------

@dataclass
class ExecOutcome:
    results: list = field(default_factory=list)
    fail: bool = False
    diverged: bool = False

    def __repr__(self):
        flags = [n for n, f in (("fail", self.fail), ("diverged", self.diverged)) if f]
        return f"ExecOutcome({len(self.results)} result(s){', ' if flags else ''}{', '.join(flags)})"


class _Out:
    __slots__ = ("results", "broke", "fail", "diverged")

    def __init__(self):
        self.results = GraphSet()
        self.broke = GraphSet()
        self.fail = False
        self.diverged = False

    def absorb(self, other: "_Out"):
        self.results.update(other.results)
        self.broke.update(other.broke)
        self.fail |= other.fail
        self.diverged |= other.diverged


class Interpreter:
    """Collecting semantics of GP 2 commands over a rule table."""

    def __init__(self, rules: dict, fuel: int = 10_000,
                 universe: LabelUniverse = DEFAULT_UNIVERSE):
        self.rules = rules
        self.fuel = fuel
        self.universe = universe
        self.steps = 0

    def run(self, c: P.Command, g: Graph) -> ExecOutcome:
        limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(limit, 20_000))
        try:
            out = self._exec(c, g)
        finally:
            sys.setrecursionlimit(limit)
        results = GraphSet(out.results)
        results.update(out.broke)  # break outside any loop ends the program
        return ExecOutcome(list(results), out.fail, out.diverged)

    def _rule(self, name: str):
        try:
            return self.rules[name]
        except KeyError:
            raise UnknownRule(f"no rule named {name!r}") from None

    def _exec(self, c: P.Command, g: Graph) -> _Out:
        out = _Out()
        if isinstance(c, P.Call):
            if self.steps >= self.fuel:
                out.diverged = True
                return out
            self.steps += 1
            for name in c.rules:
                out.results.update(_apply(self._rule(name), g, self.universe))
            if not out.results:
                out.fail = True
            return out
        if isinstance(c, P.Skip):
            out.results.add(g)
            return out
        if isinstance(c, P.Fail):
            out.fail = True
            return out
        if isinstance(c, P.Break):
            out.broke.add(g)
            return out
        if isinstance(c, P.Seq):
            first = self._exec(c.first, g)
            out.broke.update(first.broke)
            out.fail = first.fail
            out.diverged = first.diverged
            for h in first.results:
                out.absorb(self._exec(c.second, h))
            return out
        if isinstance(c, P.Choice):
            out.absorb(self._exec(c.left, g))
            out.absorb(self._exec(c.right, g))
            return out
        if isinstance(c, (P.If, P.Try)):
            cond = self._exec(c.cond, g)
            reached = GraphSet(cond.results)
            reached.update(cond.broke)
            if cond.diverged:
                out.diverged = True
            if reached:
                if isinstance(c, P.If):
                    out.absorb(self._exec(c.then, g))
                else:
                    for h in reached:
                        out.absorb(self._exec(c.then, h))
            if cond.fail:
                out.absorb(self._exec(c.orelse, g))
            return out
        if isinstance(c, P.Loop):
            return self._loop(c.body, g)
        raise TypeError(f"not a command: {c!r}")

    def _loop(self, body: P.Command, g: Graph) -> _Out:
        out = _Out()
        done = GraphSet()
        on_path = GraphSet()

        def visit(h: Graph):
            if h in on_path:
                out.diverged = True  # a cycle: the loop can run forever
                return
            if h in done:
                return
            on_path.add(h)
            ob = self._exec(body, h)
            if ob.fail:
                out.results.add(h)
            out.results.update(ob.broke)
            out.diverged |= ob.diverged
            for k in ob.results:
                visit(k)
            on_path.discard(h)
            done.add(h)

        visit(g)
        return out


def execute(program: P.Command, g: Graph, rules: dict, fuel: int = 10_000,
            universe: LabelUniverse = DEFAULT_UNIVERSE) -> ExecOutcome:
    """Run ``program`` on ``g`` exploring every nondeterministic choice."""
    return Interpreter(rules, fuel, universe).run(program, g)
