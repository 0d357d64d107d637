import itertools

import pytest
from hypothesis import given, settings

from gpverify import formula as F
from gpverify import library
from gpverify.bounded import GraphBound, enumerate_hosts, equivalent_bounded, implies_bounded
from gpverify.errors import KindMismatch, UnboundVariable
from gpverify.fol import alpha_equivalent, equal_canonical, simplify, substitute
from gpverify.frontend import Env, parse_formula, parse_graph
from gpverify.semantics import GraphCtx, LabelUniverse, evaluate

from strategies import formulas

x = F.Var("x", F.NODE)
xe = F.Var("x", F.EDGE)
TINY = LabelUniverse(int_range=(0, 1), chars=("a",), max_string_len=1, max_list_len=1)


# -- substitution -------------------------------------------------------------------

def test_substitute_a_free_node_variable():
    c = F.Cmp("!=", F.MarkOf(F.NODE, x), F.MarkConst("none"))
    out = substitute(c, "x", F.NodeId("1"))
    assert out == F.Cmp("!=", F.MarkOf(F.NODE, F.NodeId("1")), F.MarkConst("none"))


def test_substitute_an_endpoint_pattern():
    c = F.Cmp("!=", F.MarkOf(F.NODE, F.Endpoint("s", xe)), F.MarkConst("none"))
    v1 = F.NodeId("v1")
    out = substitute(c, {F.Endpoint("s", xe): v1})
    assert out == F.Cmp("!=", F.MarkOf(F.NODE, v1), F.MarkConst("none"))


def test_binder_of_the_same_name_shadows():
    c = F.Exists(F.NODE, "x", F.Root(x))
    assert substitute(c, "x", F.NodeId("1")) == c


def test_capture_is_avoided_by_renaming():
    y = F.Var("y", F.NODE)
    c = F.Exists(F.NODE, "y", F.Cmp("!=", x, y))
    out = substitute(c, {x: y})
    assert isinstance(out, F.Exists) and out.var != "y"
    assert out.body == F.Cmp("!=", y, F.Var(out.var, F.NODE))


def test_sort_mismatch_is_refused():
    with pytest.raises(KindMismatch):
        substitute(F.Root(x), {x: F.EdgeId("e1")})


# -- evaluation -----------------------------------------------------------------------

def test_true_holds_everywhere():
    for g in itertools.islice(enumerate_hosts(GraphBound(2, 1)), 50):
        assert evaluate(F.TRUE, g)


def test_q_on_a_single_edge():
    q = library.formula("q")
    g = parse_graph("node 1 0 none\nnode 2 0 none\nedge e 1 2 0 none\n")
    assert evaluate(q, g)
    marked = parse_graph("node 1 0 red\nnode 2 0 none\nedge e 1 2 0 none\n")
    assert not evaluate(q, marked)


def test_d_fails_on_a_red_blue_red_triangle():
    d = library.formula("d")
    g = parse_graph("node 1 0 red\nnode 2 0 blue\nnode 3 0 red\n"
                    "edge a 1 2 0 none\nedge b 2 3 0 none\nedge c 3 1 0 none\n")
    assert not evaluate(d, g)
    ok = parse_graph("node 1 0 red\nnode 2 0 blue\nedge a 1 2 0 none\n")
    assert evaluate(d, ok)


def test_free_variables_take_values_from_the_assignment():
    g = parse_graph("node 1 0 red\nnode 2 0 none\n")
    c = F.Cmp("=", F.MarkOf(F.NODE, x), F.MarkConst("red"))
    assert evaluate(c, g, alpha={"x": "1"})
    assert not evaluate(c, g, alpha={"x": "2"})


def test_unbound_variable_is_an_error():
    with pytest.raises(UnboundVariable):
        evaluate(F.Root(x), parse_graph("node 1 0 none\n"))


def test_division_by_zero_makes_the_atom_false():
    g = parse_graph("node 1 3 none\n")
    atom = parse_formula("existsV x (lV(x) / 0 = 1)")
    neg = parse_formula("existsV x (~(lV(x) / 0 = 1))")
    assert not evaluate(atom, g)
    assert evaluate(neg, g)


def test_any_mark_matches_every_mark():
    g = parse_graph("node 1 0 grey\n")
    assert evaluate(parse_formula("existsV x (mV(x) = any)"), g)
    assert not evaluate(parse_formula("existsV x (mV(x) = any)"), parse_graph("node 1 0 none\n"))


def test_constants_denote_graph_items():
    env = Env(frozenset({"1", "2"}), frozenset({"e1"}))
    c = parse_formula("s(e1) = 1 /\\ t(e1) = 2 /\\ mV(2) = blue", env)
    g = parse_graph("node 1 0 none\nnode 2 0 blue\nedge e1 1 2 0 none\n")
    assert evaluate(c, g)


# -- simplification ------------------------------------------------------------------

def test_ground_mark_comparison_is_evaluated():
    phi = parse_formula("existsV x (root(x))")
    c = F.Not(F.Or((F.Cmp("!=", F.MarkConst("none"), F.MarkConst("none")), phi)))
    assert simplify(c) == simplify(F.Not(phi))


def test_double_negation_of_true():
    assert simplify(F.Not(F.Not(F.TRUE))) == F.TRUE


@pytest.mark.parametrize("c, expected", [
    (F.And((F.TRUE, F.Root(F.NodeId("1")))), F.Root(F.NodeId("1"))),
    (F.And((F.FALSE, F.Root(F.NodeId("1")))), F.FALSE),
    (F.Or((F.TRUE, F.Root(F.NodeId("1")))), F.TRUE),
    (F.Or((F.FALSE, F.Root(F.NodeId("1")))), F.Root(F.NodeId("1"))),
    (F.Not(F.FALSE), F.TRUE),
    (F.Cmp("=", F.Arith("+", F.IntLit(2), F.IntLit(3)), F.IntLit(5)), F.TRUE),
])
def test_simplification_rules(c, expected):
    assert simplify(c) == expected


def test_simplify_reaches_a_fixpoint():
    f = parse_formula("~(~(true /\\ existsV x (root(x))) \\/ false)")
    once = simplify(f)
    assert simplify(once) == once


SAMPLE = list(enumerate_hosts(GraphBound(max_nodes=2, max_edges=2, node_marks=("none", "red"),
                                         edge_marks=("none", "red"), node_labels=((0,), (1,)))))


@given(formulas())
@settings(max_examples=150, deadline=None)
def test_simplify_preserves_truth_on_small_graphs(f):
    s = simplify(f)
    for g in SAMPLE:
        ctx = GraphCtx(g, TINY)
        assert evaluate(f, ctx) == evaluate(s, ctx)


@given(formulas())
@settings(max_examples=100, deadline=None)
def test_canonical_equality_implies_equal_truth(f):
    s = simplify(f)
    if equal_canonical(f, s):
        for g in SAMPLE[:40]:
            assert evaluate(f, g, TINY) == evaluate(s, g, TINY)


def test_alpha_equivalence_ignores_bound_names():
    a = parse_formula("existsV x (root(x))")
    b = parse_formula("existsV y (root(y))")
    assert alpha_equivalent(a, b) and a != b


# -- bounded implication ------------------------------------------------------------

def test_implication_into_a_disjunction_has_no_counterexample():
    c, d = library.formula("c"), library.formula("d")
    v = implies_bounded(c, F.Or((c, d)), GraphBound(3, 3))
    assert v.holds and v.counterexample is None and v.checked > 0


def test_d_does_not_imply_c():
    c, d = library.formula("c"), library.formula("d")
    v = implies_bounded(d, c, GraphBound(1, 0))
    assert not v.holds
    g = v.counterexample
    assert len(g.nodes) == 1 and not g.edges
    (n,) = g.nodes.values()
    assert n.mark in ("red", "blue")
    assert evaluate(d, g) and not evaluate(c, g)


def test_counterexample_is_minimal_in_size():
    f = parse_formula("existsV x, y (x != y /\\ mV(x) = red /\\ mV(y) = red)")
    v = implies_bounded(F.TRUE, F.Not(f), GraphBound(3, 0))
    assert not v.holds and len(v.counterexample.nodes) == 2


def test_equivalence_of_de_morgan_forms():
    a = parse_formula("~(existsV x (root(x)) \\/ existsE y (mE(y) = red))")
    b = parse_formula("forallV x (~root(x)) /\\ forallE y (mE(y) != red)")
    assert equivalent_bounded(a, b, GraphBound(3, 3)).holds


def test_substitution_lemma_on_small_graphs():
    # c[x -> 1] holds in G exactly when c holds with x assigned node 1
    c = parse_formula("mV(x) = red /\\ existsE e (s(e) = x)", Env())
    c = F.Exists(F.NODE, "x", c).body
    inst = substitute(c, "x", F.NodeId("1"))
    for g in SAMPLE:
        if "1" in g.nodes:
            assert evaluate(inst, g) == evaluate(c, g, alpha={"x": "1"})
