import pytest

from gpverify import formula as F
from gpverify import library
from gpverify.bounded import GraphBound, enumerate_hosts
from gpverify.calculus import success_lf
from gpverify.engine import execute
from gpverify.errors import NotControlProgram, ParseError
from gpverify.frontend import parse_formula
from gpverify.proof import (HoareTriple, Keyword, Obligation, ProofNode, Symbol, check_proof,
                            discharge, load_script, read_sexprs)
from gpverify.semantics import evaluate
from gpverify.slp import slp_rule

TC = library.two_colouring()
R = TC.rules
c, d, e, f = (library.formula(n) for n in "cdef")
SMALL = GraphBound(max_nodes=2, max_edges=2)


# -- reader ----------------------------------------------------------------------

def test_reader_distinguishes_symbols_keywords_and_strings():
    (form,) = read_sexprs('(cons :pre c "a /\\\\ b" ; comment\n (x))')
    assert form[0] == "cons" and isinstance(form[0], Symbol)
    assert isinstance(form[1], Keyword) and form[1] == "pre"
    assert form[3] == "a /\\ b" and not isinstance(form[3], Symbol)
    assert form[4] == [Symbol("x")]


def test_reader_keeps_conjunction_backslashes():
    (s,) = read_sexprs(r'"mV(x) = red /\ root(x)"')
    assert s == r"mV(x) = red /\ root(x)"


def test_unbalanced_parentheses_are_a_parse_error():
    with pytest.raises(ParseError):
        read_sexprs("(cons :pre c")


def test_program_must_come_first():
    with pytest.raises(ParseError):
        load_script('(:let c "true") (:program "twocolouring.gpp")')


# -- obligations ---------------------------------------------------------------------

def test_disjunction_weakening_is_exact():
    ob = discharge(Obligation("1:post", c, F.Or((c, d))))
    assert ob.status == "exact"


def test_postcondition_of_unmark_implies_f():
    post = slp_rule(f, R["unmark"])
    ob = discharge(Obligation("1:pre", post, f), GraphBound(3, 4))
    assert ob.status == "bounded" and ob.verdict.holds


def test_failed_obligation_carries_a_counterexample():
    ob = discharge(Obligation("1:post", d, c), SMALL)
    assert ob.status == "failed"
    g = ob.verdict.counterexample
    assert evaluate(d, g) and not evaluate(c, g)


# -- structural checks -------------------------------------------------------------

def _leaf(pre, prog, post):
    return ProofNode("ruleapp-slp", HoareTriple(pre, TC.command(prog), post))


def test_mismatched_leaf_postcondition_is_rejected():
    rep = check_proof(_leaf(f, "init", F.TRUE), SMALL, rules=R)
    assert rep.verdict == "rejected" and rep.exit_code == 1
    assert rep.nodes[0].status == "rejected"


def test_exact_rule_application_is_checked():
    rep = check_proof(_leaf(f, "init", slp_rule(f, R["init"])), SMALL, rules=R)
    assert rep.verdict == "checked" and rep.exit_code == 0 and rep.obligations == []


def test_rule_application_needs_a_single_rule():
    rep = check_proof(_leaf(f, "Colour", F.TRUE), SMALL, rules=R)
    assert rep.verdict == "rejected"


def test_non_control_program_is_refused():
    t = _leaf(F.TRUE, "(init!; init)!", F.TRUE)
    with pytest.raises(NotControlProgram):
        check_proof(t, SMALL, rules=R)


def test_composition_midpoint_must_agree():
    a = _leaf(f, "init", slp_rule(f, R["init"]))
    b = _leaf(f, "unmark", slp_rule(f, R["unmark"]))
    t = ProofNode("comp", HoareTriple(f, TC.command("init; unmark"), b.conclusion.post), [a, b])
    rep = check_proof(t, SMALL, rules=R)
    assert rep.verdict == "rejected" and "1" in rep.reason


DUPLICATE_UNMARKED = """
(:program "dupdel.gpp")
(:let c "forallV x (mV(x) = none)")
(:proof
  (alap :pre c :prog "duplicate!" :post (and c (Fail "duplicate")) :break-trivial
    (cons :pre c :prog "duplicate" :post c
      (ruleapp-slp :pre c :prog "duplicate" :post (Slp c "duplicate")))))
"""


def test_broken_loop_invariant_is_rejected_with_a_counterexample():
    rep = check_proof(load_script(DUPLICATE_UNMARKED), GraphBound(2, 0))
    assert rep.verdict == "rejected"
    (bad,) = [o for o in rep.obligations if o.status == "failed"]
    g = bad.verdict.counterexample
    assert any(n.mark == "grey" for n in g.nodes.values())
    assert "counterexample" in rep.render()


def test_alap_postcondition_must_have_the_loop_exit_form():
    text = DUPLICATE_UNMARKED.replace('(and c (Fail "duplicate"))', "c")
    rep = check_proof(load_script(text), GraphBound(2, 0))
    assert rep.verdict == "rejected" and rep.nodes[0].status == "rejected"


def test_if_branches_are_checked_against_success_and_fail():
    script = load_script(library.text("twocolouring.gps"))
    sub = script.defs["subtree-II"]
    rep = check_proof(sub, SMALL, rules=R)
    assert rep.verdict == "checked-with-bounded-obligations"
    pre_then = sub.children[0].conclusion.pre
    assert pre_then == F.conj(e, success_lf(TC.command("Illegal"), R))


# -- the two-colouring proof ---------------------------------------------------------

@pytest.fixture(scope="module")
def colouring_report():
    return check_proof(load_script(library.text("twocolouring.gps")), SMALL)


def test_two_colouring_proof_checks_at_a_small_bound(colouring_report):
    rep = colouring_report
    assert rep.verdict == "checked-with-bounded-obligations" and rep.exit_code == 2
    assert all(n.status in ("ok", "ok (bounded)") for n in rep.nodes)
    assert rep.bounded_obligations
    lines = rep.summary_lines()
    assert lines[0] == "1\tcons\tok (bounded)"
    assert len(lines) == len(rep.nodes)


def test_mutated_node_is_rejected():
    text = library.text("twocolouring.gps").replace(
        '(ruleapp-slp :pre f :prog "init" :post (Slp f "init"))',
        '(ruleapp-slp :pre f :prog "init" :post (Slp f "unmark"))')
    rep = check_proof(load_script(text), SMALL)
    assert rep.verdict == "rejected"


def test_report_does_not_depend_on_worker_count():
    script = load_script(DUPLICATE_UNMARKED)
    a = check_proof(script, GraphBound(2, 0), jobs=1)
    b = check_proof(script, GraphBound(2, 0), jobs=2)
    assert a.verdict == b.verdict and a.summary_lines() == b.summary_lines()
    assert [o.status for o in a.obligations] == [o.status for o in b.obligations]


def test_checking_is_deterministic(colouring_report):
    again = check_proof(load_script(library.text("twocolouring.gps")), SMALL)
    assert again.render() == colouring_report.render()


def test_checked_proof_is_semantically_valid():
    # {f} init; unmark {Slp(Slp(f, init), unmark)} built from exact steps only.
    mid = slp_rule(f, R["init"])
    post = slp_rule(mid, R["unmark"])
    t = ProofNode("comp", HoareTriple(f, TC.command("init; unmark"), post),
                  [_leaf(f, "init", mid), _leaf(mid, "unmark", post)])
    rep = check_proof(t, SMALL, rules=R)
    assert rep.verdict == "checked"
    bound = GraphBound(max_nodes=3, max_edges=2, roots=(False,), edge_marks=("none",))
    for g in enumerate_hosts(bound):
        if evaluate(f, g):
            for h in execute(t.conclusion.program, g, R).results:
                assert evaluate(post, h)


def test_two_colouring_proof_is_semantically_consistent():
    # Whatever the checker accepts must agree with actual runs on small inputs.
    bound = GraphBound(max_nodes=3, max_edges=3, node_marks=("none",), edge_marks=("none",),
                       roots=(False,))
    goal = F.Or((c, d))
    for g in enumerate_hosts(bound):
        for h in execute(TC.main, g, R).results:
            assert evaluate(goal, h)


def test_let_with_equals_sign():
    text = library.text("twocolouring.gps").replace('(:let c "', '(:let c = "', 1)
    assert load_script(text).lets["c"] == c
