import pytest

from gpverify import formula as F
from gpverify import library
from gpverify import program as P
from gpverify.bounded import GraphBound, enumerate_hosts
from gpverify.calculus import (classify, fail_iteration, fail_lf, is_control, is_iteration,
                               is_non_failing, slp_lf, success_lf, wlp_lf)
from gpverify.engine import execute
from gpverify.errors import GPError, NotLoopFree
from gpverify.fol import equal_canonical
from gpverify.semantics import GraphCtx, LabelUniverse, evaluate

TC = library.two_colouring()
R = TC.rules
cmd = TC.command


# -- classification ----------------------------------------------------------------

def test_loop_and_its_body():
    node = classify(cmd("unmark!"), R)
    assert node.non_failing and not node.loop_free
    (body,) = node.children
    assert body.loop_free and body.iteration


def test_init_then_colour_loop_is_an_iteration_command():
    node = classify(cmd("init; Colour!"), R)
    assert node.iteration and not node.loop_free and not node.non_failing


def test_fail_is_loop_free_but_can_fail():
    node = classify(P.FAIL, R)
    assert node.loop_free and node.iteration and not node.non_failing


def test_whole_program_is_a_control_command():
    assert is_control(TC.main, R)
    assert is_non_failing(TC.main, R) and is_iteration(TC.main, R)


def test_loop_followed_by_a_failing_rule_is_not_an_iteration():
    assert not is_iteration(cmd("init!; init"), R)
    assert is_iteration(cmd("(init!; init)!"), R)
    assert not is_control(cmd("(init!; init)!"), R)


def test_skip_and_loops_never_fail():
    for c in ("skip", "init!", "init!; unmark!", "if init then skip else skip"):
        assert is_non_failing(cmd(c), R), c
    for c in ("init", "fail", "init; skip"):
        assert not is_non_failing(cmd(c), R), c


# -- formulas for success and failure ---------------------------------------------

def test_skip_always_succeeds():
    assert success_lf(P.SKIP, R) == F.TRUE
    assert fail_lf(P.SKIP, R) == F.FALSE


def test_fail_never_succeeds():
    assert success_lf(P.FAIL, R) == F.FALSE
    assert fail_lf(P.FAIL, R) == F.TRUE


def test_non_failing_iteration_has_a_false_fail_formula():
    assert fail_iteration(P.SKIP, R) == F.FALSE
    assert fail_iteration(cmd("unmark!"), R) == F.FALSE


def test_slp_of_skip_is_the_precondition():
    c = library.formula("c")
    assert equal_canonical(slp_lf(c, P.SKIP, R), c)


def test_wlp_of_fail_is_true():
    assert wlp_lf(P.FAIL, library.formula("d"), R) == F.TRUE


def test_loops_are_refused_by_the_loop_free_constructions():
    for fn in (lambda: success_lf(cmd("init!"), R), lambda: slp_lf(F.TRUE, cmd("init!"), R),
               lambda: wlp_lf(cmd("init!"), F.TRUE, R)):
        with pytest.raises(NotLoopFree):
            fn()


def test_fail_iteration_refuses_non_iterations():
    with pytest.raises(GPError):
        fail_iteration(cmd("init!; init"), R)


# -- agreement with the interpreter --------------------------------------------------

BOUND = GraphBound(max_nodes=3, max_edges=2, node_marks=("none", "red", "blue"),
                   edge_marks=("none",), roots=(False,))
U = LabelUniverse(int_range=(0, 1), chars=(), max_string_len=0, max_list_len=1)
HOSTS = list(enumerate_hosts(BOUND))

LOOP_FREE = ["init", "Colour", "Illegal", "unmark", "init; Colour", "if init then unmark",
             "try Colour then init else unmark", "init or fail", "Illegal; unmark"]


@pytest.mark.parametrize("text", LOOP_FREE)
def test_success_and_fail_match_execution(text):
    c = cmd(text)
    s, fl = success_lf(c, R), fail_lf(c, R)
    for g in HOSTS:
        out = execute(c, g, R, universe=U)
        ctx = GraphCtx(g, U)
        assert evaluate(s, ctx) == bool(out.results), text
        assert evaluate(fl, ctx) == out.fail, text


@pytest.mark.parametrize("text", ["init; Colour!", "unmark!", "Colour!", "Illegal; unmark!"])
def test_fail_of_iterations_matches_execution(text):
    c = cmd(text)
    fl = fail_iteration(c, R)
    for g in HOSTS:
        out = execute(c, g, R, universe=U)
        assert evaluate(fl, g, U) == out.fail, text


@pytest.mark.parametrize("text", ["init; Colour", "if Illegal then unmark", "init or skip"])
@pytest.mark.parametrize("pre", ["c", "f", "true"])
def test_loop_free_slp_and_wlp_are_sound(text, pre):
    c = cmd(text)
    cond = F.TRUE if pre == "true" else library.formula(pre)
    post = slp_lf(cond, c, R)
    d = library.formula("f")
    w = wlp_lf(c, d, R)
    for g in HOSTS:
        out = execute(c, g, R, universe=U)
        if evaluate(cond, g, U):
            assert all(evaluate(post, h, U) for h in out.results)
        assert evaluate(w, g, U) == all(evaluate(d, h, U) for h in out.results)
