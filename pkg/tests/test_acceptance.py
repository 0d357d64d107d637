"""End-to-end acceptance checks.  Each test records one PASS/FAIL line that
is repeated in the terminal summary; the assertions are strict."""
import itertools
import time

import pytest

import reference as REF
from gpverify import formula as F
from gpverify import library
from gpverify import slp as S
from gpverify.bounded import GraphBound, enumerate_hosts, equivalent_bounded, reduce_bound
from gpverify.calculus import fail_iteration, fail_lf, success_lf
from gpverify.cli import main as cli_main
from gpverify.engine import apply, execute
from gpverify.fol import equal_canonical
from gpverify.frontend import Env, parse_formula, print_formula, print_graph
from gpverify.graph import Edge, Graph, Node, dedupe_isomorphic, isomorphic
from gpverify.proof import Symbol, check_proof, load_script, read_sexprs
from gpverify.semantics import GraphCtx, compiled

TC = library.two_colouring()
RULES = dict(TC.rules, **{"del": library.del_rule()})
RULE_NAMES = ["del", "init", "col_blue", "col_red", "unmark", "ill_blue", "ill_red"]


def _formula(name):
    return F.TRUE if name == "true" else F.FALSE if name == "false" else library.formula(name)


# Hosts with at most three nodes.  Marks and edge labels that neither the
# formulas nor the rule can tell apart are merged by reduce_bound; del reads
# integer edge labels, so its hosts carry three of them plus a non-integer.
def _host_bound(rule: str) -> GraphBound:
    if rule == "del":
        return GraphBound(max_nodes=3, max_edges=3, edge_labels=((1,), (2,), ("a",)))
    return GraphBound(max_nodes=3, max_edges=3)


# -- 1 ---------------------------------------------------------------------------

def test_criterion_1_golden_transformations(criterion):
    from test_slp import (DEL, GOLDEN_ADJ, GOLDEN_LIFT, GOLDEN_SHIFT, GOLDEN_SLP, GOLDEN_SPLIT,
                          L_DEL, R_DEL, q)
    t = time.perf_counter()
    got = {
        "split": (S.split(q, DEL), GOLDEN_SPLIT, L_DEL),
        "dang": (S.dang(DEL), "indeg(3) = 1 /\\ outdeg(3) = 0", L_DEL),
        "lift": (S.lift(q, DEL.generalised()), GOLDEN_LIFT, L_DEL),
        "adj": (S.adj(S.lift(q, DEL.generalised()), DEL), GOLDEN_ADJ, R_DEL),
        "shift": (S.shift(q, DEL.generalised()), GOLDEN_SHIFT, R_DEL),
        "slp_rule": (S.slp_rule(q, DEL), GOLDEN_SLP, Env()),
    }
    elapsed = time.perf_counter() - t
    bad = [k for k, (f, text, env) in got.items()
           if not equal_canonical(f, parse_formula(text, env))]
    ok = not bad and elapsed < 1.0
    criterion(1, ok, f"6 transformations, mismatches {bad or 'none'}, {elapsed:.3f} s")
    assert not bad
    assert elapsed < 1.0


# -- 2 ---------------------------------------------------------------------------

TABLE = [
    ("Slp(f,init)", lambda: S.slp_rule(_formula("f"), RULES["init"]), REF.SLP_F_INIT),
    ("Slp(f,col_blue)", lambda: S.slp_rule(_formula("f"), RULES["col_blue"]), REF.SLP_F_COL),
    ("Slp(f,col_red)", lambda: S.slp_rule(_formula("f"), RULES["col_red"]), REF.SLP_F_COL),
    ("Slp(f,unmark)", lambda: S.slp_rule(_formula("f"), RULES["unmark"]), REF.SLP_F_UNMARK),
    ("Fail(Colour)", lambda: fail_lf(TC.command("Colour"), RULES), REF.FAIL_COLOUR),
    ("Fail(init;Colour!)", lambda: fail_iteration(TC.command("init; Colour!"), RULES),
     REF.FAIL_INIT_COLOUR),
    ("Fail(unmark)", lambda: fail_lf(TC.command("unmark"), RULES), REF.FAIL_UNMARK),
    ("Fail(Illegal)", lambda: fail_lf(TC.command("Illegal"), RULES), REF.FAIL_ILLEGAL),
    ("Success(Illegal)", lambda: success_lf(TC.command("Illegal"), RULES), REF.SUCCESS_ILLEGAL),
]


@pytest.mark.slow
def test_criterion_2_table_reproduction(criterion):
    t = time.perf_counter()
    disagree = []
    for name, build, text in TABLE:
        v = equivalent_bounded(build(), parse_formula(text), GraphBound(max_nodes=3, max_edges=4))
        if not v.holds:
            cex = print_graph(v.counterexample).strip().replace("\n", "; ")
            disagree.append(f"{name} on [{cex}]")
    elapsed = time.perf_counter() - t
    ok = not disagree and elapsed < 600
    criterion(2, ok, f"{len(TABLE) - len(disagree)}/{len(TABLE)} entries agree up to 3 nodes, "
                     f"4 edges in {elapsed:.0f} s" + (f"; disagreements: {', '.join(disagree)}"
                                                        if disagree else ""))
    assert not disagree
    assert elapsed < 600


# -- 3 and 4 ------------------------------------------------------------------------

def _violations_slp(pre_name, rule_name):
    pre, r = _formula(pre_name), RULES[rule_name]
    post = S.slp_rule(pre, r)
    bound = reduce_bound(_host_bound(rule_name), [pre, post], rules=[r])
    fpre, fpost = compiled(pre), compiled(post)
    bad, n = [], 0
    for g in enumerate_hosts(bound):
        n += 1
        if fpre(GraphCtx(g), {}):
            for h in apply(r, g):
                if not fpost(GraphCtx(h), {}):
                    bad.append((g, h))
    return bad, n


def _violations_wlp(post_name, rule_name):
    post, r = _formula(post_name), RULES[rule_name]
    pre = S.wlp_rule(post, r)
    bound = reduce_bound(_host_bound(rule_name), [pre, post], rules=[r])
    fpre, fpost = compiled(pre), compiled(post)
    bad, n = [], 0
    for g in enumerate_hosts(bound):
        n += 1
        expected = all(fpost(GraphCtx(h), {}) for h in apply(r, g))
        if fpre(GraphCtx(g), {}) != expected:
            bad.append(g)
    return bad, n


@pytest.mark.slow
def test_criterion_3_slp_soundness_suite(criterion):
    total, bad = 0, []
    for pre in ["q", "c", "f", "true"]:
        for r in RULE_NAMES:
            v, n = _violations_slp(pre, r)
            total += n
            bad += [(pre, r)] * len(v)
    criterion(3, not bad, f"28 rule/precondition pairs over {total} hosts, "
                          f"{len(bad)} violations")
    assert not bad


@pytest.mark.slow
def test_criterion_4_wlp_exactness_suite(criterion):
    total, bad = 0, []
    for post in ["d", "f", "true", "false"]:
        for r in RULE_NAMES:
            v, n = _violations_wlp(post, r)
            total += n
            bad += [(post, r)] * len(v)
    criterion(4, not bad, f"28 rule/postcondition pairs over {total} hosts, "
                          f"{len(bad)} violations")
    assert not bad


# -- 5 ---------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_5_success_and_fail_agree_with_runs(criterion):
    cases = [(t, success_lf(TC.command(t), RULES), fail_lf(TC.command(t), RULES))
             for t in ("Colour", "Illegal", "init")]
    cases.append(("init; Colour!", None, fail_iteration(TC.command("init; Colour!"), RULES)))
    formulas = [f for _, s, fl in cases for f in (s, fl) if f is not None]
    bound = reduce_bound(GraphBound(max_nodes=3, max_edges=3), formulas,
                         rules=[RULES[n] for n in RULE_NAMES[1:]])
    bad, n = [], 0
    for g in enumerate_hosts(bound):
        n += 1
        ctx = GraphCtx(g)
        for text, s, fl in cases:
            out = execute(TC.command(text), g, RULES)
            if s is not None and compiled(s)(ctx, {}) != bool(out.results):
                bad.append(("Success", text))
            if compiled(fl)(ctx, {}) != out.fail:
                bad.append(("Fail", text))
    criterion(5, not bad, f"4 commands over {n} hosts, {len(bad)} disagreements")
    assert not bad


# -- 6 ---------------------------------------------------------------------------

def _mutate_subtree_one(forms):
    def swap(x):
        if isinstance(x, list):
            return [swap(y) for y in x]
        return Symbol("e") if x == Symbol("f") else x
    out = []
    for form in forms:
        if isinstance(form, list) and len(form) == 3 and form[1] == Symbol("subtree-I"):
            form = [form[0], form[1], swap(form[2])]
        out.append(form)
    return out


@pytest.mark.slow
def test_criterion_6_two_colouring_proof_replay(criterion):
    bound = GraphBound(max_nodes=3, max_edges=4)
    forms = read_sexprs(library.text("twocolouring.gps"))
    rep = check_proof(load_script(forms), bound)
    cons_ok = all(o.status in ("exact", "bounded") for o in rep.obligations)
    mutated = _mutate_subtree_one(forms)
    assert mutated != forms
    mrep = check_proof(load_script(mutated), bound)
    ok = rep.verdict == "checked-with-bounded-obligations" and cons_ok and \
        mrep.verdict == "rejected"
    criterion(6, ok, f"verdict {rep.verdict} with {len(rep.bounded_obligations)} bounded and "
                     f"{len(rep.obligations) - len(rep.bounded_obligations)} exact obligations; "
                     f"f->e in subtree I gives {mrep.verdict} ({mrep.reason})")
    assert rep.verdict == "checked-with-bounded-obligations"
    assert cons_ok
    assert mrep.verdict == "rejected"


# -- 7 ---------------------------------------------------------------------------

def _components_and_parity(g: Graph):
    colour, ok = {}, True
    adj = {v: [] for v in g.nodes}
    for e in g.edges.values():
        adj[e.src].append(e.tgt)
        adj[e.tgt].append(e.src)
        if e.src == e.tgt:
            ok = False
    comps = 0
    for v in g.nodes:
        if v in colour:
            continue
        comps += 1
        colour[v], stack = 0, [v]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in colour:
                    colour[y] = 1 - colour[x]
                    stack.append(y)
                elif colour[y] == colour[x]:
                    ok = False
    return comps, ok


def _odd_cycles():
    out = []
    for n in (3, 5):
        for dirs in itertools.product((0, 1), repeat=n):
            nodes = {str(i): Node((0,), "none") for i in range(n)}
            edges = {}
            for i, d in enumerate(dirs):
                a, b = str(i), str((i + 1) % n)
                edges[f"e{i}"] = Edge(a, b, (0,), "none") if d else Edge(b, a, (0,), "none")
            out.append(Graph(nodes, edges))
    return dedupe_isomorphic(out)


@pytest.mark.slow
def test_criterion_7_two_colouring_interpreter(criterion):
    d = library.formula("d")
    unmarked = GraphBound(max_nodes=4, max_edges=4, node_marks=("none",), edge_marks=("none",),
                          roots=(False,), min_nodes=1)
    bip = [g for g in enumerate_hosts(unmarked) if _components_and_parity(g) == (1, True)]
    problems = []
    for g in bip:
        out = execute(TC.main, g, RULES, fuel=10_000)
        if out.diverged or out.fail or not out.results:
            problems.append(("bipartite run", g))
        elif not all(compiled(d)(GraphCtx(h), {}) for h in out.results):
            problems.append(("not d", g))
    cycles = _odd_cycles()
    for g in cycles:
        out = execute(TC.main, g, RULES, fuel=10_000)
        if out.diverged or out.fail or not out.results:
            problems.append(("cycle run", g))
        elif not all(isomorphic(h, g) is not None for h in out.results):
            problems.append(("not restored", g))
    criterion(7, not problems, f"{len(bip)} connected bipartite hosts and {len(cycles)} "
                               f"oriented odd cycles, {len(problems)} problems")
    assert not problems


# -- 8 ---------------------------------------------------------------------------

def test_criterion_8_loops_are_out_of_reach(criterion, capsys):
    code = cli_main(["slp", "--program", str(library.path("dupdel.gpp")),
                     str(library.path("c.fol"))])
    err = capsys.readouterr().err
    refused = code == 1 and "NotLoopFree" in err
    rep = check_proof(load_script(library.text("dupdel_weak.gps")),
                      GraphBound(max_nodes=3, max_edges=4))
    failed = [o for o in rep.obligations if o.status == "failed"]
    ok = refused and rep.verdict == "rejected" and bool(failed)
    cex = print_graph(failed[0].verdict.counterexample).strip() if failed else "-"
    criterion(8, ok, f"slp --program exit {code} ({err.strip()}); weak proof {rep.verdict}, "
                     f"failed obligation at {failed[0].path if failed else '-'} on [{cex}]")
    assert refused
    assert rep.verdict == "rejected" and failed
