"""Strongest liberal postcondition of the rule del, one construction step
at a time, followed by a check of the result on a concrete rewrite."""
from gpverify import library, slp
from gpverify.engine import apply
from gpverify.frontend import parse_graph, print_formula, print_graph
from gpverify.semantics import evaluate

rule = library.del_rule()
q = library.formula("q")           # no edge leaves a marked node
w = rule.generalised()

steps = [
    ("Split(q, del)", slp.split(q, rule)),
    ("Dang(del)", slp.dang(rule)),
    ("Lift(q, del)", slp.lift(q, w)),
    ("Adj(Lift(q, del), del)", slp.adj(slp.lift(q, w), rule)),
    ("Shift(q, del)", slp.shift(q, w)),
    ("Slp(q, del)", slp.slp_rule(q, rule)),
]
for name, f in steps:
    print(f"{name}:\n  {print_formula(f)}\n")

host = parse_graph("node n1 0 none\nnode n2 1 none\nnode n3 2 none\n"
                   "edge x1 n1 n2 5 none\nedge x2 n1 n3 3 none\n")
post = steps[-1][1]
for h in apply(rule, host):
    print("result of del:\n" + print_graph(h))
    print("satisfies Slp(q, del):", evaluate(post, h))
