"""The program duplicate!; delete! empties any graph of isolated unmarked
nodes, yet no first-order invariant between the two loops can say "an even
number of grey nodes".  The proof attempt below fails with a concrete
counterexample, and the calculus refuses loops outright."""
from gpverify import library
from gpverify.bounded import GraphBound
from gpverify.calculus import slp_lf
from gpverify.errors import NotLoopFree
from gpverify.proof import check_proof, load_script

pf = library.duplicate_delete()
try:
    slp_lf(library.formula("c"), pf.main, pf.rules)
except NotLoopFree as exc:
    print("Slp of the whole program:", type(exc).__name__, "-", exc)

report = check_proof(load_script(library.text("dupdel_weak.gps")), GraphBound(3, 4))
print(report.render())
