"""Run the 2-colouring program, then replay its partial-correctness proof
at a small bound (pass --full for 3 nodes and 4 edges, about two minutes)."""
import sys

from gpverify import library
from gpverify.bounded import GraphBound
from gpverify.engine import execute
from gpverify.frontend import parse_graph, print_graph
from gpverify.proof import check_proof, load_script

prog = library.two_colouring()
square = parse_graph("node 1 0 none\nnode 2 0 none\nnode 3 0 none\nnode 4 0 none\n"
                     "edge a 1 2 0 none\nedge b 2 3 0 none\nedge c 3 4 0 none\nedge d 4 1 0 none\n")
triangle = parse_graph("node 1 0 none\nnode 2 0 none\nnode 3 0 none\n"
                       "edge a 1 2 0 none\nedge b 2 3 0 none\nedge c 3 1 0 none\n")
for name, g in (("square", square), ("triangle", triangle)):
    out = execute(prog.main, g, prog.rules)
    print(f"{name}: {len(out.results)} result(s); first one:")
    print(print_graph(out.results[0]))

bound = GraphBound(3, 4) if "--full" in sys.argv else GraphBound(2, 2)
report = check_proof(load_script(library.text("twocolouring.gps")), bound)
print(report.render())
