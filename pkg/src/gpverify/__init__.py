"""Verification toolkit for GP 2 graph programs.

Strongest liberal postconditions and weakest liberal preconditions of rule
schemata as first-order formulas, an interpreter for GP 2 programs, and a
checker for Hoare-style proof trees whose implication side conditions are
discharged by exhaustive search over small graphs.
"""
from .bounded import GraphBound, Verdict, equivalent_bounded, implies_bounded
from .calculus import classify, fail_iteration, fail_lf, slp_lf, success_lf, wlp_lf
from .engine import ExecOutcome, apply, apply_generalised, execute, find_matches
from .fol import canonical, equal_canonical, simplify, substitute
from .frontend import (parse_formula, parse_graph, parse_program, parse_program_file,
                       parse_rule, parse_rules, print_formula, print_graph, print_program)
from .graph import Edge, Graph, Node, isomorphic, replacement_graph
from .proof import CheckReport, check_proof, load_script, load_script_file
from .semantics import DEFAULT_UNIVERSE, LabelUniverse, evaluate
from .slp import slp_rule, wlp_rule

__version__ = "0.1.0"
