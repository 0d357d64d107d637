"""Command-line interface: ``gpverify <command> ...``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .bounded import GraphBound
from .calculus import classify, fail_iteration, slp_lf, success_lf, wlp_lf
from .engine import execute
from .errors import GPError
from .frontend import (parse_formula, parse_graph, parse_program_file, parse_rules,
                       print_formula, print_graph, print_program)
from .proof import check_proof, load_script_file
from .semantics import LabelUniverse
from .slp import slp_rule, wlp_rule


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _int_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split("..")
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a..b, got {text!r}") from None


def _universe(args) -> LabelUniverse:
    d = LabelUniverse()
    return LabelUniverse(int_range=args.int_range or d.int_range,
                         chars=tuple(args.chars) if args.chars is not None else d.chars,
                         max_string_len=d.max_string_len if args.max_string_len is None else args.max_string_len,
                         max_list_len=d.max_list_len if args.max_list_len is None else args.max_list_len)


def _pick_rule(path: str, name):
    rules = parse_rules(_read(path))
    if name is None:
        if len(rules) != 1:
            raise GPError(f"{path} defines {len(rules)} rules; choose one with --rule")
        return next(iter(rules.values()))
    if name not in rules:
        raise GPError(f"{path} has no rule {name!r}")
    return rules[name]


def _program(args):
    pf = parse_program_file(_read(args.program_file))
    cmd = pf.command(args.expr) if args.expr else pf.main
    return pf, cmd


# -- subcommands ----------------------------------------------------------------

def cmd_run(args) -> int:
    pf, cmd = _program(args)
    out = execute(cmd, parse_graph(_read(args.host)), pf.rules, args.fuel, _universe(args))
    shown = out.results if args.all else out.results[:1]
    for i, g in enumerate(shown):
        if i:
            print("---")
        print(print_graph(g), end="")
    if out.fail:
        print("FAIL")
    if out.diverged:
        print("DIVERGED")
    return 0


def _transformer(args, kind: str) -> int:
    given = parse_formula(_read(args.formula))
    if args.program:
        pf = parse_program_file(_read(args.source))
        cmd = pf.command(args.expr) if args.expr else pf.main
        f = slp_lf(given, cmd, pf.rules) if kind == "slp" else wlp_lf(cmd, given, pf.rules)
    else:
        r = _pick_rule(args.source, args.rule)
        f = slp_rule(given, r) if kind == "slp" else wlp_rule(given, r)
    print(print_formula(f))
    return 0


def cmd_classify(args) -> int:
    pf, cmd = _program(args)

    def show(node, depth):
        flags = ", ".join(node.flags()) or "-"
        print(f"{'  ' * depth}{print_program(node.command)}  [{flags}]")
        for ch in node.children:
            show(ch, depth + 1)

    show(classify(cmd, pf.rules), 0)
    return 0


def cmd_success(args) -> int:
    pf, cmd = _program(args)
    print(print_formula(success_lf(cmd, pf.rules)))
    return 0


def cmd_fail(args) -> int:
    pf, cmd = _program(args)
    print(print_formula(fail_iteration(cmd, pf.rules)))
    return 0


def cmd_check(args) -> int:
    script = load_script_file(args.script)
    bound = GraphBound(max_nodes=args.max_nodes, max_edges=args.max_edges)
    report = check_proof(script, bound, _universe(args), jobs=args.jobs)
    print(report.render())
    print()
    print("# path\trule\tstatus")
    for line in report.summary_lines():
        print(line)
    print(f"# verdict\t{report.verdict}")
    return report.exit_code


# -- argument parsing --------------------------------------------------------------

def _universe_flags(p):
    g = p.add_argument_group("label universe")
    g.add_argument("--int-range", type=_int_range, metavar="A..B", help="integers available to label variables")
    g.add_argument("--chars", help="characters for strings, e.g. ab")
    g.add_argument("--max-string-len", type=int, metavar="N")
    g.add_argument("--max-list-len", type=int, metavar="N")


def _program_args(p):
    p.add_argument("program_file", help=".gpp program file")
    p.add_argument("--expr", metavar="COMMAND", help="use this command instead of Main")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gpverify", description="Run GP 2 programs, compute "
                                 "pre- and postconditions, and check proof scripts.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute a program on a host graph")
    _program_args(p)
    p.add_argument("host", help=".graph host graph")
    p.add_argument("--fuel", type=int, default=10_000, help="rule applications before giving up")
    p.add_argument("--all", action="store_true", help="print every result graph")
    _universe_flags(p)
    p.set_defaults(func=cmd_run)

    for kind, what in (("slp", "strongest liberal postcondition"), ("wlp", "weakest liberal precondition")):
        p = sub.add_parser(kind, help=f"{what} of a rule or loop-free program")
        p.add_argument("source", help=".gpr rule file, or .gpp with --program")
        p.add_argument("formula", help=".fol assertion")
        p.add_argument("--rule", help="rule name when the file defines several")
        p.add_argument("--program", action="store_true", help="treat SOURCE as a program file")
        p.add_argument("--expr", metavar="COMMAND", help="with --program: use this command instead of Main")
        p.set_defaults(func=lambda a, k=kind: _transformer(a, k))

    p = sub.add_parser("classify", help="print the program-class flags of every subcommand")
    _program_args(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("success", help="formula for 'some run yields a result' (loop-free programs)")
    _program_args(p)
    p.set_defaults(func=cmd_success)

    p = sub.add_parser("fail", help="formula for 'fail is a possible outcome' (iteration commands)")
    _program_args(p)
    p.set_defaults(func=cmd_fail)

    p = sub.add_parser("check", help="check a proof script")
    p.add_argument("script", help=".gps proof script")
    p.add_argument("--max-nodes", type=int, default=3, help="node bound for implication search")
    p.add_argument("--max-edges", type=int, default=4, help="edge bound for implication search")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for implication search")
    _universe_flags(p)
    p.set_defaults(func=cmd_check)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GPError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
