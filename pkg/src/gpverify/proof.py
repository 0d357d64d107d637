"""Hoare-style proof trees for GP 2 programs and their checker.

A proof is a tree of :class:`ProofNode` objects, each concluding a triple
``{pre} program {post}`` by one of the inference rules

    ruleapp-slp  ruleapp-wlp  ruleset  comp  cons  if  try  alap

Structural side conditions (such as "the post of a ruleapp-slp leaf is the
strongest liberal postcondition of its pre") are decided exactly, up to
canonical formula equality.  The implications introduced by ``cons`` are
decided exactly only when they are syntactically trivial; otherwise they
are searched for counterexamples on all small graphs, and a pass then
counts as *bounded*, never as a proof.

Proof scripts are s-expressions::

    (:program "twocolouring.gpp")
    (:let f "forall x (...)")
    (:def step (cons :pre f :prog "init" :post f (ruleapp-slp ...)))
    (:proof (comp :pre c :prog "..." :post d step (...)))
"""
from __future__ import annotations

import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Union

from . import formula as F
from . import program as P
from .bounded import GraphBound, Verdict, implies_bounded
from .calculus import fail_iteration, fail_lf, is_control, is_iteration, slp_lf, success_lf, wlp_lf
from .errors import (BreakUnsupported, GPError, NotControlProgram, NotIteration, NotLoopFree,
                     ParseError, UnknownRule)
from .fol import canonical, equal_canonical, simplify
from .frontend import ProgramFile, parse_formula, parse_program_file, print_formula, print_graph, print_program
from .semantics import DEFAULT_UNIVERSE, LabelUniverse
from .slp import slp_rule, wlp_rule

RULES = ("ruleapp-slp", "ruleapp-wlp", "ruleset", "comp", "cons", "if", "try", "alap")


# -- s-expressions ------------------------------------------------------------

class Symbol(str):
    pass


class Keyword(str):
    pass


_TOKEN = re.compile(r'\s+|;[^\n]*|(\()|(\))|"((?:[^"\\]|\\.)*)"|([^\s()";]+)')
_ESCAPE = re.compile(r'\\(["\\])')


def read_sexprs(text: str) -> list:
    """Parse every top-level s-expression in ``text``.  Strings become
    ``str`` (only ``\\"`` and ``\\\\`` are escapes, so formulas keep their
    ``/\\``), ``:name`` a :class:`Keyword`, anything else a :class:`Symbol`."""
    stack: list[list] = [[]]
    lines = [0]
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        line = text.count("\n", 0, pos) + 1
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, 1)
        pos = m.end()
        if m.group(1):
            stack.append([])
            lines.append(line)
        elif m.group(2):
            if len(stack) == 1:
                raise ParseError("unbalanced ')'", line, 1)
            done = stack.pop()
            lines.pop()
            stack[-1].append(done)
        elif m.group(3) is not None:
            stack[-1].append(_ESCAPE.sub(r"\1", m.group(3)))
        elif m.group(4):
            atom = m.group(4)
            stack[-1].append(Keyword(atom[1:]) if atom.startswith(":") else Symbol(atom))
    if len(stack) != 1:
        raise ParseError("unclosed '('", lines[-1], 1)
    return stack[0]


# -- proof objects -------------------------------------------------------------

@dataclass
class HoareTriple:
    pre: F.Formula
    program: P.Command
    post: F.Formula

    def __str__(self):
        return (f"{{{print_formula(self.pre)}}} {print_program(self.program)} "
                f"{{{print_formula(self.post)}}}")


@dataclass
class ProofNode:
    rule: str
    conclusion: HoareTriple
    children: list = field(default_factory=list)
    break_formula: F.Formula = F.FALSE
    name: str = ""


@dataclass
class Obligation:
    path: str
    antecedent: F.Formula
    consequent: F.Formula
    status: str = "pending"   # exact, bounded or failed
    verdict: Optional[Verdict] = None

    def describe(self) -> str:
        return f"{print_formula(self.antecedent)}  implies  {print_formula(self.consequent)}"


@dataclass
class NodeStatus:
    path: str
    rule: str
    status: str
    message: str = ""


@dataclass
class CheckReport:
    verdict: str
    reason: str = ""
    nodes: list = field(default_factory=list)
    obligations: list = field(default_factory=list)
    bound: Optional[GraphBound] = None

    @property
    def bounded_obligations(self) -> list:
        return [o for o in self.obligations if o.status == "bounded"]

    @property
    def exit_code(self) -> int:
        return {"checked": 0, "checked-with-bounded-obligations": 2}.get(self.verdict, 1)

    def summary_lines(self) -> list[str]:
        """One tab-separated line per node: path, rule, status."""
        return [f"{n.path}\t{n.rule}\t{n.status}" for n in self.nodes]

    def render(self) -> str:
        out = [f"verdict: {self.verdict}"]
        if self.reason:
            out.append(f"reason: {self.reason}")
        if self.bound is not None:
            out.append(f"obligation bound: {self.bound.describe()}")
        width = max((len(n.path) for n in self.nodes), default=0) + 1
        for n in self.nodes:
            out.append(f"  {n.path:<{width}} {n.rule:<12} {n.status}"
                       + (f"  {n.message}" if n.message else ""))
        for o in self.obligations:
            out.append(f"  obligation at {o.path}: {o.status}")
            out.append(f"    {o.describe()}")
            if o.verdict is not None and o.status == "bounded":
                out.append(f"    no counterexample among {o.verdict.checked} graphs")
            if o.verdict is not None and o.verdict.counterexample is not None:
                out.append(f"    counterexample: {print_graph(o.verdict.counterexample).strip()}")
        return "\n".join(out)


# -- script loading -----------------------------------------------------------

@dataclass
class Script:
    program_file: ProgramFile
    proof: ProofNode
    lets: dict = field(default_factory=dict)
    defs: dict = field(default_factory=dict)


def _fields(form: list, where: str):
    opts, rest, i = {}, [], 1
    while i < len(form):
        x = form[i]
        if isinstance(x, Keyword):
            if i + 1 < len(form) and not isinstance(form[i + 1], Keyword) and x != "break-trivial":
                opts[str(x)] = form[i + 1]
                i += 2
            else:
                opts[str(x)] = True
                i += 1
        else:
            rest.append(x)
            i += 1
    return opts, rest


class _Loader:
    def __init__(self, base: Optional[Path]):
        self.base = base
        self.pf: Optional[ProgramFile] = None
        self.lets: dict[str, F.Formula] = {}
        self.defs: dict[str, list] = {}
        self.built: dict[str, ProofNode] = {}

    def program_file(self, name: str) -> ProgramFile:
        from . import library
        p = Path(name)
        if self.base is not None and not p.is_absolute():
            p = self.base / p
        if p.is_file():
            return parse_program_file(p.read_text(encoding="utf-8"))
        try:
            return parse_program_file(library.text(name))
        except FileNotFoundError:
            raise GPError(f"program file {name!r} not found") from None

    def command(self, text) -> P.Command:
        if not isinstance(text, str) or isinstance(text, Symbol):
            raise ParseError(f"program must be a string, got {text!r}")
        return self.pf.command(text)

    def formula(self, x) -> F.Formula:
        if isinstance(x, Symbol):
            if x in self.lets:
                return self.lets[x]
            if x in ("true", "false"):
                return F.TRUE if x == "true" else F.FALSE
            raise ParseError(f"unknown assertion {x!r}")
        if isinstance(x, str):
            return parse_formula(x)
        if not isinstance(x, list) or not x or not isinstance(x[0], Symbol):
            raise ParseError(f"malformed assertion {x!r}")
        head, args = x[0], x[1:]
        rules = self.pf.rules
        if head == "and":
            return F.conj(*map(self.formula, args))
        if head == "or":
            return F.disj(*map(self.formula, args))
        if head == "not" and len(args) == 1:
            return F.Not(self.formula(args[0]))
        if head == "implies" and len(args) == 2:
            return F.disj(F.Not(self.formula(args[0])), self.formula(args[1]))
        if head == "Slp" and len(args) == 2:
            return slp_lf(self.formula(args[0]), self.command(args[1]), rules)
        if head == "Wlp" and len(args) == 2:
            return wlp_lf(self.command(args[0]), self.formula(args[1]), rules)
        if head == "Success" and len(args) == 1:
            return success_lf(self.command(args[0]), rules)
        if head == "Fail" and len(args) == 1:
            return fail_iteration(self.command(args[0]), rules)
        raise ParseError(f"unknown assertion form ({head} ...)")

    def node(self, x, name: str = "") -> ProofNode:
        if isinstance(x, Symbol):
            if x in self.built:
                return self.built[x]
            if x not in self.defs:
                raise ParseError(f"unknown proof {x!r}")
            self.built[x] = self.node(self.defs[x], str(x))
            return self.built[x]
        if not isinstance(x, list) or not x or not isinstance(x[0], Symbol):
            raise ParseError(f"malformed proof node {x!r}")
        rule = str(x[0]).replace("_", "-")
        if rule not in RULES:
            raise ParseError(f"unknown inference rule {x[0]!r}")
        opts, rest = _fields(x, rule)
        for k in ("pre", "prog", "post"):
            if k not in opts:
                raise ParseError(f"({rule} ...) needs :{k}")
        t = HoareTriple(self.formula(opts["pre"]), self.command(opts["prog"]),
                        self.formula(opts["post"]))
        brk = self.formula(opts["break"]) if "break" in opts else F.FALSE
        return ProofNode(rule, t, [self.node(c) for c in rest], brk, name)

    def load(self, forms: list) -> Script:
        proof = None
        for form in forms:
            if not isinstance(form, list) or not form or not isinstance(form[0], Keyword):
                raise ParseError(f"expected a top-level (:keyword ...) form, got {form!r}")
            kind, args = form[0], [a for a in form[1:] if a != Symbol("=")]
            if kind == "program" and len(args) == 1:
                self.pf = self.program_file(args[0])
                continue
            if self.pf is None:
                raise ParseError("(:program ...) must come first")
            if kind == "let" and len(args) == 2 and isinstance(args[0], Symbol):
                self.lets[str(args[0])] = self.formula(args[1])
            elif kind == "def" and len(args) == 2 and isinstance(args[0], Symbol):
                self.defs[str(args[0])] = args[1]
            elif kind == "proof" and len(args) == 1:
                proof = args[0]
            else:
                raise ParseError(f"malformed (:{kind} ...) form")
        if proof is None:
            raise ParseError("script has no (:proof ...) form")
        root = self.node(proof)
        return Script(self.pf, root, dict(self.lets), dict(self.built))


def load_script(text: Union[str, list], base: Optional[Path] = None) -> Script:
    """Build a proof tree from script text (or already-read s-expressions).
    Program files are looked up next to ``base`` and then among the bundled
    examples."""
    forms = read_sexprs(text) if isinstance(text, str) else text
    return _Loader(base).load(forms)


def load_script_file(path) -> Script:
    p = Path(path)
    return load_script(p.read_text(encoding="utf-8"), p.parent)


# -- checking -----------------------------------------------------------------

class _Reject(Exception):
    pass


def _trivial(c: F.Formula, d: F.Formula) -> bool:
    """Implications that hold for purely syntactic reasons."""
    c, d = canonical(c), canonical(d)
    if c == d or c == F.FALSE or d == F.TRUE:
        return True
    cs = c.args if isinstance(c, F.And) else (c,)
    ds = d.args if isinstance(d, F.Or) else (d,)
    if c in ds or any(x == y for x in cs for y in ds):
        return True
    return isinstance(d, F.And) and all(x in cs for x in d.args)


def discharge(ob: Obligation, bound: GraphBound = GraphBound(),
              universe: LabelUniverse = DEFAULT_UNIVERSE) -> Obligation:
    """Decide one implication: exactly when trivial, else by bounded search."""
    if _trivial(ob.antecedent, ob.consequent):
        ob.status = "exact"
        return ob
    v = implies_bounded(ob.antecedent, ob.consequent, bound, universe)
    ob.verdict = v
    ob.status = "bounded" if v.holds else "failed"
    return ob


def _discharge_job(args):
    return discharge(*args)


def _norm(c: P.Command) -> P.Command:
    """Sequences flattened and rule sets sorted, so that equal programs compare equal."""
    if isinstance(c, P.Seq):
        return P.seq(*(_norm(x) for x in P.flatten_seq(c)))
    if isinstance(c, P.Call):
        return P.Call(tuple(sorted(c.rules)))
    if isinstance(c, P.If):
        return P.If(_norm(c.cond), _norm(c.then), _norm(c.orelse))
    if isinstance(c, P.Try):
        return P.Try(_norm(c.cond), _norm(c.then), _norm(c.orelse))
    if isinstance(c, P.Loop):
        return P.Loop(_norm(c.body))
    if isinstance(c, P.Choice):
        return P.Choice(_norm(c.left), _norm(c.right))
    return c


class _Checker:
    def __init__(self, rules: dict):
        self.rules = rules
        self.nodes: list[NodeStatus] = []
        self.obligations: list[Obligation] = []

    def same_prog(self, a: P.Command, b: P.Command, what: str):
        if _norm(a) != _norm(b):
            raise _Reject(f"{what}: expected program {print_program(b)}, found {print_program(a)}")

    def same(self, a: F.Formula, b: F.Formula, what: str):
        if not equal_canonical(a, b):
            raise _Reject(f"{what}: expected {print_formula(simplify(b))}, found {print_formula(a)}")

    def arity(self, n: ProofNode, k: int):
        if len(n.children) != k:
            raise _Reject(f"{n.rule} needs {k} premise(s), found {len(n.children)}")

    def single_rule(self, n: ProofNode):
        c = n.conclusion.program
        if isinstance(c, P.Skip):
            return None
        if isinstance(c, P.Call) and len(c.rules) == 1:
            if c.rules[0] not in self.rules:
                raise UnknownRule(f"no rule named {c.rules[0]!r}")
            return self.rules[c.rules[0]]
        raise _Reject(f"{n.rule} applies to a single rule or skip, not {print_program(c)}")

    def visit(self, n: ProofNode, path: str):
        index = len(self.nodes)
        self.nodes.append(NodeStatus(path, n.rule, "ok"))
        try:
            getattr(self, "rule_" + n.rule.replace("-", "_"))(n, path)
        except (_Reject, GPError) as e:
            msg = str(e) if isinstance(e, _Reject) else f"{type(e).__name__}: {e}"
            self.nodes[index].status = "rejected"
            self.nodes[index].message = msg
            return
        for i, c in enumerate(n.children, 1):
            self.visit(c, f"{path}.{i}")

    def rule_ruleapp_slp(self, n, path):
        self.arity(n, 0)
        r = self.single_rule(n)
        pre, post = n.conclusion.pre, n.conclusion.post
        self.same(post, pre if r is None else slp_rule(pre, r), "post is not Slp(pre, r)")

    def rule_ruleapp_wlp(self, n, path):
        self.arity(n, 0)
        r = self.single_rule(n)
        pre, post = n.conclusion.pre, n.conclusion.post
        self.same(pre, post if r is None else wlp_rule(post, r), "pre is not not Slp(not post, r^-1)")

    def rule_ruleset(self, n, path):
        c = n.conclusion.program
        if not isinstance(c, P.Call):
            raise _Reject(f"ruleset needs a rule set, not {print_program(c)}")
        self.arity(n, len(c.rules))
        wanted = sorted(c.rules)
        got = []
        for ch in n.children:
            p = ch.conclusion.program
            if not (isinstance(p, P.Call) and len(p.rules) == 1):
                raise _Reject(f"ruleset premise must be about one rule, not {print_program(p)}")
            got.append(p.rules[0])
            self.same(ch.conclusion.pre, n.conclusion.pre, f"premise for {p.rules[0]} pre")
            self.same(ch.conclusion.post, n.conclusion.post, f"premise for {p.rules[0]} post")
        if sorted(got) != wanted:
            raise _Reject(f"ruleset premises cover {got}, expected one per rule of {wanted}")

    def rule_comp(self, n, path):
        self.arity(n, 2)
        a, b = (ch.conclusion for ch in n.children)
        self.same_prog(P.Seq(a.program, b.program), n.conclusion.program, "comp premises")
        self.same(a.pre, n.conclusion.pre, "first premise pre")
        self.same(b.pre, a.post, "midpoint")
        self.same(b.post, n.conclusion.post, "second premise post")

    def rule_cons(self, n, path):
        self.arity(n, 1)
        ch = n.children[0].conclusion
        self.same_prog(ch.program, n.conclusion.program, "cons premise")
        self.obligations.append(Obligation(path + ":pre", n.conclusion.pre, ch.pre))
        self.obligations.append(Obligation(path + ":post", ch.post, n.conclusion.post))

    def _cond(self, n, kind):
        c = n.conclusion.program
        if not isinstance(c, kind):
            raise _Reject(f"{n.rule} needs a {n.rule}-command, not {print_program(c)}")
        if not P.is_loop_free(c.cond):
            raise NotLoopFree(f"condition {print_program(c.cond)} is not loop-free")
        self.arity(n, 2)
        pre = n.conclusion.pre
        return c, F.conj(pre, success_lf(c.cond, self.rules)), F.conj(pre, fail_lf(c.cond, self.rules))

    def _branches(self, n, first_prog, c, s_pre, f_pre):
        a, b = (ch.conclusion for ch in n.children)
        self.same_prog(a.program, first_prog, "first premise")
        self.same_prog(b.program, c.orelse, "second premise")
        self.same(a.pre, s_pre, "first premise pre")
        self.same(b.pre, f_pre, "second premise pre")
        self.same(a.post, n.conclusion.post, "first premise post")
        self.same(b.post, n.conclusion.post, "second premise post")

    def rule_if(self, n, path):
        c, s_pre, f_pre = self._cond(n, P.If)
        self._branches(n, c.then, c, s_pre, f_pre)

    def rule_try(self, n, path):
        c, s_pre, f_pre = self._cond(n, P.Try)
        self._branches(n, P.Seq(c.cond, c.then), c, s_pre, f_pre)

    def rule_alap(self, n, path):
        c = n.conclusion.program
        if not isinstance(c, P.Loop):
            raise _Reject(f"alap needs a loop, not {print_program(c)}")
        if not is_iteration(c.body, self.rules):
            raise NotIteration(f"loop body {print_program(c.body)} is not an iteration command")
        self.arity(n, 1)
        ch = n.children[0].conclusion
        inv = n.conclusion.pre
        self.same_prog(ch.program, c.body, "alap premise")
        self.same(ch.pre, inv, "premise pre (invariant)")
        self.same(ch.post, inv, "premise post (invariant)")
        d = n.break_formula
        if P.contains_break(c.body) or canonical(d) != F.FALSE:
            raise BreakUnsupported("Break(c, S, d) is only decided when S has no break and d is false")
        want = F.disj(F.conj(inv, fail_iteration(c.body, self.rules)), d)
        self.same(n.conclusion.post, want, "post is not (c and Fail(S)) or d")


def check_proof(t: Union[ProofNode, Script], bound: GraphBound = GraphBound(),
                universe: LabelUniverse = DEFAULT_UNIVERSE, rules: Optional[dict] = None,
                jobs: int = 1, progress: Optional[Callable[[Obligation], None]] = None) -> CheckReport:
    """Check a proof tree.  ``jobs > 1`` discharges obligations in
    parallel processes; the report does not depend on the order."""
    if isinstance(t, Script):
        rules = t.program_file.rules if rules is None else rules
        t = t.proof
    rules = rules or {}
    if not is_control(t.conclusion.program, rules):
        raise NotControlProgram(f"{print_program(t.conclusion.program)} is not a control program")
    ch = _Checker(rules)
    ch.visit(t, "1")
    obs = ch.obligations
    if jobs > 1 and len(obs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            obs = list(ex.map(_discharge_job, [(o, bound, universe) for o in obs]))
    else:
        obs = [discharge(o, bound, universe) for o in obs]
    if progress:
        for o in obs:
            progress(o)
    by_node = {}
    for o in obs:
        by_node.setdefault(o.path.split(":")[0], []).append(o)
    for ns in ch.nodes:
        mine = by_node.get(ns.path, [])
        failed = [o for o in mine if o.status == "failed"]
        if ns.status == "ok" and failed:
            ns.status = "obligation failed"
            ns.message = "counterexample to the " + " and ".join(
                o.path.split(":")[1] + " implication" for o in failed)
        elif ns.status == "ok" and any(o.status == "bounded" for o in mine):
            ns.status = "ok (bounded)"
    bad = [ns for ns in ch.nodes if ns.status not in ("ok", "ok (bounded)")]
    if bad:
        first = bad[0]
        reason = f"{first.path} ({first.rule}): {first.message or first.status}"
        verdict = "rejected"
    elif any(o.status == "bounded" for o in obs):
        verdict, reason = "checked-with-bounded-obligations", ""
    else:
        verdict, reason = "checked", ""
    return CheckReport(verdict, reason, ch.nodes, obs, bound)
