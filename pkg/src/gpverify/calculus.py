"""Program classes and first-order formulas for program outcomes.

For a loop-free program P the module builds formulas for three
questions: does some run of P reach a result graph (``success_lf``), can P
fail (``fail_lf``), and what holds after P (``slp_lf``).  ``wlp_lf`` is
the dual of ``slp_lf`` and is what makes sequencing compositional:

* some result of P satisfies d      iff  not wlp(P, not d)
* Success(P;Q) = not wlp(P, not Success(Q))
* Fail(P;Q)    = Fail(P) or not wlp(P, not Fail(Q))

``break`` without an enclosing loop ends the program; it is accepted only
where nothing follows it, and there it behaves like ``skip``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from . import formula as F
from . import program as P
from .errors import BreakUnsupported, NotIteration, NotLoopFree, UnknownRule
from .fol import simplify
from .slp import slp_rule, success_rule, wlp_rule

Rules = Mapping[str, object]


# -- classification ------------------------------------------------------------

@dataclass
class CommandClass:
    command: P.Command
    loop_free: bool
    non_failing: bool
    iteration: bool
    control: bool
    children: list = field(default_factory=list)

    def flags(self) -> list[str]:
        names = ("loop_free", "non_failing", "iteration", "control")
        return [n.replace("_", "-") for n in names if getattr(self, n)]


def _empty_lhs(name: str, rules: Optional[Rules]) -> bool:
    if rules is None or name not in rules:
        return False
    return not rules[name].lhs.nodes and not rules[name].lhs.edges


def is_non_failing(c: P.Command, rules: Optional[Rules] = None) -> bool:
    """Commands that can never produce ``fail``; ``or`` of two such
    commands is included."""
    if isinstance(c, (P.Break, P.Skip, P.Loop)):
        return True
    if isinstance(c, P.Call):
        return bool(c.rules) and all(_empty_lhs(r, rules) for r in c.rules)
    if isinstance(c, P.Seq):
        return is_non_failing(c.first, rules) and is_non_failing(c.second, rules)
    if isinstance(c, (P.If, P.Try)):
        return is_non_failing(c.then, rules) and is_non_failing(c.orelse, rules)
    if isinstance(c, P.Choice):
        return is_non_failing(c.left, rules) and is_non_failing(c.right, rules)
    return False


def _split_prefix(c: P.Command):
    """Yield (C, Q) with C;Q equal to ``c`` as a sequence and C non-empty."""
    parts = P.flatten_seq(c)
    for k in range(1, len(parts)):
        yield P.seq(*parts[:k]), P.seq(*parts[k:])


def is_iteration(c: P.Command, rules: Optional[Rules] = None) -> bool:
    if P.is_loop_free(c) or is_non_failing(c, rules):
        return True
    return any(P.is_loop_free(a) and is_iteration(b, rules) for a, b in _split_prefix(c))


def is_control(c: P.Command, rules: Optional[Rules] = None) -> bool:
    for x in P.walk(c):
        if isinstance(x, (P.If, P.Try)) and not P.is_loop_free(x.cond):
            return False
        if isinstance(x, P.Loop) and not is_iteration(x.body, rules):
            return False
    return True


def classify(c: P.Command, rules: Optional[Rules] = None) -> CommandClass:
    """Flags for ``c`` and, recursively, for its subcommands."""
    return CommandClass(c, P.is_loop_free(c), is_non_failing(c, rules),
                        is_iteration(c, rules), is_control(c, rules),
                        [classify(s, rules) for s in P.subcommands(c)])


# -- helpers ------------------------------------------------------------------

def _rule(rules: Rules, name: str):
    try:
        return rules[name]
    except KeyError:
        raise UnknownRule(f"no rule named {name!r}") from None


def _require_loop_free(c: P.Command):
    if not P.is_loop_free(c):
        raise NotLoopFree("the program contains a loop")
    _check_breaks(c, tail=True)


def _check_breaks(c: P.Command, tail: bool):
    if isinstance(c, P.Break) and not tail:
        raise BreakUnsupported("break is followed by further commands")
    if isinstance(c, P.Seq):
        _check_breaks(c.first, False)
        _check_breaks(c.second, tail)
    elif isinstance(c, (P.If, P.Try)):
        _check_breaks(c.cond, False)
        _check_breaks(c.then, tail)
        _check_breaks(c.orelse, tail)
    elif isinstance(c, P.Choice):
        _check_breaks(c.left, tail)
        _check_breaks(c.right, tail)


def _some_result(c: P.Command, d: F.Formula, rules: Rules) -> F.Formula:
    """Some graph in the result set of ``c`` satisfies ``d``."""
    return simplify(F.Not(_wlp(c, F.Not(d), rules)))


# -- public constructions ---------------------------------------------------------

def success_lf(c: P.Command, rules: Rules) -> F.Formula:
    """Holds of G iff running ``c`` on G can yield a result graph."""
    _require_loop_free(c)
    return _success(c, rules)


def fail_lf(c: P.Command, rules: Rules) -> F.Formula:
    """Holds of G iff ``fail`` is a possible outcome of ``c`` on G."""
    _require_loop_free(c)
    return _fail(c, rules)


def slp_lf(pre: F.Formula, c: P.Command, rules: Rules) -> F.Formula:
    _require_loop_free(c)
    return _slp(pre, c, rules)


def wlp_lf(c: P.Command, post: F.Formula, rules: Rules) -> F.Formula:
    _require_loop_free(c)
    return _wlp(c, post, rules)


def fail_iteration(c: P.Command, rules: Rules) -> F.Formula:
    """Fail formula of an iteration command.

    A non-failing command gives false, a loop-free one its loop-free Fail.
    For C;Q with C loop-free and Q an iteration command the result is
    Fail(C) or (some result of C satisfies Fail(Q)), which reduces to
    Fail(C) when Q is non-failing.
    """
    if is_non_failing(c, rules):
        return F.FALSE
    if P.is_loop_free(c):
        return fail_lf(c, rules)
    for a, b in _split_prefix(c):
        if P.is_loop_free(a) and is_iteration(b, rules):
            _require_loop_free(a)
            rest = fail_iteration(b, rules)
            return simplify(F.disj(_fail(a, rules), _some_result(a, rest, rules)))
    raise NotIteration("not an iteration command")


# -- recursive cases ---------------------------------------------------------------

def _success(c: P.Command, rules: Rules) -> F.Formula:
    if isinstance(c, (P.Skip, P.Break)):
        return F.TRUE
    if isinstance(c, P.Fail):
        return F.FALSE
    if isinstance(c, P.Call):
        return simplify(F.disj(*(success_rule(_rule(rules, r)) for r in c.rules)))
    if isinstance(c, P.Seq):
        return _some_result(c.first, _success(c.second, rules), rules)
    if isinstance(c, P.If):
        return simplify(F.disj(F.conj(_success(c.cond, rules), _success(c.then, rules)),
                               F.conj(_fail(c.cond, rules), _success(c.orelse, rules))))
    if isinstance(c, P.Try):
        return simplify(F.disj(_success(P.Seq(c.cond, c.then), rules),
                               F.conj(_fail(c.cond, rules), _success(c.orelse, rules))))
    if isinstance(c, P.Choice):
        return simplify(F.disj(_success(c.left, rules), _success(c.right, rules)))
    raise NotLoopFree("the program contains a loop")


def _fail(c: P.Command, rules: Rules) -> F.Formula:
    if isinstance(c, (P.Skip, P.Break)):
        return F.FALSE
    if isinstance(c, P.Fail):
        return F.TRUE
    if isinstance(c, P.Call):
        return simplify(F.Not(_success(c, rules)))
    if isinstance(c, P.Seq):
        return simplify(F.disj(_fail(c.first, rules),
                               _some_result(c.first, _fail(c.second, rules), rules)))
    if isinstance(c, P.If):
        return simplify(F.disj(F.conj(_success(c.cond, rules), _fail(c.then, rules)),
                               F.conj(_fail(c.cond, rules), _fail(c.orelse, rules))))
    if isinstance(c, P.Try):
        # a failing condition is caught; only P or Q can make it fail
        return simplify(F.disj(_some_result(c.cond, _fail(c.then, rules), rules),
                               F.conj(_fail(c.cond, rules), _fail(c.orelse, rules))))
    if isinstance(c, P.Choice):
        return simplify(F.disj(_fail(c.left, rules), _fail(c.right, rules)))
    raise NotLoopFree("the program contains a loop")


def _slp(pre: F.Formula, c: P.Command, rules: Rules) -> F.Formula:
    if isinstance(c, (P.Skip, P.Break)):
        return pre
    if isinstance(c, P.Fail):
        return F.FALSE
    if isinstance(c, P.Call):
        return simplify(F.disj(*(slp_rule(pre, _rule(rules, r)) for r in c.rules)))
    if isinstance(c, P.Seq):
        return _slp(_slp(pre, c.first, rules), c.second, rules)
    if isinstance(c, P.If):
        return simplify(F.disj(
            _slp(simplify(F.conj(pre, _success(c.cond, rules))), c.then, rules),
            _slp(simplify(F.conj(pre, _fail(c.cond, rules))), c.orelse, rules)))
    if isinstance(c, P.Try):
        return simplify(F.disj(
            _slp(simplify(F.conj(pre, _success(c.cond, rules))), P.Seq(c.cond, c.then), rules),
            _slp(simplify(F.conj(pre, _fail(c.cond, rules))), c.orelse, rules)))
    if isinstance(c, P.Choice):
        return simplify(F.disj(_slp(pre, c.left, rules), _slp(pre, c.right, rules)))
    raise NotLoopFree("the program contains a loop")


def _wlp(c: P.Command, post: F.Formula, rules: Rules) -> F.Formula:
    if isinstance(c, (P.Skip, P.Break)):
        return post
    if isinstance(c, P.Fail):
        return F.TRUE
    if isinstance(c, P.Call):
        return simplify(F.conj(*(wlp_rule(post, _rule(rules, r)) for r in c.rules)))
    if isinstance(c, P.Seq):
        return _wlp(c.first, _wlp(c.second, post, rules), rules)
    if isinstance(c, P.If):
        return simplify(F.conj(
            F.disj(F.Not(_success(c.cond, rules)), _wlp(c.then, post, rules)),
            F.disj(F.Not(_fail(c.cond, rules)), _wlp(c.orelse, post, rules))))
    if isinstance(c, P.Try):
        return simplify(F.conj(
            _wlp(P.Seq(c.cond, c.then), post, rules),
            F.disj(F.Not(_fail(c.cond, rules)), _wlp(c.orelse, post, rules))))
    if isinstance(c, P.Choice):
        return simplify(F.conj(_wlp(c.left, post, rules), _wlp(c.right, post, rules)))
    raise NotLoopFree("the program contains a loop")
