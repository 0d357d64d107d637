"""Abstract syntax of GP 2 programs (procedures already inlined)."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator


class Command:
    __slots__ = ()


@dataclass(frozen=True)
class Call(Command):
    """A rule-set call ``{r1, ..., rn}``; a single rule is a one-element set."""
    rules: tuple


@dataclass(frozen=True)
class Seq(Command):
    first: Command
    second: Command


@dataclass(frozen=True)
class If(Command):
    cond: Command
    then: Command
    orelse: Command


@dataclass(frozen=True)
class Try(Command):
    cond: Command
    then: Command
    orelse: Command


@dataclass(frozen=True)
class Loop(Command):
    body: Command


@dataclass(frozen=True)
class Choice(Command):
    """Nondeterministic ``P or Q``."""
    left: Command
    right: Command


@dataclass(frozen=True)
class Break(Command):
    pass


@dataclass(frozen=True)
class Skip(Command):
    pass


@dataclass(frozen=True)
class Fail(Command):
    pass


BREAK, SKIP, FAIL = Break(), Skip(), Fail()


def seq(*cmds: Command) -> Command:
    """Right-nested sequence of ``cmds``; ``skip`` for none."""
    if not cmds:
        return SKIP
    out = cmds[-1]
    for c in reversed(cmds[:-1]):
        out = Seq(c, out)
    return out


def flatten_seq(c: Command) -> list[Command]:
    if isinstance(c, Seq):
        return flatten_seq(c.first) + flatten_seq(c.second)
    return [c]


def subcommands(c: Command) -> Iterator[Command]:
    if isinstance(c, Seq):
        yield c.first
        yield c.second
    elif isinstance(c, (If, Try)):
        yield c.cond
        yield c.then
        yield c.orelse
    elif isinstance(c, Loop):
        yield c.body
    elif isinstance(c, Choice):
        yield c.left
        yield c.right


def walk(c: Command) -> Iterator[Command]:
    yield c
    for s in subcommands(c):
        yield from walk(s)


def rule_names(c: Command) -> list[str]:
    out: dict[str, None] = {}
    for x in walk(c):
        if isinstance(x, Call):
            for r in x.rules:
                out.setdefault(r)
    return list(out)


def is_loop_free(c: Command) -> bool:
    return not any(isinstance(x, Loop) for x in walk(c))


def contains_break(c: Command) -> bool:
    return any(isinstance(x, Break) for x in walk(c))
