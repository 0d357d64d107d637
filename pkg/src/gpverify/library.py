"""Bundled example programs, rules, assertions and proof scripts."""
from __future__ import annotations

from importlib import resources

from . import formula as F
from .frontend import ProgramFile, parse_formula, parse_program_file, parse_rules
from .rules import RuleSchema


def text(name: str) -> str:
    return resources.files(__package__).joinpath("data").joinpath(name).read_text(encoding="utf-8")


def path(name: str):
    """A filesystem-like handle on a bundled file."""
    return resources.files(__package__).joinpath("data").joinpath(name)


def formula(name: str) -> F.Formula:
    """One of the assertions ``c``, ``d``, ``e``, ``f`` or ``q``."""
    return parse_formula(text(f"{name}.fol"))


def two_colouring() -> ProgramFile:
    return parse_program_file(text("twocolouring.gpp"))


def duplicate_delete() -> ProgramFile:
    return parse_program_file(text("dupdel.gpp"))


def del_rule() -> RuleSchema:
    return parse_rules(text("del.gpr"))["del"]


def rules() -> dict[str, RuleSchema]:
    """Every bundled rule, by name."""
    out = dict(two_colouring().rules)
    out.update(duplicate_delete().rules)
    out["del"] = del_rule()
    return out
