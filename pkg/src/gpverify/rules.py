"""Conditional rule schemata and generalised rules.

A rule's interface ``K`` consists of nodes only, so every left-hand edge is
deleted and every right-hand edge is created.  Rules may carry
bidirectional edges; :meth:`RuleSchema.variants` expands them into ordinary
directed rules.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Mapping

from . import formula as F
from .graph import Edge, Graph

VAR_TYPES = ("list", "atom", "int", "string", "char")


@dataclass(frozen=True, eq=False)
class RuleSchema:
    """``<L <- K -> R>`` with a schema condition.

    ``condition`` is already the first-order translation of the GP 2 text,
    a condition over ``lhs``.
    """
    name: str
    params: tuple  # ((variable, type), ...) in declaration order
    lhs: Graph
    rhs: Graph
    interface: tuple
    condition: F.Formula = F.TRUE

    def __eq__(self, other):
        return (isinstance(other, RuleSchema) and self.name == other.name
                and self.params == other.params and self.lhs == other.lhs
                and self.rhs == other.rhs
                and tuple(self.interface) == tuple(other.interface)
                and self.condition == other.condition)

    def __hash__(self):
        return hash((self.name, self.params, self.lhs, self.rhs))

    @property
    def var_types(self) -> dict[str, str]:
        return dict(self.params)

    def deleted_nodes(self) -> list[str]:
        return [v for v in self.lhs.nodes if v not in self.interface]

    def created_nodes(self) -> list[str]:
        return [v for v in self.rhs.nodes if v not in self.interface]

    def has_bidirectional(self) -> bool:
        return any(e.bidirectional for e in self.lhs.edges.values()) or any(
            e.bidirectional for e in self.rhs.edges.values())

    def variants(self) -> list["RuleSchema"]:
        return [replace(self, lhs=l, rhs=r)
                for l, r in _orientations(self.lhs, self.rhs)]

    def generalised(self) -> "GeneralisedRule":
        """The rule ``r∨``: left condition Γ, right condition true."""
        return GeneralisedRule(self.name, self.params, self.lhs, self.rhs,
                               tuple(self.interface), self.condition, F.TRUE)


@dataclass(frozen=True, eq=False)
class GeneralisedRule:
    """An unrestricted rule schema with left and right application conditions."""
    name: str
    params: tuple
    lhs: Graph
    rhs: Graph
    interface: tuple
    ac_left: F.Formula = F.TRUE
    ac_right: F.Formula = F.TRUE
    inverted: bool = False

    def __eq__(self, other):
        return (isinstance(other, GeneralisedRule)
                and (self.name, self.params, self.lhs, self.rhs,
                     tuple(self.interface), self.ac_left, self.ac_right,
                     self.inverted)
                == (other.name, other.params, other.lhs, other.rhs,
                    tuple(other.interface), other.ac_left, other.ac_right,
                    other.inverted))

    def __hash__(self):
        return hash((self.name, self.lhs, self.rhs, self.inverted))

    @property
    def var_types(self) -> dict[str, str]:
        return dict(self.params)

    def inverse(self) -> "GeneralisedRule":
        return GeneralisedRule(self.name, self.params, self.rhs, self.lhs,
                               self.interface, self.ac_right, self.ac_left,
                               not self.inverted)

    def deleted_nodes(self) -> list[str]:
        return [v for v in self.lhs.nodes if v not in self.interface]

    def created_nodes(self) -> list[str]:
        return [v for v in self.rhs.nodes if v not in self.interface]

    def has_bidirectional(self) -> bool:
        return any(e.bidirectional for e in self.lhs.edges.values()) or any(
            e.bidirectional for e in self.rhs.edges.values())

    def variants(self) -> list["GeneralisedRule"]:
        return [replace(self, lhs=l, rhs=r)
                for l, r in _orientations(self.lhs, self.rhs)]


def _orientations(lhs: Graph, rhs: Graph):
    """All directed readings of the bidirectional edges of a rule.

    An edge identifier present in both graphs is flipped consistently, so a
    bidirectional edge that is deleted and recreated keeps the orientation it
    was matched in.
    """
    ids = []
    for g in (lhs, rhs):
        for k, e in g.edges.items():
            if e.bidirectional and e.src != e.tgt and k not in ids:
                ids.append(k)
    out = []
    for flips in itertools.product((False, True), repeat=len(ids)):
        flip = {k for k, f in zip(ids, flips) if f}
        out.append((_orient(lhs, flip), _orient(rhs, flip)))
    return out


def _orient(g: Graph, flip: set) -> Graph:
    edges = {}
    for k, e in g.edges.items():
        if k in flip:
            e = Edge(e.tgt, e.src, e.label, e.mark)
        elif e.bidirectional:
            e = replace(e, bidirectional=False)
        edges[k] = e
    return Graph(dict(g.nodes), edges)
