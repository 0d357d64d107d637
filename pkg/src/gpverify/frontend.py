"""Parsers and printers for labels, formulas, host graphs, rules and programs.

Concrete syntax summary::

    formula  := formula \\/ formula | formula /\\ formula | ~formula
              | existsV x, y (formula) | forallE e (formula) | ...
              | true | false | int(t) | char(t) | string(t) | atom(t)
              | root(t) | edge(v, w [, label] [, mark]) | t op t
    term     := t : t | t . t | t + t | t - t | t * t | t / t | -n
              | lV(t) | lE(t) | mV(t) | mE(t) | s(t) | t(t)
              | indeg(t) | outdeg(t) | length(t) | incon(t) | outcon(t)
              | n | "str" | empty | mark | x | @node | @@edge

``not``/``and``/``or`` are accepted for ``~``/``/\\``/``\\/`` and ``#`` may
separate an edge label from its mark, as in GP 2 rule conditions.
Printers emit text the parsers map back to the identical AST.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Optional

from . import formula as F
from . import program as P
from .errors import (MissingMain, NonSimpleLHS, ParseError, RecursiveProcedure,
                     RHSVariableNotInLHS, InvalidRule, TypeMismatch,
                     UndeclaredVariable)
from .graph import Edge, Graph, Node, format_label
from .rules import VAR_TYPES, RuleSchema

MARK = F.MARK

# -- lexer ------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+|//[^\n]*)
  | (?P<econst>@@[A-Za-z0-9_']+)
  | (?P<const>@[A-Za-z0-9_']+)
  | (?P<num>[0-9]+(?![A-Za-z0-9_']))
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*|[0-9][A-Za-z0-9_']*)
  | (?P<str>"[^"\n]*")
  | (?P<op>=>|!=|<=|>=|/\\|\\/|[()\[\]{},;:.+\-*/=<>!~\#])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line,
                             pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(Token(kind, m.group(), line, pos - line_start + 1))
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    toks.append(Token("eof", "", line, pos - line_start + 1))
    return toks


KEYWORDS = {"true", "false", "empty", "not", "and", "or", "root", "edge",
            "node", "interface", "where", "if", "then", "else", "try", "skip",
            "fail", "break", "bidir", "existsV", "existsE", "existsL",
            "forallV", "forallE", "forallL"} | set(F.ALL_MARKS) | set(F.TYPE_PREDICATES)

_FUNCS = {
    "lV": lambda a: F.LabelOf(F.NODE, a), "l_V": lambda a: F.LabelOf(F.NODE, a),
    "lE": lambda a: F.LabelOf(F.EDGE, a), "l_E": lambda a: F.LabelOf(F.EDGE, a),
    "mV": lambda a: F.MarkOf(F.NODE, a), "m_V": lambda a: F.MarkOf(F.NODE, a),
    "mE": lambda a: F.MarkOf(F.EDGE, a), "m_E": lambda a: F.MarkOf(F.EDGE, a),
    "s": lambda a: F.Endpoint("s", a), "t": lambda a: F.Endpoint("t", a),
    "indeg": lambda a: F.Degree("indeg", a), "outdeg": lambda a: F.Degree("outdeg", a),
    "length": F.Length,
    "incon": lambda a: F.Aux("incon", a), "outcon": lambda a: F.Aux("outcon", a),
}
_ARG_SORT = {"lV": F.NODE, "l_V": F.NODE, "mV": F.NODE, "m_V": F.NODE,
             "lE": F.EDGE, "l_E": F.EDGE, "mE": F.EDGE, "m_E": F.EDGE,
             "s": F.EDGE, "t": F.EDGE, "indeg": F.NODE, "outdeg": F.NODE,
             "length": F.LABEL, "incon": F.NODE, "outcon": F.NODE}
_QUANT = {"V": F.NODE, "E": F.EDGE, "L": F.LABEL}
_SORT_LETTER = {F.NODE: "V", F.EDGE: "E", F.LABEL: "L"}


term_sort = F.term_sort


@dataclass
class Env:
    """Name resolution context.

    ``label_vars`` of None admits any free name as a label variable;
    otherwise free label names must be declared there.
    """
    node_ids: frozenset = frozenset()
    edge_ids: frozenset = frozenset()
    label_vars: Optional[frozenset] = None


class Parser:
    def __init__(self, text: str, env: Env | None = None):
        self.toks = tokenize(text)
        self.pos = 0
        self.env = env or Env()
        self.scope: list[tuple[str, str]] = []

    # -- token helpers ------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        shown = tok.text or "end of input"
        return ParseError(f"{msg} (at {shown!r})", tok.line, tok.col)

    def at(self, *texts: str) -> bool:
        return self.tok.kind != "str" and self.tok.text in texts

    def accept(self, *texts: str) -> Optional[Token]:
        if self.at(*texts):
            t = self.tok
            self.pos += 1
            return t
        return None

    def expect(self, text: str) -> Token:
        t = self.accept(text)
        if t is None:
            raise self.error(f"expected {text!r}")
        return t

    def expect_eof(self):
        if self.tok.kind != "eof":
            raise self.error("unexpected trailing input")

    def ident(self, what: str = "identifier") -> str:
        t = self.tok
        if t.kind not in ("ident", "num") or t.text in KEYWORDS:
            raise self.error(f"expected {what}")
        self.pos += 1
        return t.text

    def lookup(self, name: str) -> Optional[str]:
        for n, s in reversed(self.scope):
            if n == name:
                return s
        return None

    # -- terms --------------------------------------------------------------

    def term(self, expected: Optional[str] = None) -> F.Term:
        t = self._concat(expected)
        if expected is not None and term_sort(t) != expected:
            raise TypeMismatch(f"expected a {expected} term, got {print_term(t)}",
                               self.tok.line, self.tok.col)
        return t

    def _concat(self, expected):
        first = self._strcat(expected)
        if not self.at(":"):
            return first
        items = [self._label_operand(first)]
        while self.accept(":"):
            items.append(self._label_operand(self._strcat(F.LABEL)))
        return F.Concat(tuple(items))

    def _label_operand(self, t):
        if term_sort(t) != F.LABEL:
            raise TypeMismatch(f"{print_term(t)} is not a label", self.tok.line, self.tok.col)
        return t

    def _strcat(self, expected):
        first = self._additive(expected)
        if not self.at("."):
            return first
        items = [self._label_operand(first)]
        while self.accept("."):
            items.append(self._label_operand(self._additive(F.LABEL)))
        return F.StrCat(tuple(items))

    def _additive(self, expected):
        left = self._mult(expected)
        while self.at("+", "-"):
            op = self.tok.text
            self.pos += 1
            right = self._mult(F.LABEL)
            left = F.Arith(op, self._label_operand(left), self._label_operand(right))
        return left

    def _mult(self, expected):
        left = self._unary(expected)
        while self.at("*", "/"):
            op = self.tok.text
            self.pos += 1
            right = self._unary(F.LABEL)
            left = F.Arith(op, self._label_operand(left), self._label_operand(right))
        return left

    def _unary(self, expected):
        if self.at("-") and self.peek().kind == "num":
            self.pos += 2
            return F.IntLit(-int(self.toks[self.pos - 1].text))
        return self._primary(expected)

    def _primary(self, expected):
        t = self.tok
        if t.kind == "num":
            self.pos += 1
            if expected == F.NODE:
                return F.NodeId(t.text)
            if expected == F.EDGE:
                return F.EdgeId(t.text)
            return F.IntLit(int(t.text))
        if t.kind == "str":
            self.pos += 1
            return F.StrLit(t.text[1:-1])
        if t.kind == "const":
            self.pos += 1
            return F.NodeId(t.text[1:])
        if t.kind == "econst":
            self.pos += 1
            return F.EdgeId(t.text[2:])
        if self.accept("("):
            inner = self.term(None)
            self.expect(")")
            return inner
        if t.kind != "ident":
            raise self.error("expected a term")
        if t.text == "empty":
            self.pos += 1
            return F.EmptyList()
        if t.text in F.ALL_MARKS:
            self.pos += 1
            return F.MarkConst(t.text)
        if t.text in _FUNCS and self.peek().text == "(":
            self.pos += 2
            arg = self.term(_ARG_SORT[t.text])
            self.expect(")")
            return _FUNCS[t.text](arg)
        if t.text in KEYWORDS:
            raise self.error("expected a term")
        self.pos += 1
        return self.resolve(t, expected)

    def resolve(self, t: Token, expected: Optional[str]) -> F.Term:
        name = t.text
        sort = self.lookup(name)
        if sort is not None:
            return F.Var(name, sort)
        env = self.env
        if name in env.node_ids and expected in (None, F.NODE):
            return F.NodeId(name)
        if name in env.edge_ids and expected in (None, F.EDGE):
            return F.EdgeId(name)
        if expected == F.NODE:
            return F.NodeId(name)
        if expected == F.EDGE:
            return F.EdgeId(name)
        if env.label_vars is not None and name not in env.label_vars:
            raise UndeclaredVariable(f"variable {name!r} is not declared")
        return F.Var(name, F.LABEL)

    def _weak(self, start: int, end: int) -> bool:
        """Is toks[start:end] a single name or numeral whose sort may be re-read?"""
        if end - start != 1:
            return False
        t = self.toks[start]
        return (t.kind == "num" or (t.kind == "ident" and t.text not in KEYWORDS
                                    and self.lookup(t.text) is None))

    # -- formulas -----------------------------------------------------------

    def formula(self) -> F.Formula:
        items = [self._and()]
        while self.accept("\\/", "or"):
            items.append(self._and())
        return items[0] if len(items) == 1 else F.Or(tuple(items))

    def _and(self):
        items = [self._unf()]
        while self.accept("/\\", "and"):
            items.append(self._unf())
        return items[0] if len(items) == 1 else F.And(tuple(items))

    def _unf(self):
        if self.accept("~", "not"):
            return F.Not(self._unf())
        t = self.tok
        if t.kind == "ident" and len(t.text) == 7 and t.text[:6] in ("exists", "forall") \
                and t.text[6] in _QUANT:
            self.pos += 1
            sort = _QUANT[t.text[6]]
            names = [self.ident("variable name")]
            while self.accept(","):
                names.append(self.ident("variable name"))
            self.expect("(")
            for n in names:
                self.scope.append((n, sort))
            body = self.formula()
            del self.scope[-len(names):]
            self.expect(")")
            if t.text.startswith("forall"):
                for n in reversed(names):
                    body = F.forall(sort, n, body)
                return body
            return F.exists_many(sort, names, body)
        return self._atomf()

    def _atomf(self):
        t = self.tok
        if t.kind == "ident":
            if t.text == "true":
                self.pos += 1
                return F.TRUE
            if t.text == "false":
                self.pos += 1
                return F.FALSE
            if t.text in F.TYPE_PREDICATES and self.peek().text == "(":
                self.pos += 2
                arg = self.term(F.LABEL)
                self.expect(")")
                return F.TypePred(t.text, arg)
            if t.text == "root" and self.peek().text == "(":
                self.pos += 2
                arg = self.term(F.NODE)
                self.expect(")")
                return F.Root(arg)
            if t.text == "edge" and self.peek().text == "(":
                return self._edge_pred()
        if t.text == "(" and t.kind == "op":
            start = self.pos
            try:
                return self._comparison()
            except ParseError:
                self.pos = start
            self.pos += 1
            inner = self.formula()
            self.expect(")")
            return inner
        return self._comparison()

    def _edge_pred(self):
        self.pos += 2
        src = self.term(F.NODE)
        self.expect(",")
        tgt = self.term(F.NODE)
        label = mark = None
        if self.accept(","):
            if self.tok.text in F.ALL_MARKS and self.peek().text == ")":
                mark = self.term(MARK)
            else:
                label = self.term(F.LABEL)
                if self.accept(",", "#"):
                    mark = self.term(MARK)
        self.expect(")")
        return F.EdgePred(src, tgt, label, mark)

    def _comparison(self):
        start = self.pos
        left = self.term(None)
        mid = self.pos
        if not self.at(*F.COMPARISONS):
            raise self.error("expected a comparison operator")
        op = self.tok.text
        self.pos += 1
        rstart = self.pos
        right = self.term(None)
        end = self.pos
        ls, rs = term_sort(left), term_sort(right)
        if ls != rs:
            if rs in (F.NODE, F.EDGE) and self._weak(start, mid):
                self.pos = start
                left = self.term(rs)
                self.pos = end
            elif ls in (F.NODE, F.EDGE) and self._weak(rstart, end):
                self.pos = rstart
                right = self.term(ls)
            else:
                raise TypeMismatch(f"cannot compare {print_term(left)} with "
                                   f"{print_term(right)}", self.tok.line, self.tok.col)
            ls = rs = term_sort(left)
        if op not in ("=", "!=") and ls != F.LABEL:
            raise TypeMismatch(f"{op} needs integer operands", self.tok.line, self.tok.col)
        return F.Cmp(op, left, right)


# -- public parse entry points -------------------------------------------------

def parse_formula(text: str, env: Env | None = None) -> F.Formula:
    """Parse a first-order formula; ``forall`` is desugared to ``~exists~``."""
    p = Parser(text, env)
    f = p.formula()
    p.expect_eof()
    return f


def parse_term(text: str, env: Env | None = None) -> F.Term:
    p = Parser(text, env)
    t = p.term(None)
    p.expect_eof()
    return t


# -- printers -----------------------------------------------------------------

def print_term(t: F.Term, prec: int = 0) -> str:
    s, p = _term(t)
    return f"({s})" if p < prec else s


def _term(t):
    if isinstance(t, F.Var):
        return t.name, 9
    if isinstance(t, F.NodeId):
        return "@" + t.name, 9
    if isinstance(t, F.EdgeId):
        return "@@" + t.name, 9
    if isinstance(t, F.IntLit):
        return str(t.value), 9
    if isinstance(t, F.StrLit):
        return f'"{t.value}"', 9
    if isinstance(t, F.EmptyList):
        return "empty", 9
    if isinstance(t, F.MarkConst):
        return t.name, 9
    if isinstance(t, F.Concat):
        return " : ".join(print_term(i, 2) for i in t.items), 1
    if isinstance(t, F.StrCat):
        return " . ".join(print_term(i, 3) for i in t.items), 2
    if isinstance(t, F.Arith):
        p = 3 if t.op in "+-" else 4
        return f"{print_term(t.left, p)} {t.op} {print_term(t.right, p + 1)}", p
    if isinstance(t, F.Degree):
        return f"{t.which}({print_term(t.node)})", 9
    if isinstance(t, F.Length):
        return f"length({print_term(t.arg)})", 9
    if isinstance(t, F.LabelOf):
        return f"l{_SORT_LETTER[t.sort]}({print_term(t.arg)})", 9
    if isinstance(t, F.MarkOf):
        return f"m{_SORT_LETTER[t.sort]}({print_term(t.arg)})", 9
    if isinstance(t, F.Endpoint):
        return f"{t.which}({print_term(t.edge)})", 9
    if isinstance(t, F.Aux):
        return f"{t.kind}({print_term(t.node)})", 9
    raise TypeError(f"not a term: {t!r}")


def print_formula(f: F.Formula, prec: int = 0) -> str:
    s, p = _formula(f)
    return f"({s})" if p < prec else s


def _formula(f):
    if isinstance(f, F.Bool):
        return ("true" if f.value else "false"), 9
    if isinstance(f, F.TypePred):
        return f"{f.kind}({print_term(f.arg)})", 9
    if isinstance(f, F.Root):
        return f"root({print_term(f.node)})", 9
    if isinstance(f, F.Cmp):
        return f"{print_term(f.left)} {f.op} {print_term(f.right)}", 9
    if isinstance(f, F.EdgePred):
        args = [print_term(f.src), print_term(f.tgt)]
        if f.label is not None:
            args.append(print_term(f.label))
        if f.mark is not None:
            args.append(print_term(f.mark))
        return f"edge({', '.join(args)})", 9
    if isinstance(f, F.Or):
        return " \\/ ".join(print_formula(a, 2) for a in f.args), 1
    if isinstance(f, F.And):
        return " /\\ ".join(print_formula(a, 3) for a in f.args), 2
    if isinstance(f, F.Not):
        a = f.arg
        if isinstance(a, F.Exists) and isinstance(a.body, F.Not):
            return (f"forall{_SORT_LETTER[a.sort]} {a.var} "
                    f"({print_formula(a.body.arg)})"), 3
        return "~" + print_formula(a, 3), 3
    if isinstance(f, F.Exists):
        names, body = [f.var], f.body
        while isinstance(body, F.Exists) and body.sort == f.sort:
            names.append(body.var)
            body = body.body
        return (f"exists{_SORT_LETTER[f.sort]} {', '.join(names)} "
                f"({print_formula(body)})"), 3
    raise TypeError(f"not a formula: {f!r}")


def print_ast(x) -> str:
    """Print any AST node this package produces."""
    if isinstance(x, F.Formula):
        return print_formula(x)
    if isinstance(x, F.Term):
        return print_term(x)
    if isinstance(x, Graph):
        return print_graph(x)
    if isinstance(x, RuleSchema):
        return print_rule(x)
    if isinstance(x, P.Command):
        return print_program(x)
    raise TypeError(f"cannot print {type(x).__name__}")


# -- graphs -------------------------------------------------------------------

def _label_value(t: F.Term) -> tuple:
    if isinstance(t, F.EmptyList):
        return ()
    if isinstance(t, F.IntLit):
        return (t.value,)
    if isinstance(t, F.StrLit):
        return (t.value,)
    if isinstance(t, F.Concat):
        out: tuple = ()
        for i in t.items:
            out += _label_value(i)
        return out
    raise ParseError(f"host labels must be constant lists, got {print_term(t)}")


def _graph_items(p: Parser, host: bool, closers=("eof",)):
    nodes: dict[str, Node] = {}
    edges: dict[str, Edge] = {}
    while True:
        if p.accept("node"):
            v = p.ident("node id")
            if v in nodes:
                raise p.error(f"duplicate node {v!r}")
            label = p.term(F.LABEL)
            mark = p.accept(*F.ALL_MARKS)
            root = bool(p.accept("root"))
            nodes[v] = Node(_label_value(label) if host else label,
                            mark.text if mark else "none", root)
        elif p.accept("edge"):
            k = p.ident("edge id")
            if k in edges:
                raise p.error(f"duplicate edge {k!r}")
            src = p.ident("source node")
            tgt = p.ident("target node")
            label = p.term(F.LABEL)
            mark = p.accept(*F.ALL_MARKS)
            bidir = bool(p.accept("bidir"))
            edges[k] = Edge(src, tgt, _label_value(label) if host else label,
                            mark.text if mark else "none", bidir)
        else:
            break
    for k, e in edges.items():
        for end in (e.src, e.tgt):
            if end not in nodes:
                raise ParseError(f"edge {k!r} refers to unknown node {end!r}")
    return Graph(nodes, edges)


def parse_graph(text: str) -> Graph:
    """Parse a host graph written one ``node``/``edge`` item per line."""
    p = Parser(text)
    g = _graph_items(p, host=True)
    p.expect_eof()
    return g


def print_graph(g: Graph) -> str:
    lines = []
    for v, n in g.nodes.items():
        lab = format_label(n.label) if isinstance(n.label, tuple) else print_term(n.label)
        lines.append(f"node {v} {lab} {n.mark}" + (" root" if n.root else ""))
    for k, e in g.edges.items():
        lab = format_label(e.label) if isinstance(e.label, tuple) else print_term(e.label)
        lines.append(f"edge {k} {e.src} {e.tgt} {lab} {e.mark}"
                     + (" bidir" if e.bidirectional else ""))
    return "".join(line + "\n" for line in lines)


# -- rules --------------------------------------------------------------------

def _params(p: Parser) -> tuple:
    p.expect("(")
    params: list[tuple[str, str]] = []
    if p.accept(")"):
        return ()
    while True:
        names = [p.ident("variable name")]
        while p.accept(","):
            names.append(p.ident("variable name"))
        p.expect(":")
        typ = p.tok.text
        if p.tok.kind != "ident" or typ not in VAR_TYPES:
            raise p.error(f"unknown type {typ!r}")
        p.pos += 1
        for n in names:
            if any(n == q for q, _ in params):
                raise p.error(f"variable {n!r} declared twice")
            params.append((n, typ))
        if p.accept(")"):
            return tuple(params)
        p.expect(";")


def _rule(p: Parser) -> RuleSchema:
    name_tok = p.tok
    name = p.ident("rule name")
    params = _params(p)
    declared = frozenset(n for n, _ in params)
    saved = p.env
    p.env = Env(label_vars=declared)
    p.expect("[")
    lhs = _graph_items(p, host=False)
    p.expect("]")
    p.expect("=>")
    p.expect("[")
    rhs = _graph_items(p, host=False)
    p.expect("]")
    interface: list[str] = []
    if p.accept("interface"):
        p.expect("{")
        if not p.accept("}"):
            interface.append(p.ident("node id"))
            while p.accept(","):
                interface.append(p.ident("node id"))
            p.expect("}")
    cond = F.TRUE
    if p.accept("where"):
        p.env = Env(node_ids=frozenset(lhs.nodes), edge_ids=frozenset(),
                    label_vars=declared)
        cond = p.formula()
    p.env = saved
    rule = RuleSchema(name, params, lhs, rhs, tuple(interface), cond)
    check_rule(rule, (name_tok.line, name_tok.col))
    return rule


def _vars_of_graph(g: Graph) -> list[str]:
    out: dict[str, None] = {}
    for n in g.nodes.values():
        for v in F.free_vars(n.label):
            out.setdefault(v)
    for e in g.edges.values():
        for v in F.free_vars(e.label):
            out.setdefault(v)
    return list(out)


def is_simple(t: F.Term, types: dict) -> bool:
    """No arithmetic, at most one list variable, at most one string
    variable per string concatenation."""
    items = t.items if isinstance(t, F.Concat) else (t,)
    list_vars = 0
    for it in items:
        if isinstance(it, F.Var):
            if types.get(it.name) == "list":
                list_vars += 1
        elif isinstance(it, F.StrCat):
            svars = 0
            for s in it.items:
                if isinstance(s, F.Var):
                    if types.get(s.name) not in ("string", "char"):
                        return False
                    if types[s.name] == "string":
                        svars += 1
                elif not isinstance(s, F.StrLit):
                    return False
            if svars > 1:
                return False
        elif not isinstance(it, (F.IntLit, F.StrLit, F.EmptyList)):
            return False
    return list_vars <= 1


def check_rule(rule: RuleSchema, where=(0, 0)):
    """Enforce the well-formedness conditions of a conditional rule schema."""
    types = rule.var_types
    L, R, K = rule.lhs, rule.rhs, set(rule.interface)
    for v in K:
        if v not in L.nodes or v not in R.nodes:
            raise InvalidRule(f"{rule.name}: interface node {v!r} must occur in both sides")
    for v in set(L.nodes) & set(R.nodes) - K:
        raise InvalidRule(f"{rule.name}: node {v!r} occurs on both sides but not in the interface")
    for g in (L, R):
        for x in list(g.nodes.values()) + list(g.edges.values()):
            for v in F.free_vars(x.label):
                if v not in types:
                    raise UndeclaredVariable(f"{rule.name}: variable {v!r} is not declared")
    for x in list(L.nodes.values()) + list(L.edges.values()):
        if not is_simple(x.label, types):
            raise NonSimpleLHS(f"{rule.name}: left-hand label {print_term(x.label)} is not simple")
    lvars = set(_vars_of_graph(L))
    for v in _vars_of_graph(R):
        if v not in lvars:
            raise RHSVariableNotInLHS(f"{rule.name}: {v!r} occurs in the right-hand side only")
    for v in F.free_vars(rule.condition):
        if v not in lvars:
            raise UndeclaredVariable(f"{rule.name}: condition variable {v!r} does not occur in the left-hand side")
    for v, n in R.nodes.items():
        if n.mark == "any":
            raise InvalidRule(f"{rule.name}: 'any' may only mark left-hand items")
    for k, e in R.edges.items():
        if e.mark == "any":
            raise InvalidRule(f"{rule.name}: 'any' may only mark left-hand items")
        if e.bidirectional:
            le = L.edges.get(k)
            if le is None or not le.bidirectional or {le.src, le.tgt} != {e.src, e.tgt}:
                raise InvalidRule(f"{rule.name}: bidirectional edge {k!r} must be "
                                  "paired with a left-hand one")


def parse_rule(text: str) -> RuleSchema:
    """Parse one rule declaration such as::

        del(a,b,c:list; d,e:int)
        [ node 1 a none  node 2 b none  node 3 c none
          edge e1 1 2 d none  edge e2 1 3 e none ]
        => [ node 1 a red  node 2 b none  edge e1 1 2 d + e none ]
        interface {1, 2}
        where d >= e
    """
    p = Parser(text)
    r = _rule(p)
    p.expect_eof()
    return r


def parse_rules(text: str) -> dict[str, RuleSchema]:
    p = Parser(text)
    out: dict[str, RuleSchema] = {}
    while p.tok.kind != "eof":
        r = _rule(p)
        if r.name in out:
            raise ParseError(f"rule {r.name!r} declared twice")
        out[r.name] = r
    return out


def print_rule(r: RuleSchema) -> str:
    params = "; ".join(", ".join(n for n, _ in grp) + ":" + typ
                       for typ, grp in ((t, list(g)) for t, g in
                                        itertools.groupby(r.params, key=lambda p: p[1])))

    def body(g):
        inner = print_graph(g).strip().replace("\n", "\n  ")
        return f"[ {inner} ]" if inner else "[ ]"

    out = f"{r.name}({params})\n{body(r.lhs)}\n=>\n{body(r.rhs)}\n"
    out += "interface {" + ", ".join(r.interface) + "}\n"
    if r.condition != F.TRUE:
        out += "where " + print_formula(r.condition) + "\n"
    return out


# -- programs -----------------------------------------------------------------

@dataclass
class ProgramFile:
    main: P.Command
    procedures: dict = field(default_factory=dict)  # name -> expanded command
    rules: dict = field(default_factory=dict)

    def command(self, text: str) -> P.Command:
        """Parse a command using this file's procedures."""
        p = Parser(text)
        c = _comseq(p)
        p.expect_eof()
        return _expand(c, self.procedures, {}, ())


def _comseq(p: Parser) -> P.Command:
    items = [_orexpr(p)]
    while p.accept(";"):
        items.append(_orexpr(p))
    return P.seq(*items)


def _orexpr(p: Parser) -> P.Command:
    left = _postfix(p)
    while p.accept("or"):
        left = P.Choice(left, _postfix(p))
    return left


def _postfix(p: Parser) -> P.Command:
    c = _catom(p)
    while p.accept("!"):
        c = P.Loop(c)
    return c


def _catom(p: Parser) -> P.Command:
    if p.accept("("):
        c = _comseq(p)
        p.expect(")")
        return c
    if p.accept("{"):
        names = [p.ident("rule name")]
        while p.accept(","):
            names.append(p.ident("rule name"))
        p.expect("}")
        return P.Call(tuple(names))
    if p.accept("skip"):
        return P.SKIP
    if p.accept("fail"):
        return P.FAIL
    if p.accept("break"):
        return P.BREAK
    if p.accept("if"):
        cond = _comseq(p)
        p.expect("then")
        then = _orexpr(p)
        orelse = _orexpr(p) if p.accept("else") else P.SKIP
        return P.If(cond, then, orelse)
    if p.accept("try"):
        cond = _comseq(p)
        then = _orexpr(p) if p.accept("then") else P.SKIP
        orelse = _orexpr(p) if p.accept("else") else P.SKIP
        return P.Try(cond, then, orelse)
    return P.Call((p.ident("command"),))


def _expand(c: P.Command, procs: dict, raw: dict, stack: tuple) -> P.Command:
    if isinstance(c, P.Call):
        hits = [n for n in c.rules if n in procs or n in raw]
        if not hits:
            return c
        if len(c.rules) > 1:
            raise ParseError(f"procedure {hits[0]!r} used inside a rule set")
        name = c.rules[0]
        if name in procs:
            return procs[name]
        if name in stack:
            raise RecursiveProcedure(" -> ".join(stack + (name,)))
        body = _expand(raw[name], procs, raw, stack + (name,))
        procs[name] = body
        return body
    if isinstance(c, P.Seq):
        return P.Seq(_expand(c.first, procs, raw, stack), _expand(c.second, procs, raw, stack))
    if isinstance(c, P.If):
        return P.If(*(_expand(x, procs, raw, stack) for x in (c.cond, c.then, c.orelse)))
    if isinstance(c, P.Try):
        return P.Try(*(_expand(x, procs, raw, stack) for x in (c.cond, c.then, c.orelse)))
    if isinstance(c, P.Loop):
        return P.Loop(_expand(c.body, procs, raw, stack))
    if isinstance(c, P.Choice):
        return P.Choice(_expand(c.left, procs, raw, stack), _expand(c.right, procs, raw, stack))
    return c


def parse_program_file(text: str) -> ProgramFile:
    """Parse procedure and rule declarations; ``Main`` is mandatory."""
    p = Parser(text)
    raw: dict[str, P.Command] = {}
    rules: dict[str, RuleSchema] = {}
    while p.tok.kind != "eof":
        if p.peek().text == "(":
            r = _rule(p)
            rules[r.name] = r
            continue
        name = p.ident("declaration name")
        p.expect("=")
        if name in raw:
            raise ParseError(f"procedure {name!r} declared twice")
        raw[name] = _comseq(p)
    if "Main" not in raw:
        raise MissingMain("program has no Main declaration")
    procs: dict[str, P.Command] = {}
    for name in raw:
        _expand(P.Call((name,)), procs, raw, ())
    main = procs.pop("Main")
    return ProgramFile(main, procs, rules)


def parse_program(text: str) -> P.Command:
    """Parse a program and return ``Main`` with procedures inlined."""
    return parse_program_file(text).main


def parse_command(text: str) -> P.Command:
    p = Parser(text)
    c = _comseq(p)
    p.expect_eof()
    return c


def print_program(c: P.Command, prec: int = 0) -> str:
    s, p = _cmd(c)
    return f"({s})" if p < prec else s


def _cmd(c):
    if isinstance(c, P.Call):
        if len(c.rules) == 1:
            return c.rules[0], 9
        return "{" + ", ".join(c.rules) + "}", 9
    if isinstance(c, P.Skip):
        return "skip", 9
    if isinstance(c, P.Fail):
        return "fail", 9
    if isinstance(c, P.Break):
        return "break", 9
    if isinstance(c, P.Seq):
        return f"{print_program(c.first, 1)}; {print_program(c.second, 0)}", 0
    if isinstance(c, P.Choice):
        return f"{print_program(c.left, 3)} or {print_program(c.right, 3)}", 2
    if isinstance(c, P.Loop):
        return print_program(c.body, 4) + "!", 4
    if isinstance(c, P.If):
        return (f"if {print_program(c.cond)} then {print_program(c.then, 1)} "
                f"else {print_program(c.orelse, 1)}"), 1
    if isinstance(c, P.Try):
        return (f"try {print_program(c.cond)} then {print_program(c.then, 1)} "
                f"else {print_program(c.orelse, 1)}"), 1
    raise TypeError(f"not a command: {c!r}")
