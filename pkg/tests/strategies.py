"""Hypothesis strategies shared by the test modules."""
from hypothesis import strategies as st

from gpverify import formula as F
from gpverify import program as P


MARKS = st.sampled_from(["none", "red", "blue", "any"])


def _label_terms(names):
    leaves = [st.integers(-3, 9).map(F.IntLit), st.sampled_from(["a", "xy"]).map(F.StrLit),
              st.just(F.EmptyList())]
    leaves += [st.just(F.Var(n)) for n in names["L"]]
    leaves += [st.just(F.LabelOf(F.NODE, F.Var(n, F.NODE))) for n in names["V"]]
    leaves += [st.just(F.Degree("indeg", F.Var(n, F.NODE))) for n in names["V"]]
    leaves += [st.just(F.LabelOf(F.EDGE, F.Var(n, F.EDGE))) for n in names["E"]]
    base = st.one_of(*leaves)
    return st.recursive(base, lambda inner: st.one_of(
        st.tuples(st.sampled_from("+-*"), inner, inner).map(lambda t: F.Arith(*t)),
        st.tuples(inner, inner).map(lambda t: F.Concat(t)),
        inner.map(F.Length)), max_leaves=4)


def _node_terms(names):
    opts = [st.just(F.Var(n, F.NODE)) for n in names["V"]]
    opts += [st.just(F.Endpoint(w, F.Var(n, F.EDGE))) for n in names["E"] for w in "st"]
    return st.one_of(*opts) if opts else None


@st.composite
def formulas(draw, names=None, depth=0):
    names = names or {"V": [], "E": [], "L": []}
    choices = ["bool", "not", "and", "or"] if depth < 3 else ["bool"]
    if depth < 3:
        choices += ["exV", "exE", "exL"]
    if names["V"] or names["E"]:
        choices += ["mark", "root", "edge", "nodeeq"]
    if names["L"] or names["V"] or names["E"]:
        choices += ["cmp", "type"]
    kind = draw(st.sampled_from(choices))
    if kind == "bool":
        return draw(st.sampled_from([F.TRUE, F.FALSE]))
    if kind == "not":
        return F.Not(draw(formulas(names, depth + 1)))
    if kind in ("and", "or"):
        args = tuple(draw(st.lists(formulas(names, depth + 1), min_size=2, max_size=3)))
        return F.And(args) if kind == "and" else F.Or(args)
    if kind.startswith("ex"):
        sort = {"exV": F.NODE, "exE": F.EDGE, "exL": F.LABEL}[kind]
        key = {"exV": "V", "exE": "E", "exL": "L"}[kind]
        name = f"{key.lower()}{len(names[key])}"
        inner = {k: list(v) for k, v in names.items()}
        inner[key].append(name)
        return F.Exists(sort, name, draw(formulas(inner, depth + 1)))
    if kind == "mark":
        if names["V"] and draw(st.booleans()):
            t = F.MarkOf(F.NODE, draw(_node_terms(names)))
        elif names["E"]:
            t = F.MarkOf(F.EDGE, F.Var(draw(st.sampled_from(names["E"])), F.EDGE))
        else:
            t = F.MarkOf(F.NODE, draw(_node_terms(names)))
        return F.Cmp(draw(st.sampled_from(["=", "!="])), t, F.MarkConst(draw(MARKS)))
    if kind == "root":
        return F.Root(draw(_node_terms(names)))
    if kind == "nodeeq":
        return F.Cmp(draw(st.sampled_from(["=", "!="])), draw(_node_terms(names)),
                     draw(_node_terms(names)))
    if kind == "edge":
        label = draw(st.one_of(st.none(), _label_terms(names)))
        mark = draw(st.one_of(st.none(), MARKS.map(F.MarkConst)))
        return F.EdgePred(draw(_node_terms(names)), draw(_node_terms(names)), label, mark)
    if kind == "type":
        return F.TypePred(draw(st.sampled_from(F.TYPE_PREDICATES)), draw(_label_terms(names)))
    op = draw(st.sampled_from(F.COMPARISONS))
    return F.Cmp(op, draw(_label_terms(names)), draw(_label_terms(names)))


def commands():
    leaf = st.one_of(st.sampled_from(["r", "s", "t1"]).map(lambda n: P.Call((n,))),
                     st.just(P.Call(("a", "b"))), st.just(P.SKIP), st.just(P.FAIL),
                     st.just(P.BREAK))
    return st.recursive(leaf, lambda c: st.one_of(
        st.tuples(c, c).map(lambda t: P.seq(*P.flatten_seq(P.Seq(*t)))),
        c.map(P.Loop),
        st.tuples(c, c, c).map(lambda t: P.If(*t)),
        st.tuples(c, c, c).map(lambda t: P.Try(*t)),
        st.tuples(c, c).map(lambda t: P.Choice(*t))), max_leaves=6)
