"""Hand-transcribed reference formulas for the 2-colouring example.

These are independent oracles: they are written out by hand, never
produced by the library's constructions.
"""
F_BODY = "(mV(x) = red \\/ mV(x) = blue \\/ mV(x) = none) /\\ ~root(x)"

SLP_F_INIT = ("existsV y (forallV x (x = y \\/ (" + F_BODY + ")) /\\ mV(y) = red /\\ ~root(y))"
              " /\\ forallE x (mE(x) = none)")

SLP_F_COL = ("existsV u, v (forallV x (x = u \\/ x = v \\/ (" + F_BODY + "))"
             " /\\ mV(u) = red /\\ mV(v) = blue /\\ ~root(u) /\\ ~root(v)"
             " /\\ existsE y ((s(y) = u /\\ t(y) = v) \\/ (t(y) = u /\\ s(y) = v)))"
             " /\\ forallE x (mE(x) = none)")

SLP_F_UNMARK = ("existsV y (forallV x (x = y \\/ (" + F_BODY + ")) /\\ mV(y) = none /\\ ~root(y))"
                " /\\ forallE x (mE(x) = none)")

FAIL_COLOUR = ("~existsE x ((((mV(s(x)) = red \\/ mV(s(x)) = blue) /\\ mV(t(x)) = none)"
               " \\/ ((mV(t(x)) = red \\/ mV(t(x)) = blue) /\\ mV(s(x)) = none))"
               " /\\ ~root(s(x)) /\\ ~root(t(x)))")

FAIL_INIT_COLOUR = "~existsV x (mV(x) = none /\\ ~root(x))"

FAIL_UNMARK = "~existsV x (mV(x) != none /\\ ~root(x))"

FAIL_ILLEGAL = ("~existsE x (s(x) != t(x) /\\ ((mV(s(x)) = red /\\ mV(t(x)) = red)"
                " \\/ (mV(s(x)) = blue /\\ mV(t(x)) = blue)))")

SUCCESS_ILLEGAL = ("existsE x (s(x) != t(x) /\\ ((mV(s(x)) = red /\\ mV(t(x)) = red)"
                   " \\/ (mV(s(x)) = blue /\\ mV(t(x)) = blue)))")
