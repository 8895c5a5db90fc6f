"""Text form for expressions.

Grammar (whitespace insensitive):

    expr     := term (("+" | "-") term)*
    term     := signed (("*" | "/") signed)*
    signed   := ("+" | "-")* power
    power    := atom ("^" exponent)?
    exponent := INT | "(" expr ")"
    atom     := INT | NAME | NAME "(" expr ")" | "(" expr ")"

Names resolve to: `t` the time variable, `u` and `u_<suffix>` jet symbols
(suffix = spatial digits then t's, e.g. u_1, u_12, u_t, u_1t, u_tt),
`x<k>` the k-th coordinate, `arctan`/`ln`/`exp` applied heads, registered
opaque function symbols with a `_<digits><t's><u's>` partial suffix, and
anything else a named parameter.  Numbers are integers; rationals are
written with `/`.  `parse(to_text(e)) == e` for canonical `e`.
"""

from __future__ import annotations

import re

from .nodes import (Coord, ExprError, Fn, Jet, Param, TimeVar, add, app, mul,
                    num, pow_)

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(\*\*|[-+*/^()]))")

_JET_SUFFIX = re.compile(r"^([1-9]*)(t*)$")
_FN_SUFFIX = re.compile(r"^([1-9]*)(t*)(u*)$")


def tokenize(text):
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise ExprError(f"bad character at {text[pos:pos + 10]!r}")
            break
        pos = m.end()
        if m.group(1):
            out.append(("num", int(m.group(1))))
        elif m.group(2):
            out.append(("name", m.group(2)))
        else:
            op = m.group(3)
            out.append(("op", "^" if op == "**" else op))
    out.append(("end", ""))
    return out


class _Parser:
    def __init__(self, tokens, functions, n):
        self.toks = tokens
        self.i = 0
        self.functions = functions or {}
        self.n = n

    def check_index(self, i, what):
        if self.n is not None and i > self.n:
            raise ExprError(f"{what} index {i} out of range for n={self.n}")
        return i

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, value=None):
        k, v = self.toks[self.i]
        if (kind and k != kind) or (value is not None and v != value):
            raise ExprError(f"expected {value or kind}, got {v!r}")
        self.i += 1
        return v

    def expr(self):
        terms = [self.term()]
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            op = self.take("op")
            t = self.term()
            terms.append(t if op == "+" else mul(-1, t))
        return add(*terms)

    def term(self):
        out = self.signed()
        while self.peek() == ("op", "*") or self.peek() == ("op", "/"):
            op = self.take("op")
            rhs = self.signed()
            out = mul(out, rhs) if op == "*" else mul(out, pow_(rhs, -1))
        return out

    def signed(self):
        sign = 1
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            if self.take("op") == "-":
                sign = -sign
        p = self.power()
        return p if sign == 1 else mul(-1, p)

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take("op")
            return pow_(base, self.exponent())
        return base

    def exponent(self):
        k, v = self.peek()
        if k == "num":
            self.take()
            return num(v)
        if k == "name":
            self.take()
            return self.name(v)
        self.take("op", "(")
        e = self.expr()
        self.take("op", ")")
        return e

    def atom(self):
        k, v = self.peek()
        if k == "num":
            self.take()
            return num(v)
        if k == "op" and v == "(":
            self.take()
            e = self.expr()
            self.take("op", ")")
            return e
        if k != "name":
            raise ExprError(f"unexpected token {v!r}")
        self.take()
        if v in ("arctan", "ln", "exp"):
            self.take("op", "(")
            arg = self.expr()
            self.take("op", ")")
            return app(v, arg)
        return self.name(v)

    def name(self, v):
        if v == "t":
            return TimeVar()
        if v == "u":
            return Jet()
        if v.startswith("u_"):
            m = _JET_SUFFIX.match(v[2:])
            if not m or not v[2:]:
                raise ExprError(f"bad jet symbol {v!r}")
            sp = tuple(self.check_index(int(c), "jet") for c in m.group(1))
            return Jet(sp, len(m.group(2)))
        if v[0] == "x" and v[1:].isdigit():
            return Coord(self.check_index(int(v[1:]), "coordinate"))
        base, _, suffix = v.partition("_")
        if base in self.functions:
            deps = self.functions[base]
            m = _FN_SUFFIX.match(suffix)
            if not m:
                raise ExprError(f"bad partial suffix in {v!r}")
            return Fn(base, tuple(int(c) for c in m.group(1)),
                      len(m.group(2)), len(m.group(3)), deps)
        if "_" in v:
            raise ExprError(f"unregistered function symbol {v!r}")
        return Param(v)


def parse(text, n=None, functions=None):
    """Parse text into a canonical expression.

    `n` bounds coordinate and jet indices when given.  `functions` maps
    opaque function base names to their dependence tuples, e.g.
    {"alpha": ("x", "t"), "eta": ("t",)}.
    """
    p = _Parser(tokenize(text), functions, n)
    e = p.expr()
    p.take("end")
    return e
