"""Differentiation, substitution, evaluation, compilation.

Two derivative notions live here.  `partial` treats every symbol (jet
symbols included) as an independent coordinate of jet space.  `total`
is the total derivative along x_i or t: jets bump their multi-index and
opaque function symbols pick up a chain-rule u-term.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .nodes import (MINUS_ONE, ONE, ZERO, Add, App, Coord, Expr, ExprError,
                    Fn, Jet, Mul, Param, Pow, Rat, TimeVar, add, app, mul,
                    pow_, to_expr)

T = TimeVar()
U = Jet()


def _algebraic_derivative(e, rec):
    """Sum/product/chain rules; `rec` handles leaves."""
    if isinstance(e, Add):
        return add(*[rec(t) for t in e.terms])
    if isinstance(e, Mul):
        parts = []
        fs = e.factors
        for i, f in enumerate(fs):
            df = rec(f)
            if df != ZERO:
                parts.append(mul(Rat(e.coef), df, *fs[:i], *fs[i + 1:]))
        return add(*parts)
    if isinstance(e, Pow):
        db = rec(e.base)
        de = rec(e.exp)
        parts = []
        if db != ZERO:
            parts.append(mul(e.exp, db, pow_(e.base, add(e.exp, MINUS_ONE))))
        if de != ZERO:
            parts.append(mul(de, app("ln", e.base), pow_(e.base, e.exp)))
        return add(*parts)
    if isinstance(e, App):
        da = rec(e.arg)
        if da == ZERO:
            return ZERO
        if e.head == "exp":
            return mul(da, e)
        if e.head == "ln":
            return mul(da, pow_(e.arg, -1))
        if e.head == "arctan":
            return mul(da, pow_(add(ONE, mul(e.arg, e.arg)), -1))
    raise ExprError(f"cannot differentiate {e!r}")


def partial(e, v):
    """Partial derivative wrt an independent symbol (Coord, t, Jet, Param)."""
    v = to_expr(v)

    def rec(node):
        if node == v:
            return ONE
        if isinstance(node, (Rat, Coord, TimeVar, Jet, Param)):
            return ZERO
        if isinstance(node, Fn):
            if isinstance(v, (Coord, TimeVar)) or (isinstance(v, Jet) and v.order == 0):
                return node.derive(v)
            return ZERO
        return _algebraic_derivative(node, rec)

    return rec(e)


def total_derivative(e, direction, max_order=2):
    """Total derivative D_i (direction=int i) or D_t (direction='t').

    Jets beyond `max_order` raise; opaque functions f(x,t,u) expand as
    f_{x_i} + f_u u_i along x_i and f_t + f_u u_t along t.
    """
    if direction == "t":
        leaf_sym = T
        chain = Jet((), 1)
    else:
        leaf_sym = Coord(direction)
        chain = Jet((direction,))

    def rec(node):
        if isinstance(node, Rat) or isinstance(node, Param):
            return ZERO
        if isinstance(node, (Coord, TimeVar)):
            return ONE if node == leaf_sym else ZERO
        if isinstance(node, Jet):
            return node.bump(direction, max_order)
        if isinstance(node, Fn):
            out = node.derive(leaf_sym)
            du = node.derive(U)
            if du != ZERO:
                out = add(out, mul(du, chain))
            return out
        return _algebraic_derivative(node, rec)

    return rec(e)


def substitute(e, target, replacement):
    """Replace exact subtree matches of `target`, rebuilding canonically."""
    target = to_expr(target)
    replacement = to_expr(replacement)
    cache = {}

    def rec(node):
        got = cache.get(node.key)
        if got is not None:
            return got
        if node == target:
            out = replacement
        elif isinstance(node, (Rat, Coord, TimeVar, Jet, Param, Fn)):
            out = node
        elif isinstance(node, App):
            out = app(node.head, rec(node.arg))
        elif isinstance(node, Pow):
            out = pow_(rec(node.base), rec(node.exp))
        elif isinstance(node, Mul):
            out = mul(Rat(node.coef), *[rec(f) for f in node.factors])
        elif isinstance(node, Add):
            out = add(*[rec(t) for t in node.terms])
        else:
            raise ExprError(f"unknown node {node!r}")
        cache[node.key] = out
        return out

    return rec(e)


def subst_many(e, pairs):
    for target, replacement in pairs:
        e = substitute(e, target, replacement)
    return e


def subst_functions(e, mapping):
    """Replace opaque function symbols by concrete expressions.

    `mapping` sends a base name to an expression in (x, t, u); stored
    partial suffixes are applied with `partial` after lookup.
    """
    cache = {}

    def rec(node):
        got = cache.get(node.key)
        if got is not None:
            return got
        if isinstance(node, Fn) and node.name in mapping:
            out = to_expr(mapping[node.name])
            for i in node.spatial:
                out = partial(out, Coord(i))
            for _ in range(node.t_count):
                out = partial(out, T)
            for _ in range(node.u_count):
                out = partial(out, U)
        elif isinstance(node, (Rat, Coord, TimeVar, Jet, Param, Fn)):
            out = node
        elif isinstance(node, App):
            out = app(node.head, rec(node.arg))
        elif isinstance(node, Pow):
            out = pow_(rec(node.base), rec(node.exp))
        elif isinstance(node, Mul):
            out = mul(Rat(node.coef), *[rec(f) for f in node.factors])
        elif isinstance(node, Add):
            out = add(*[rec(t) for t in node.terms])
        else:
            raise ExprError(f"unknown node {node!r}")
        cache[node.key] = out
        return out

    return rec(e)


def free_symbols(e):
    """All leaf symbols (coordinates, t, jets, parameters, functions)."""
    out = set()

    def rec(node):
        if isinstance(node, (Coord, TimeVar, Jet, Param, Fn)):
            out.add(node)
        elif isinstance(node, App):
            rec(node.arg)
        elif isinstance(node, Pow):
            rec(node.base)
            rec(node.exp)
        elif isinstance(node, Mul):
            for f in node.factors:
                rec(f)
        elif isinstance(node, Add):
            for t in node.terms:
                rec(t)

    rec(e)
    return out


def evaluate(e, env):
    """Numeric value with `env` mapping leaf expressions to floats."""
    lookup = {k.key: float(v) for k, v in env.items()}

    def rec(node):
        if isinstance(node, Rat):
            return float(node.value)
        got = lookup.get(node.key)
        if got is not None:
            return got
        if isinstance(node, (Coord, TimeVar, Jet, Param, Fn)):
            raise ExprError(f"no value for {node!r}")
        if isinstance(node, App):
            a = rec(node.arg)
            if node.head == "exp":
                return math.exp(a)
            if node.head == "ln":
                return math.log(a)
            return math.atan(a)
        if isinstance(node, Pow):
            return rec(node.base) ** rec(node.exp)
        if isinstance(node, Mul):
            out = float(node.coef)
            for f in node.factors:
                out *= rec(f)
            return out
        if isinstance(node, Add):
            return math.fsum(rec(t) for t in node.terms)
        raise ExprError(f"unknown node {node!r}")

    return rec(e)


def compile_expr(e, symbols):
    """Compile to a positional python function of the given leaf symbols.

    Returns f with f(*values) == evaluate(e, dict(zip(symbols, values))).
    Repeated subtrees are bound once.
    """
    names = {s.key: f"a{i}" for i, s in enumerate(symbols)}
    prelude = []
    seen = {}

    def frac(v):
        return repr(float(v)) if v.denominator != 1 else str(v.numerator)

    def rec(node):
        if isinstance(node, Rat):
            return frac(node.value)
        got = names.get(node.key)
        if got is not None:
            return got
        if isinstance(node, (Coord, TimeVar, Jet, Param, Fn)):
            raise ExprError(f"unbound symbol {node!r} in compile")
        cached = seen.get(node.key)
        if cached is not None:
            return cached
        if isinstance(node, App):
            fname = {"exp": "_exp", "ln": "_log", "arctan": "_atan"}[node.head]
            src = f"{fname}({rec(node.arg)})"
        elif isinstance(node, Pow):
            src = f"({rec(node.base)})**({rec(node.exp)})"
        elif isinstance(node, Mul):
            bits = [frac(node.coef)] if node.coef != 1 else []
            bits.extend(f"({rec(f)})" for f in node.factors)
            src = "*".join(bits)
        elif isinstance(node, Add):
            src = " + ".join(f"({rec(t)})" for t in node.terms)
        else:
            raise ExprError(f"unknown node {node!r}")
        name = f"s{len(prelude)}"
        prelude.append(f"    {name} = {src}")
        seen[node.key] = name
        return name

    body = rec(e)
    args = ", ".join(names[s.key] for s in symbols)
    lines = [f"def _f({args}):"] + prelude + [f"    return {body}"]
    ns = {"_exp": math.exp, "_log": math.log, "_atan": math.atan}
    exec("\n".join(lines), ns)
    return ns["_f"]
