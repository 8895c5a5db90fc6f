"""Shared helpers: a seeded random expression builder for property runs."""

from __future__ import annotations

import random
from fractions import Fraction

from pmsym.exprs import (ExprError, add, app, coord, jet, mul, num, param,
                         pow_, T, U)

# atoms a random expression may start from; jets kept at first order so
# two total derivatives stay inside the order cap
_ATOMS = [coord(1), coord(2), T, U, jet((1,)), jet((2,)), jet((), 1),
          param("eps")]


def random_expr(rng: random.Random, depth: int = 3, safe: bool = False):
    """Draw a small expression tree.

    `safe` restricts to pieces that evaluate without domain trouble on
    all-real inputs (for finite-difference comparisons): no ln, no
    negative powers, no bare rational exponents.
    """
    if depth <= 0 or rng.random() < 0.25:
        pick = rng.random()
        if pick < 0.2:
            return num(Fraction(rng.randint(-6, 6), rng.randint(1, 4)))
        return _ATOMS[rng.randrange(len(_ATOMS))]
    op = rng.choice(["add", "add", "mul", "mul", "pow", "exp", "arctan", "ln"])
    if op == "add":
        k = rng.randint(2, 3)
        return add(*[random_expr(rng, depth - 1, safe) for _ in range(k)])
    if op == "mul":
        k = rng.randint(2, 3)
        return mul(*[random_expr(rng, depth - 1, safe) for _ in range(k)])
    if op == "pow":
        base = random_expr(rng, depth - 1, safe)
        if safe:
            return pow_(base, rng.randint(1, 3))
        if rng.random() < 0.3:
            ex = Fraction(rng.choice([-3, -1, 1, 2]), rng.choice([1, 2]))
        else:
            ex = rng.choice([-2, -1, 2, 3])
        try:
            return pow_(base, ex)
        except ExprError:  # zero to a negative power, negative to a root
            return pow_(add(num(1), pow_(base, 2)), ex)
    if op == "exp":
        return app("exp", random_expr(rng, depth - 2, safe))
    if op == "arctan":
        return app("arctan", random_expr(rng, depth - 2, safe))
    inner = random_expr(rng, depth - 2, safe)
    if safe:  # ln needs a positive argument; square and shift one
        return app("ln", add(num(1), pow_(inner, 2)))
    try:
        return app("ln", inner)
    except ExprError:  # kernel refuses ln of a non-positive constant
        return app("ln", add(num(1), pow_(inner, 2)))
