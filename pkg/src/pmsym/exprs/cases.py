"""Exponent-parameter case regimes and term collection.

The classifying exponents are q (source power) and r (diffusion power);
the regimes are the coincidence patterns among {q, r+1, 1}.  Applying a
case substitutes the implied parameter relations everywhere, so powers
of u that become equal merge before any coefficient splitting.
"""

from __future__ import annotations

import enum
from fractions import Fraction

from .nodes import (ONE, ZERO, Add, Jet, Param, Rat, add, as_affine_qr,
                    base_split, mul, pow_, term_split, to_expr)
from .calculus import substitute

Q = Param("q")
R = Param("r")
U = Jet()


class Case(enum.Enum):
    GENERIC = "generic"
    Q_EQ_RPLUS1 = "q_eq_rplus1"
    Q_EQ_1 = "q_eq_1"
    R_EQ_0 = "r_eq_0"
    Q_EQ_RPLUS1_EQ_1 = "q_eq_rplus1_eq_1"

    @property
    def label(self):
        return _LABELS[self]

    @classmethod
    def from_string(cls, s):
        key = s.strip().lower().replace("-", "_")
        got = _ALIASES.get(key)
        if got is None:
            raise ValueError(f"unknown case {s!r}; expected one of "
                             + ", ".join(sorted({v.label for v in cls})))
        return got

    @property
    def substitutions(self):
        if self is Case.GENERIC:
            return ()
        if self is Case.Q_EQ_RPLUS1:
            return ((Q, add(R, ONE)),)
        if self is Case.Q_EQ_1:
            return ((Q, ONE),)
        if self is Case.R_EQ_0:
            return ((R, ZERO),)
        return ((Q, ONE), (R, ZERO))

    def admits(self, q, r):
        """Whether concrete parameter values fall in this regime."""
        q, r = Fraction(q), Fraction(r)
        if self is Case.GENERIC:
            return q != 1 and q != r + 1 and r != 0
        if self is Case.Q_EQ_RPLUS1:
            return q == r + 1 and r != 0
        if self is Case.Q_EQ_1:
            return q == 1 and r != 0
        if self is Case.R_EQ_0:
            return r == 0 and q != 1
        return q == 1 and r == 0


_LABELS = {
    Case.GENERIC: "Generic",
    Case.Q_EQ_RPLUS1: "QeqRplus1",
    Case.Q_EQ_1: "Qeq1",
    Case.R_EQ_0: "Req0",
    Case.Q_EQ_RPLUS1_EQ_1: "QeqRplus1eq1",
}

_ALIASES = {}
for _c in Case:
    _ALIASES[_c.value] = _c
    _ALIASES[_c.label.lower()] = _c
_ALIASES.update({
    "generic": Case.GENERIC, "c1": Case.GENERIC, "case1": Case.GENERIC,
    "qr1": Case.Q_EQ_RPLUS1, "c2": Case.Q_EQ_RPLUS1, "case2": Case.Q_EQ_RPLUS1,
    "q1": Case.Q_EQ_1, "c3": Case.Q_EQ_1, "case3": Case.Q_EQ_1,
    "r0": Case.R_EQ_0, "c4": Case.R_EQ_0, "case4": Case.R_EQ_0,
    "qr1eq1": Case.Q_EQ_RPLUS1_EQ_1, "c5": Case.Q_EQ_RPLUS1_EQ_1,
    "case5": Case.Q_EQ_RPLUS1_EQ_1,
})


def case_for(q, r):
    """The regime containing concrete exponents (q, r)."""
    try:
        q, r = Fraction(q), Fraction(r)
    except TypeError:
        raise ValueError(f"exponents must be rational numbers, "
                         f"got q={q!r}, r={r!r}") from None
    if q == r + 1:
        return Case.Q_EQ_RPLUS1_EQ_1 if q == 1 else Case.Q_EQ_RPLUS1
    if q == 1:
        return Case.Q_EQ_1
    if r == 0:
        return Case.R_EQ_0
    return Case.GENERIC


def apply_case(e, case):
    e = to_expr(e)
    for target, repl in case.substitutions:
        e = substitute(e, target, repl)
    return e


def u_exponent(term):
    """Affine (constant, q-coef, r-coef) exponent of the u factor of a term."""
    _, fs = term_split(term)
    for f in fs:
        b, ex = base_split(f)
        if isinstance(b, Jet) and b.order == 0:
            aff = as_affine_qr(ex)
            if aff is None:
                raise ValueError(f"u exponent {ex!r} is not affine in q, r")
            return aff
    return (Fraction(0), Fraction(0), Fraction(0))


def split_u_classes(e):
    """Group the terms of a sum by the exponent of their u factor.

    Returns {affine exponent triple: coefficient sum with u^e removed}.
    """
    e = to_expr(e)
    terms = e.terms if isinstance(e, Add) else (e,)
    if e == ZERO:
        return {}
    out = {}
    uinv = {}
    for t in terms:
        key = u_exponent(t)
        if key not in uinv:
            a, b, c = key
            ex = add(Rat(a), mul(Rat(b), Q), mul(Rat(c), R))
            uinv[key] = pow_(U, mul(Rat(-1), ex)) if ex != ZERO else ONE
        out.setdefault(key, []).append(mul(t, uinv[key]))
    return {k: add(*v) for k, v in out.items()}


def jet_part(term):
    """The jet-symbol content of a term as a sorted factor tuple."""
    _, fs = term_split(term)
    out = []
    for f in fs:
        b, _ = base_split(f)
        if isinstance(b, Jet) and b.order > 0:
            out.append(f)
    return tuple(out)


def collect_jets(e):
    """Group the terms of a sum by their positive-order jet monomial.

    Returns {jet factor tuple: coefficient sum}; order-0 u factors stay
    in the coefficients.
    """
    e = to_expr(e)
    if e == ZERO:
        return {}
    terms = e.terms if isinstance(e, Add) else (e,)
    out = {}
    for t in terms:
        jets = jet_part(t)
        inverses = []
        for f in jets:
            b, ex = base_split(f)
            inverses.append(pow_(b, mul(Rat(-1), ex)))
        out.setdefault(jets, []).append(mul(t, *inverses))
    return {k: add(*v) for k, v in out.items()}


def _monomial_signature(m):
    """(jet factor tuple, u exponent or None) of a collection monomial."""
    _, fs = term_split(m)
    has_u = any(isinstance(base_split(f)[0], Jet) and base_split(f)[0].order == 0
                for f in fs)
    return (jet_part(m), u_exponent(m) if has_u else None)


def collect(e, monomials, assumption=Case.GENERIC):
    """Coefficient comparison against a list of jet/power monomials.

    Applies the case substitutions to everything first (so u-exponents
    forced equal by the regime merge), then decomposes the sum as
    e = sum(coeff_m * m) + remainder.  A term matches a monomial when
    their positive-order jet factors agree exactly and, if the monomial
    carries a power of u, the u-exponents agree too.  Returns
    ({monomial: coefficient}, remainder); unmatched listed monomials get
    coefficient 0, and first match wins if case merging makes two listed
    monomials coincide.
    """
    e = apply_case(to_expr(e), assumption)
    sigs = []
    for m in monomials:
        mc = apply_case(to_expr(m), assumption)
        sigs.append(_monomial_signature(mc))
    coeffs = {m: [] for m in monomials}
    rest = []
    terms = e.terms if isinstance(e, Add) else ((e,) if e != ZERO else ())
    for t in terms:
        jets = jet_part(t)
        ue = u_exponent(t)
        hit = None
        for m, (mjets, mue) in zip(monomials, sigs):
            if jets == mjets and (mue is None or mue == ue):
                hit = (m, mue)
                break
        if hit is None:
            rest.append(t)
            continue
        m, mue = hit
        inverses = []
        for f in jets:
            b, ex = base_split(f)
            inverses.append(pow_(b, mul(Rat(-1), ex)))
        if mue is not None and mue != (0, 0, 0):
            a, bq, cr = mue
            ex = add(Rat(a), mul(Rat(bq), Q), mul(Rat(cr), R))
            inverses.append(pow_(U, mul(Rat(-1), ex)))
        coeffs[m].append(mul(t, *inverses))
    return ({m: add(*v) for m, v in coeffs.items()}, add(*rest))
