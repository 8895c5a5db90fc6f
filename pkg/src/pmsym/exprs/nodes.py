"""Exact expression trees with canonicalizing constructors.

Node kinds: rational constants, coordinates x1..xn, the time symbol t,
jet symbols u / u_1 / u_12 / u_t / u_1t / ... (spatial indices sorted,
order at most three), parameters, opaque function symbols carrying
formal partial derivatives, k-ary sums and products, powers, and the
transcendental heads arctan, ln, exp.

Construction canonicalizes:

* sums and products are flattened and sorted under a fixed total order;
* like terms merge by adding rational coefficients, like bases merge by
  adding exponents;
* positive integer powers of sums are expanded, so polynomial parts are
  always in expanded monomial form;
* sums whose terms share sum-valued denominators are combined over the
  common denominator and reduced by exact polynomial division when the
  division succeeds (this closes identities such as
  (4|x|^2 + (|x|^2-1)^2) / (|x|^2+1)^2 = 1);
* exp(a+b) splits into exp(a)*exp(b), exp(ln w) collapses, and
  exp(c*ln w) becomes w^c.

Exponents are restricted to rationals and affine forms a + b*q + c*r in
the two exponent parameters q, r.  The dependent variable u, conformal
factors and exp(...) are treated as positive, so b^p * b^s -> b^(p+s)
and (b^p)^s -> b^(p*s) are applied without case splits.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

MAX_JET_ORDER = 3
EXPONENT_PARAMS = ("q", "r")
TRANSCENDENTAL_HEADS = ("arctan", "ln", "exp")


class ExprError(ValueError):
    """Invalid expression construction or manipulation."""


class JetOrderError(ExprError):
    """A total derivative would need jets beyond the supported order."""


class Expr:
    """Base class; nodes are immutable and compared by structural key."""

    __slots__ = ("key", "_hash")

    def _init_key(self, key):
        object.__setattr__(self, "key", key)
        object.__setattr__(self, "_hash", hash(key))

    def __setattr__(self, name, value):
        raise AttributeError("expressions are immutable")

    def __eq__(self, other):
        return isinstance(other, Expr) and self.key == other.key

    def __hash__(self):
        return self._hash

    def __str__(self):
        return to_text(self)

    def __repr__(self):
        return to_text(self)

    # arithmetic sugar; delegates to the canonicalizing constructors
    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return add(self, mul(-1, to_expr(other)))

    def __rsub__(self, other):
        return add(to_expr(other), mul(-1, self))

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return mul(-1, self)

    def __truediv__(self, other):
        return mul(self, pow_(to_expr(other), -1))

    def __rtruediv__(self, other):
        return mul(to_expr(other), pow_(self, -1))

    def __pow__(self, other):
        return pow_(self, other)


class Rat(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        v = Fraction(value)
        object.__setattr__(self, "value", v)
        self._init_key((0, v))


class Coord(Expr):
    __slots__ = ("index",)

    def __init__(self, index):
        if not isinstance(index, int) or index < 1:
            raise ExprError(f"coordinate index must be a positive integer, got {index!r}")
        object.__setattr__(self, "index", index)
        self._init_key((1, index))


class TimeVar(Expr):
    __slots__ = ()

    def __init__(self):
        self._init_key((2, 0))


class Jet(Expr):
    """u and its jet prolongations; spatial indices stored sorted."""

    __slots__ = ("spatial", "t_count")

    def __init__(self, spatial=(), t_count=0):
        sp = tuple(sorted(spatial))
        if any(not isinstance(i, int) or i < 1 for i in sp):
            raise ExprError("jet spatial indices must be positive integers")
        order = len(sp) + t_count
        if t_count < 0 or order > MAX_JET_ORDER:
            raise JetOrderError(f"jet order {order} exceeds maximum {MAX_JET_ORDER}")
        object.__setattr__(self, "spatial", sp)
        object.__setattr__(self, "t_count", t_count)
        self._init_key((3, order, sp, t_count))

    @property
    def order(self):
        return len(self.spatial) + self.t_count

    def bump(self, index, max_order=2):
        """Jet with one more derivative; index is a coordinate int or 't'."""
        if self.order + 1 > max_order:
            raise JetOrderError(
                f"derivative of {to_text(self)} needs a jet of order {self.order + 1}"
            )
        if index == "t":
            return Jet(self.spatial, self.t_count + 1)
        return Jet(self.spatial + (index,), self.t_count)


class Param(Expr):
    __slots__ = ("name",)

    def __init__(self, name):
        if not name.isidentifier():
            raise ExprError(f"bad parameter name {name!r}")
        object.__setattr__(self, "name", name)
        self._init_key((4, name))


class Fn(Expr):
    """Opaque function symbol with formal partial derivatives attached.

    `deps` lists which arguments the function may depend on, a subset of
    ('x', 't', 'u').  Differentiation in a direction outside `deps`
    yields zero instead of a new formal partial.
    """

    __slots__ = ("name", "spatial", "t_count", "u_count", "deps")

    def __init__(self, name, spatial=(), t_count=0, u_count=0, deps=("x", "t", "u")):
        sp = tuple(sorted(spatial))
        dp = tuple(d for d in ("x", "t", "u") if d in deps)
        if ("x" not in dp and sp) or ("t" not in dp and t_count) or ("u" not in dp and u_count):
            raise ExprError(f"formal partial of {name} outside its dependence {dp}")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "spatial", sp)
        object.__setattr__(self, "t_count", t_count)
        object.__setattr__(self, "u_count", u_count)
        object.__setattr__(self, "deps", dp)
        self._init_key((5, name, sp, t_count, u_count, dp))

    def derive(self, direction):
        """Formal partial in a Coord / TimeVar / u-Jet direction, or zero."""
        if isinstance(direction, Coord):
            if "x" not in self.deps:
                return ZERO
            return Fn(self.name, self.spatial + (direction.index,), self.t_count,
                      self.u_count, self.deps)
        if isinstance(direction, TimeVar):
            if "t" not in self.deps:
                return ZERO
            return Fn(self.name, self.spatial, self.t_count + 1, self.u_count, self.deps)
        if isinstance(direction, Jet) and direction.order == 0:
            if "u" not in self.deps:
                return ZERO
            return Fn(self.name, self.spatial, self.t_count, self.u_count + 1, self.deps)
        return ZERO


class App(Expr):
    __slots__ = ("head", "arg")

    def __init__(self, head, arg):
        if head not in TRANSCENDENTAL_HEADS:
            raise ExprError(f"unknown function head {head!r}")
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "arg", arg)
        self._init_key((6, head, arg.key))


class Pow(Expr):
    __slots__ = ("base", "exp")

    def __init__(self, base, exp):
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "exp", exp)
        self._init_key((7, base.key, exp.key))


class Mul(Expr):
    """coef * factors[0] * factors[1] * ...; factors sorted, distinct bases."""

    __slots__ = ("coef", "factors")

    def __init__(self, coef, factors):
        object.__setattr__(self, "coef", Fraction(coef))
        object.__setattr__(self, "factors", tuple(factors))
        self._init_key((8, (self.coef.numerator, self.coef.denominator),
                        tuple(f.key for f in self.factors)))


class Add(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms):
        object.__setattr__(self, "terms", tuple(terms))
        self._init_key((9, tuple(t.key for t in self.terms)))


ZERO = Rat(0)
ONE = Rat(1)
MINUS_ONE = Rat(-1)
T = TimeVar()
U = Jet()
Q = Param("q")
R = Param("r")
EPS = Param("eps")


def to_expr(x):
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return Rat(x)
    raise ExprError(f"cannot coerce {x!r} to an expression")


def num(p, q=1):
    return Rat(Fraction(p, q))


def coord(i):
    return Coord(i)


def jet(spatial=(), t_count=0):
    return Jet(spatial, t_count)


def param(name):
    return Param(name)


def fn(name, spatial=(), t_count=0, u_count=0, deps=("x", "t", "u")):
    return Fn(name, spatial, t_count, u_count, deps)


# ---------------------------------------------------------------------------
# term and factor decomposition

def term_split(e):
    """Decompose a non-sum expression as (rational coefficient, factor tuple)."""
    if isinstance(e, Rat):
        return e.value, ()
    if isinstance(e, Mul):
        return e.coef, e.factors
    return Fraction(1), (e,)


def base_split(f):
    """Decompose a factor as (base, exponent expression)."""
    if isinstance(f, Pow):
        return f.base, f.exp
    return f, ONE


def mono_key(e):
    """Sort/merge key of a term: factor keys without the coefficient."""
    _, fs = term_split(e)
    return tuple(f.key for f in fs)


def _remul(coef, factors):
    if coef == 0 or not factors:
        return Rat(coef)
    if coef == 1 and len(factors) == 1:
        return factors[0]
    return Mul(coef, factors)


# ---------------------------------------------------------------------------
# exponent lattice: rational + affine in (q, r)

def as_affine_qr(e):
    """Return (a, b, c) with e = a + b*q + c*r over rationals, or None."""
    a = Fraction(0)
    b = Fraction(0)
    c = Fraction(0)
    terms = e.terms if isinstance(e, Add) else (e,)
    for t in terms:
        if isinstance(t, Rat):
            a += t.value
            continue
        coefv, fs = term_split(t)
        if len(fs) != 1 or not isinstance(fs[0], Param):
            return None
        if fs[0].name == "q":
            b += coefv
        elif fs[0].name == "r":
            c += coefv
        else:
            return None
    return a, b, c


def _check_exponent(e):
    if as_affine_qr(e) is None:
        raise ExprError(f"exponent {to_text(e)} is not rational or affine in q, r")


def _exp_product(e1, e2):
    """Product of two exponents, staying inside the affine lattice."""
    if isinstance(e1, Rat) or isinstance(e2, Rat):
        return mul(e1, e2)
    raise ExprError("product of two non-rational exponents leaves the q,r lattice")


# ---------------------------------------------------------------------------
# canonicalizing constructors

def add(*xs):
    total = Fraction(0)
    buckets = {}

    def absorb(e):
        nonlocal total
        if isinstance(e, Rat):
            total += e.value
            return
        if isinstance(e, Add):
            for t in e.terms:
                absorb(t)
            return
        c, fs = term_split(e)
        k = tuple(f.key for f in fs)
        entry = buckets.get(k)
        if entry is None:
            buckets[k] = [c, fs]
        else:
            entry[0] += c

    for x in xs:
        absorb(to_expr(x))

    terms = [_remul(c, fs) for c, fs in buckets.values() if c != 0]
    if total != 0:
        terms.append(Rat(total))
    if not terms:
        return ZERO
    if len(terms) == 1:
        return terms[0]
    terms = _reduce_denominators(terms)
    if len(terms) == 1:
        return terms[0]
    terms.sort(key=mono_key)
    return Add(tuple(terms))


def mul(*xs):
    coef = Fraction(1)
    flat = []
    sums = []
    stack = [to_expr(x) for x in xs]
    while stack:
        e = stack.pop()
        if isinstance(e, Rat):
            coef *= e.value
        elif isinstance(e, Mul):
            coef *= e.coef
            stack.extend(e.factors)
        elif isinstance(e, Add):
            sums.append(e)
        else:
            flat.append(e)
    if coef == 0:
        return ZERO

    # merge like bases; a rewrite (exp splitting, content extraction) can
    # emit factors with new bases, so iterate until a pass is clean
    for _ in range(32):
        # exponential factors combine by summing arguments; canonical exp
        # arguments are single terms, so bucket them by monomial shape
        expb = {}
        others = []
        for f in flat:
            if isinstance(f, App) and f.head == "exp":
                expb.setdefault(mono_key(f.arg), []).append(f.arg)
            else:
                others.append(f)
        flat = others
        for args in expb.values():
            g = app("exp", add(*args)) if len(args) > 1 else App("exp", args[0])
            if isinstance(g, Rat):
                coef *= g.value
            elif isinstance(g, Mul):
                coef *= g.coef
                flat.extend(g.factors)
            elif isinstance(g, Add):
                sums.append(g)
            else:
                flat.append(g)
        merged = {}
        for f in flat:
            b, ex = base_split(f)
            entry = merged.setdefault(b.key, [b, []])
            entry[1].append(ex)
        factors = []
        redo = []
        for k in sorted(merged):
            b, exps = merged[k]
            p = pow_(b, add(*exps) if len(exps) > 1 else exps[0])
            if isinstance(p, Rat):
                coef *= p.value
            elif isinstance(p, Add):
                sums.append(p)
            elif isinstance(p, Mul):
                coef *= p.coef
                redo.extend(p.factors)
            elif base_split(p)[0].key == k:
                factors.append(p)
            else:
                redo.append(p)
        if coef == 0:
            return ZERO
        if not redo:
            break
        flat = factors + redo
    else:
        raise ExprError("factor merging did not stabilize")

    if not sums:
        factors.sort(key=lambda f: base_split(f)[0].key)
        return _remul(coef, tuple(factors))

    # distribute the pending sums over the monomial part
    out = []
    for combo in itertools.product(*[s.terms for s in sums]):
        out.append(mul(Rat(coef), *factors, *combo))
    return add(*out)


def pow_(b, e):
    b = to_expr(b)
    e = to_expr(e)
    _check_exponent(e)
    if isinstance(e, Rat):
        if e.value == 0:
            return ONE
        if e.value == 1:
            return b
    if isinstance(b, Rat):
        return _pow_rat(b.value, e)
    if isinstance(b, Mul):
        parts = [_pow_rat(b.coef, e)]
        parts.extend(pow_(f, e) for f in b.factors)
        return mul(*parts)
    if isinstance(b, Pow):
        return pow_(b.base, _exp_product(b.exp, e))
    if isinstance(b, App) and b.head == "exp":
        return app("exp", mul(e, b.arg))
    if isinstance(b, Add):
        numer, denom = _ratsimp_pair(b)
        if denom != ONE:
            return mul(pow_(numer, e), pow_(denom, mul(MINUS_ONE, e)))
        content, monic = _content_split(b)
        if content != 1:
            return mul(_pow_rat(content, e), pow_(monic, e))
        if isinstance(e, Rat) and e.value.denominator == 1 and e.value > 0:
            k = e.value.numerator
            if k > 64:
                raise ExprError(f"refusing to expand a sum to the power {k}")
            out = b
            for _ in range(k - 1):
                out = mul(out, b)
            return out
    return Pow(b, e)


def _pow_rat(c, e):
    c = Fraction(c)
    if c == 0:
        if isinstance(e, Rat) and e.value > 0:
            return ZERO
        raise ExprError("zero base with non-positive exponent")
    if c == 1:
        return ONE
    if isinstance(e, Rat) and e.value.denominator == 1:
        return Rat(c ** e.value.numerator)
    if c < 0:
        raise ExprError("negative base with non-integer exponent")
    return Pow(Rat(c), e)


def _content_split(s):
    """Split a sum as content * monic where the leading coefficient is +1-signed.

    The content is the gcd of the term coefficients, negated when the
    canonically first term is negative, so denominators like (x1^2 - 1)
    normalize to -(1 - x1^2) with a unique base.
    """
    coefs = [term_split(t)[0] for t in s.terms]
    g = Fraction(0)
    for c in coefs:
        g = _frac_gcd(g, c)
    first = min(s.terms, key=mono_key)
    if term_split(first)[0] < 0:
        g = -g
    if g == 1:
        return Fraction(1), s
    monic = Add(tuple(_remul(term_split(t)[0] / g, term_split(t)[1]) for t in s.terms))
    # re-sort through the constructor-free path: scaling preserves term order
    return g, monic


def _frac_gcd(a, b):
    a, b = abs(a), abs(b)
    if a == 0:
        return b
    if b == 0:
        return a
    return Fraction(math.gcd(a.numerator, b.numerator),
                    math.lcm(a.denominator, b.denominator))


def app(head, arg):
    arg = to_expr(arg)
    if head == "arctan":
        if arg == ZERO:
            return ZERO
        return App("arctan", arg)
    if head == "exp":
        if arg == ZERO:
            return ONE
        if isinstance(arg, Add):
            return mul(*[app("exp", t) for t in arg.terms])
        if isinstance(arg, App) and arg.head == "ln":
            return arg.arg
        if isinstance(arg, Mul):
            lns = [f for f in arg.factors if isinstance(f, App) and f.head == "ln"]
            if len(lns) == 1 and len(arg.factors) == 1:
                return pow_(lns[0].arg, Rat(arg.coef))
        return App("exp", arg)
    if head == "ln":
        if arg == ONE:
            return ZERO
        if isinstance(arg, App) and arg.head == "exp":
            return arg.arg
        if isinstance(arg, Pow):
            return mul(arg.exp, app("ln", arg.base))
        if isinstance(arg, Mul) and arg.coef > 0:
            parts = [app("ln", f) for f in arg.factors]
            if arg.coef != 1:
                parts.append(App("ln", Rat(arg.coef)))
            return add(*parts)
        if isinstance(arg, Rat) and arg.value <= 0:
            raise ExprError("ln of a non-positive constant")
        return App("ln", arg)
    raise ExprError(f"unknown function head {head!r}")


# ---------------------------------------------------------------------------
# denominator reduction: combine over sum-valued denominators, divide exactly

def _denominator_bases(term):
    out = {}
    _, fs = term_split(term)
    for f in fs:
        b, ex = base_split(f)
        if isinstance(b, Add) and isinstance(ex, Rat) \
                and ex.value.denominator == 1 and ex.value < 0:
            out[b.key] = (b, -int(ex.value))
    return out


def _combine_over_denominators(terms):
    """(numerator, common denominator bases) with sum(terms) = num / prod.

    Strips each term's sum-valued inverse factors and multiplies by the
    residual positive powers; returns (None, {}) when no term carries one.
    """
    denoms = {}
    for t in terms:
        for k, (b, d) in _denominator_bases(t).items():
            if k not in denoms or denoms[k][1] < d:
                denoms[k] = (b, d)
    if not denoms:
        return None, {}
    pieces = []
    for t in terms:
        c, fs = term_split(t)
        keep = []
        present = {}
        for f in fs:
            b, ex = base_split(f)
            if b.key in denoms and isinstance(ex, Rat) \
                    and ex.value.denominator == 1 and ex.value < 0:
                present[b.key] = -int(ex.value)
            else:
                keep.append(f)
        residual = [pow_(b, d - present.get(k, 0))
                    for k, (b, d) in denoms.items() if d - present.get(k, 0) > 0]
        pieces.append(mul(Rat(c), *keep, *residual))
    return add(*pieces), denoms


def _ratsimp_pair(e):
    """Write e as (numerator, denominator) clearing top-level inverse sums."""
    terms = e.terms if isinstance(e, Add) else (e,)
    numerator, denoms = _combine_over_denominators(terms)
    if numerator is None:
        return e, ONE
    return numerator, mul(*[pow_(b, d) for b, d in denoms.values()])


def _reduce_denominators(terms):
    numerator, denoms = _combine_over_denominators(terms)
    if numerator is None:
        return terms
    if numerator == ZERO:
        return [ZERO]

    remaining = {}
    reduced = False
    for k in sorted(denoms):
        b, d = denoms[k]
        while d > 0:
            q = _try_exact_divide(numerator, b)
            if q is None:
                break
            numerator = q
            d -= 1
            reduced = True
        if d:
            remaining[k] = (b, d)
    num_terms = numerator.terms if isinstance(numerator, Add) else (numerator,)
    if not reduced and len(num_terms) >= len(terms):
        return terms

    atoms = [pow_(b, -d) for b, d in remaining.values()]
    num_terms = numerator.terms if isinstance(numerator, Add) else (numerator,)
    out = []
    for t in num_terms:
        prod = mul(t, *atoms) if atoms else t
        if isinstance(prod, Add):
            out.extend(prod.terms)
        elif prod != ZERO:
            out.append(prod)
    if not out:
        return [ZERO]
    out.sort(key=mono_key)
    return out


def _poly_form(e):
    """Terms of e as (coef, {atom_id: positive int exp}) with an atom table.

    Factors with non-integer exponents count as opaque unit atoms; negative
    integer powers become separate inverse atoms.  Returns None when a term
    cannot be brought to this shape.
    """
    atoms = {}

    def atom_id(base, ex):
        if isinstance(ex, Rat) and ex.value.denominator == 1:
            n = int(ex.value)
            tag = (base.key, ("int", "+" if n > 0 else "-"))
            atoms.setdefault(tag, (base, ONE if n > 0 else MINUS_ONE))
            return tag, abs(n)
        tag = (base.key, ("exp", ex.key))
        atoms.setdefault(tag, (base, ex))
        return tag, 1

    terms = e.terms if isinstance(e, Add) else (e,)
    rows = []
    for t in terms:
        c, fs = term_split(t)
        mono = {}
        for f in fs:
            b, ex = base_split(f)
            tag, n = atom_id(b, ex)
            mono[tag] = mono.get(tag, 0) + n
        rows.append((c, mono))
    return rows, atoms


def exact_divide(numer, denom):
    """numer / denom as an expression when the division is exact, else None.

    Works monomial-wise over an atom table (lex order); factors with
    non-integer exponents are opaque unit atoms, so only structurally
    visible divisibility is found.
    """
    return _try_exact_divide(to_expr(numer), to_expr(denom))


def _try_exact_divide(numer, denom):
    if numer == ZERO:
        return None
    nrows, atoms = _poly_form(numer)
    drows, datoms = _poly_form(denom)
    for tag, _ in datoms.items():
        if tag[1] != ("int", "+"):
            return None
        atoms.setdefault(tag, datoms[tag])
    universe = sorted(atoms)
    index = {tag: i for i, tag in enumerate(universe)}

    def vec(mono):
        v = [0] * len(universe)
        for tag, n in mono.items():
            v[index[tag]] = n
        return tuple(v)

    def to_dict(rows):
        out = {}
        for c, mono in rows:
            v = vec(mono)
            out[v] = out.get(v, Fraction(0)) + c
            if out[v] == 0:
                del out[v]
        return out

    rd = to_dict(drows)
    rn = to_dict(nrows)
    lead_d = max(rd)
    quotient = {}
    while rn:
        lead_n = max(rn)
        dv = tuple(a - b for a, b in zip(lead_n, lead_d))
        if any(x < 0 for x in dv):
            return None
        qc = rn[lead_n] / rd[lead_d]
        quotient[dv] = quotient.get(dv, Fraction(0)) + qc
        for mv, mc in rd.items():
            key = tuple(a + b for a, b in zip(dv, mv))
            val = rn.get(key, Fraction(0)) - qc * mc
            if val == 0:
                rn.pop(key, None)
            else:
                rn[key] = val

    parts = []
    for v, c in quotient.items():
        fs = [Rat(c)]
        for i, n in enumerate(v):
            if n:
                base, unit_exp = atoms[universe[i]]
                fs.append(pow_(base, mul(unit_exp, Rat(n))))
        parts.append(mul(*fs))
    return add(*parts)


# ---------------------------------------------------------------------------
# simplify = rebuild through the constructors

def simplify(e):
    """Rebuild bottom-up; canonical trees come back equal to themselves."""
    if isinstance(e, (Rat, Coord, TimeVar, Jet, Param, Fn)):
        return e
    if isinstance(e, App):
        return app(e.head, simplify(e.arg))
    if isinstance(e, Pow):
        return pow_(simplify(e.base), simplify(e.exp))
    if isinstance(e, Mul):
        return mul(Rat(e.coef), *[simplify(f) for f in e.factors])
    if isinstance(e, Add):
        return add(*[simplify(t) for t in e.terms])
    raise ExprError(f"unknown node {e!r}")


# ---------------------------------------------------------------------------
# printer; parse(to_text(e)) reproduces e for canonical e

def to_text(e):
    return _print(e)


def _print(e):
    if isinstance(e, Rat):
        return str(e.value)
    if isinstance(e, Coord):
        return f"x{e.index}"
    if isinstance(e, TimeVar):
        return "t"
    if isinstance(e, Jet):
        if e.order == 0:
            return "u"
        return "u_" + "".join(str(i) for i in e.spatial) + "t" * e.t_count
    if isinstance(e, Param):
        return e.name
    if isinstance(e, Fn):
        suffix = "".join(str(i) for i in e.spatial) + "t" * e.t_count + "u" * e.u_count
        return e.name + ("_" + suffix if suffix else "")
    if isinstance(e, App):
        return f"{e.head}({_print(e.arg)})"
    if isinstance(e, Pow):
        bs = _print(e.base)
        if isinstance(e.base, (Add, Mul, Pow)) or (
                isinstance(e.base, Rat) and (e.base.value < 0 or e.base.value.denominator != 1)):
            bs = f"({bs})"
        ex = e.exp
        if isinstance(ex, Rat) and ex.value.denominator == 1 and ex.value > 0:
            return f"{bs}^{int(ex.value)}"
        return f"{bs}^({_print(ex)})"
    if isinstance(e, Mul):
        pieces = []
        for f in e.factors:
            fs = _print(f)
            if isinstance(f, Add):
                fs = f"({fs})"
            pieces.append(fs)
        body = "*".join(pieces)
        if e.coef == 1:
            return body
        if e.coef == -1:
            return "-" + body
        return f"{e.coef}*{body}"
    if isinstance(e, Add):
        out = _print(e.terms[0])
        for t in e.terms[1:]:
            c, fs = term_split(t)
            if c < 0:
                out += " - " + _print(_remul(-c, fs))
            else:
                out += " + " + _print(t)
        return out
    raise ExprError(f"unknown node {e!r}")
