"""Second prolongation, symmetry criterion, and determining systems.

The vector field v = ξ^i ∂_i + η ∂_t + φ ∂_u prolongs to second order
jet space; applying pr²v to the evolution equation F = 0 and eliminating
u_t on the solution manifold leaves an expression polynomial in the
remaining jets.  Coefficient comparison over jet monomials yields the
determining system.  Derivation runs in three stages that mirror the
hand reduction: a fully general ansatz (which forces η = η(t),
ξ^k = ξ^k(x,t), φ_uu = 0), the restricted ansatz (yielding the per-jet
comparison conditions), and the linear ansatz φ = α(x,t)·u (yielding
the reduced system that feeds the case analysis).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from math import gcd, lcm

from .exprs import (MINUS_ONE, ONE, Q, R, T, U, ZERO, Add, Coord, Expr,
                    ExprError, Fn, Jet, Rat, add, apply_case, as_affine_qr,
                    base_split, Case, collect_jets, coord, exact_divide,
                    free_symbols, fn, jet, mono_key, mul, num, partial, pow_,
                    simplify, subst_functions, subst_many, substitute,
                    term_split, to_expr, to_text, total_derivative)
from .geometry import ManifoldModel

U_T = jet((), 1)


@dataclass(frozen=True)
class VectorFieldAnsatz:
    """Components ξ^1..ξ^n, η, φ as expressions in (x, t, u) only."""
    xi: tuple
    eta: Expr
    phi: Expr

    def __post_init__(self):
        object.__setattr__(self, "xi", tuple(to_expr(c) for c in self.xi))
        object.__setattr__(self, "eta", to_expr(self.eta))
        object.__setattr__(self, "phi", to_expr(self.phi))
        for comp in (*self.xi, self.eta, self.phi):
            for s in free_symbols(comp):
                if isinstance(s, Jet) and s.order > 0:
                    raise ExprError(f"ansatz component {comp!r} contains jet {s!r}")

    @property
    def n(self):
        return len(self.xi)


def general_ansatz(n, xi_deps=("x", "t", "u"), eta_deps=("x", "t", "u"),
                   phi_deps=("x", "t", "u"), linear_phi=False):
    """Opaque-function ansatz; `linear_phi` sets φ = α(x,t)·u."""
    xi = tuple(fn(f"xi{k}", deps=xi_deps) for k in range(1, n + 1))
    eta = fn("eta", deps=eta_deps)
    phi = mul(fn("alpha", deps=("x", "t")), U) if linear_phi else fn("phi", deps=phi_deps)
    return VectorFieldAnsatz(xi, eta, phi)


ANSATZ_FUNCTIONS = {
    **{f"xi{k}": ("x", "t", "u") for k in range(1, 7)},
    "eta": ("x", "t", "u"),
    "phi": ("x", "t", "u"),
    "alpha": ("x", "t"),
}


@dataclass(frozen=True)
class PDEInstance:
    """u^r u_t = Δ_g u + u^q on a model manifold, stored F-cleared."""
    manifold: ManifoldModel
    r: Expr = R
    q: Expr = Q

    def __post_init__(self):
        object.__setattr__(self, "r", to_expr(self.r))
        object.__setattr__(self, "q", to_expr(self.q))
        for name, e in (("r", self.r), ("q", self.q)):
            if as_affine_qr(e) is None:
                raise ExprError(f"exponent {name} must be rational or affine in q, r")

    @property
    def n(self):
        return self.manifold.n

    def laplace_jets(self):
        """Δ_g u on jet symbols: principal·Σu_ii + drift·Σx_i u_i."""
        m = self.manifold
        lap = add(*[jet((i, i)) for i in range(1, m.n + 1)])
        drift = add(*[mul(coord(i), jet((i,))) for i in range(1, m.n + 1)])
        return add(mul(m.principal_coefficient(), lap),
                   mul(m.drift_coefficient(), drift))

    @property
    def F(self):
        """u^r·u_t − Δ_g u − u^q, the cleared form."""
        return add(mul(pow_(U, self.r), U_T),
                   mul(MINUS_ONE, self.laplace_jets()),
                   mul(MINUS_ONE, pow_(U, self.q)))

    def ut_solution(self):
        """u_t solved from F = 0: u^{−r}(Δ_g u + u^q)."""
        return mul(pow_(U, mul(MINUS_ONE, self.r)),
                   add(self.laplace_jets(), pow_(U, self.q)))


def prolong_coefficients(v):
    """(φ^i list, φ^t, {(i,j): φ^{ij} for i ≤ j}) for the ansatz v.

    Built from the recursive characteristic formulas
    φ^i = D_i φ − (D_i ξ^j) u_j − (D_i η) u_t and
    φ^{ij} = D_j φ^i − (D_j ξ^k) u_{ik} − (D_j η) u_{it}; these equal the
    fully expanded second-order displays.
    """
    n = v.n
    jets1 = [jet((k,)) for k in range(1, n + 1)]

    def first_order(direction):
        out = total_derivative(v.phi, direction)
        for k in range(n):
            out = add(out, mul(MINUS_ONE, total_derivative(v.xi[k], direction), jets1[k]))
        return add(out, mul(MINUS_ONE, total_derivative(v.eta, direction), U_T))

    phi_i = [first_order(i) for i in range(1, n + 1)]
    phi_t = first_order("t")

    phi_ij = {}
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            out = total_derivative(phi_i[i - 1], j)
            for k in range(n):
                out = add(out, mul(MINUS_ONE, total_derivative(v.xi[k], j),
                                   jet((i, k + 1))))
            out = add(out, mul(MINUS_ONE, total_derivative(v.eta, j), jet((i,), 1)))
            phi_ij[(i, j)] = out
    return phi_i, phi_t, phi_ij


def criterion_pieces(v, pde, eliminate=True):
    """The summands of pr²v F, kept separate.

    One piece per vector-field coefficient times the matching partial of
    F; their sum is the symmetry criterion.  Keeping them apart lets a
    numeric harness test the cancellation in floating point instead of
    trusting the symbolic zero.
    """
    if v.n != pde.n:
        raise ExprError(f"ansatz dimension {v.n} != pde dimension {pde.n}")
    F = pde.F
    n = pde.n
    phi_i, phi_t, phi_ij = prolong_coefficients(v)

    parts = [mul(v.eta, partial(F, T)), mul(v.phi, partial(F, U))]
    for k in range(1, n + 1):
        parts.append(mul(v.xi[k - 1], partial(F, Coord(k))))
        parts.append(mul(phi_i[k - 1], partial(F, jet((k,)))))
    parts.append(mul(phi_t, partial(F, U_T)))
    for (i, j), coeff in phi_ij.items():
        dF = partial(F, jet((i, j)))
        if dF != ZERO:
            parts.append(mul(coeff, dF))
    if eliminate:
        sol = pde.ut_solution()
        parts = [substitute(p, U_T, sol) for p in parts]
    return tuple(parts)


def apply_symmetry_criterion(v, pde, eliminate=True):
    """pr²v F, reduced modulo F = 0 by substituting the solved u_t.

    The result is polynomial in {u_i, u_{ij}, u_{it}}; mixed u_{it}
    monomials are kept as independent coordinates rather than assumed to
    cancel.
    """
    return add(*criterion_pieces(v, pde, eliminate))


# ---------------------------------------------------------------------------
# equation normalization: scale-invariant canonical form

def _content_sign(e):
    """Divide out the rational gcd of term coefficients and fix the sign."""
    if e == ZERO:
        return ZERO
    terms = e.terms if isinstance(e, Add) else (e,)
    gn, gd = 0, 1
    for t in terms:
        c, _ = term_split(t)
        gn = gcd(gn, abs(c.numerator))
        gd = lcm(gd, c.denominator)
    g = Fraction(gn, gd)
    if term_split(min(terms, key=mono_key))[0] < 0:
        g = -g
    return mul(Rat(Fraction(1) / g), e)


def _u_exponents(e):
    terms = e.terms if isinstance(e, Add) else (e,)
    out = []
    for t in terms:
        _, fs = term_split(t)
        aff = (Fraction(0), Fraction(0), Fraction(0))
        for f in fs:
            b, ex = base_split(f)
            if isinstance(b, Jet) and b.order == 0:
                got = as_affine_qr(ex)
                if got is not None:
                    aff = got
        out.append(aff)
    return out


def normalize_equation(e, manifold):
    """Scale-free canonical form: clear u and conformal-sum denominators,
    strip exact conformal-sum factors, normalize content and sign."""
    e = simplify(to_expr(e))
    if e == ZERO:
        return ZERO
    # shift u powers so the lexicographically least exponent is zero
    exps = _u_exponents(e)
    low = min(exps)
    if low != (Fraction(0), Fraction(0), Fraction(0)):
        a, b, c = low
        shift = add(Rat(-a), mul(Rat(-b), Q), mul(Rat(-c), R))
        e = mul(e, pow_(U, shift))
    S = manifold.conformal_sum()
    if S != ONE:
        # clear S-denominators
        depth = 0
        terms = e.terms if isinstance(e, Add) else (e,)
        for t in terms:
            _, fs = term_split(t)
            for f in fs:
                b, ex = base_split(f)
                if b == S and isinstance(ex, Rat) and ex.value < 0 \
                        and ex.value.denominator == 1:
                    depth = max(depth, -int(ex.value))
        if depth:
            e = mul(e, pow_(S, depth))
        # strip exact overall S factors
        while True:
            q_ = exact_divide(e, S)
            if q_ is None:
                break
            e = q_
    return _content_sign(e)


def equations_from_criterion(criterion, manifold):
    """Collected coefficient equations, one per jet monomial, normalized."""
    grouped = collect_jets(criterion)
    out = []
    seen = set()
    for jets_key in sorted(grouped, key=lambda fs: tuple(f.key for f in fs)):
        eq = normalize_equation(grouped[jets_key], manifold)
        if eq != ZERO and eq.key not in seen:
            seen.add(eq.key)
            out.append(eq)
    return out


@dataclass(frozen=True)
class DeterminingSystem:
    """Determining equations for a PDE instance under a case regime.

    `atomics` are the structure conditions from the fully general ansatz
    (η depends on t only, ξ^k never on u, φ linear in u).  `comparison`
    are the per-jet-monomial conditions with η(t), ξ(x,t), φ(x,t,u).
    `reduced` are the conditions after φ = α(x,t)u.  `equations` is the
    deduplicated union; every member must vanish identically.
    """
    manifold: ManifoldModel
    assumption: Case
    atomics: tuple
    comparison: tuple
    reduced: tuple

    @property
    def equations(self):
        out = []
        seen = set()
        for eq in (*self.atomics, *self.comparison, *self.reduced):
            if eq.key not in seen:
                seen.add(eq.key)
                out.append(eq)
        return tuple(out)


def derive_determining_system(pde, assumption=Case.GENERIC):
    """Machine derivation of the determining system in three stages."""
    n = pde.n
    m = pde.manifold

    def run(v):
        crit = apply_symmetry_criterion(v, pde)
        crit = apply_case(crit, assumption)
        return equations_from_criterion(crit, m)

    atomics = _structure_conditions(run(general_ansatz(n)), m)
    comparison = run(general_ansatz(n, xi_deps=("x", "t"), eta_deps=("t",)))
    reduced = run(general_ansatz(n, xi_deps=("x", "t"), eta_deps=("t",),
                                 linear_phi=True))
    return DeterminingSystem(m, assumption, tuple(atomics),
                             tuple(comparison), tuple(reduced))


def _extends(g, a):
    """Whether the formal partial g differentiates at least as much as a."""
    if g.name != a.name or g.t_count < a.t_count or g.u_count < a.u_count:
        return False
    cg, ca = Counter(g.spatial), Counter(a.spatial)
    return all(cg[k] >= v for k, v in ca.items())


def _structure_conditions(equations, manifold):
    """Atomic structure conditions from the general-ansatz run.

    The collected system forces η_k = 0, η_u = 0, ξ^k_u = 0, φ_uu = 0.
    Most appear directly as bare formal partials; the rest surface after
    substituting the ones already found (every higher partial of a
    vanishing partial vanishes too) and renormalizing, so iterate until
    no new bare condition appears.
    """
    pending = list(equations)
    atomics = []
    while True:
        bare = [eq for eq in pending if isinstance(eq, Fn)]
        bare.sort(key=lambda f: (len(f.spatial) + f.t_count + f.u_count, f.key))
        added = False
        for eq in bare:
            if not any(_extends(eq, a) for a in atomics):
                atomics.append(eq)
                added = True
        if not added:
            break
        reduced, seen = [], set()
        for eq in pending:
            if isinstance(eq, Fn):
                continue
            kill = [(s, ZERO) for s in free_symbols(eq)
                    if isinstance(s, Fn) and any(_extends(s, a) for a in atomics)]
            if kill:
                eq = normalize_equation(subst_many(eq, kill), manifold)
            if eq != ZERO and eq.key not in seen:
                seen.add(eq.key)
                reduced.append(eq)
        pending = reduced
    return atomics


def check_membership(v, ds):
    """Substitute a concrete field into every equation of the system."""
    if v.n != ds.manifold.n:
        raise ExprError("dimension mismatch")
    mapping = {"eta": v.eta, "phi": v.phi,
               "alpha": mul(v.phi, pow_(U, -1))}
    for k in range(1, v.n + 1):
        mapping[f"xi{k}"] = v.xi[k - 1]
    residuals = []
    satisfied = True
    for eq in ds.equations:
        res = normalize_equation(subst_functions(eq, mapping), ds.manifold)
        residuals.append(res)
        if res != ZERO:
            satisfied = False
    return {"satisfied": satisfied, "residuals": residuals}
