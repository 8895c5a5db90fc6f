"""Closed-form symmetry-group catalog and the porous-medium reduction map.

Each exponent regime admits a short list of one-parameter group families:
time translation and rotations always; plus one extra scalar family in
the regimes where q, r+1, 1 collide.  Flows are stored as exact
expressions in (t, u, eps) for concrete rational exponents; rotations
keep their antisymmetric generator and exponentiate numerically.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.linalg import expm

from .exprs import (Case, EPS, Expr, ExprError, MINUS_ONE, ONE, T, U, ZERO,
                    add, app, case_for, coord, evaluate, mul, num, parse,
                    partial, pow_, simplify, substitute, to_expr, to_text)
from .geometry import ManifoldModel
from .prolongation import VectorFieldAnsatz


class CatalogError(ValueError):
    """Exponents inconsistent with the requested regime, or bad flow input."""


@dataclass(frozen=True)
class RotationParameter:
    """Antisymmetric rational generator; the flow is its matrix exponential."""
    a: tuple

    def __post_init__(self):
        a = tuple(tuple(Fraction(v) for v in row) for row in self.a)
        n = len(a)
        if any(len(row) != n for row in a):
            raise CatalogError("rotation generator must be square")
        for i in range(n):
            for j in range(n):
                if a[i][j] != -a[j][i]:
                    raise CatalogError("rotation generator must be antisymmetric")
        object.__setattr__(self, "a", a)

    @property
    def n(self):
        return len(self.a)

    def matrix(self, eps):
        """A_eps = exp(eps·a), orthogonal with unit determinant."""
        return expm(float(eps) * np.array(self.a, dtype=float))


@dataclass(frozen=True)
class GroupAction:
    """One-parameter family: name, generator, and exact flow data.

    Scalar part: (t, u) -> (t_flow, u_factor·u) with expressions in
    (t, eps); spatial part is the identity unless `rotation` is set, in
    which case x -> exp(eps·a)·x numerically.  `domain`, when present,
    is an expression in (t, eps) that must stay strictly positive.
    """
    name: str
    case: Case
    manifold: ManifoldModel
    generator: VectorFieldAnsatz
    t_flow: Expr
    u_factor: Expr
    rotation: RotationParameter | None = None
    domain: Expr | None = None

    def __post_init__(self):
        object.__setattr__(self, "t_flow", to_expr(self.t_flow))
        object.__setattr__(self, "u_factor", to_expr(self.u_factor))
        if self.domain is not None:
            object.__setattr__(self, "domain", to_expr(self.domain))

    @property
    def u_flow(self):
        return mul(self.u_factor, U)

    def in_domain(self, t, eps):
        if self.domain is None:
            return True
        return evaluate(self.domain, {T: t, EPS: eps}) > 0

    def scalar_maps(self, eps):
        """(t_flow, u_factor) with eps substituted, still expressions in t."""
        e = num(Fraction(eps)) if isinstance(eps, (int, Fraction)) else to_expr(eps)
        return (substitute(self.t_flow, EPS, e),
                substitute(self.u_factor, EPS, e))


def _rotation_basis(n):
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            a = [[Fraction(0)] * n for _ in range(n)]
            a[i][j] = Fraction(1)
            a[j][i] = Fraction(-1)
            out.append(((i + 1, j + 1), RotationParameter(tuple(map(tuple, a)))))
    return out


def _rotation_ansatz(rp):
    # xi^i = sum_j a[i][j] x^j
    xi = []
    for i in range(rp.n):
        terms = [mul(num(rp.a[i][j]), coord(j + 1))
                 for j in range(rp.n) if rp.a[i][j]]
        xi.append(add(*terms) if terms else ZERO)
    return VectorFieldAnsatz(tuple(xi), ZERO, ZERO)


def build_catalog(manifold, case, r, q):
    """All group families of the regime, flows instantiated at (r, q).

    Always contains time translation and the n(n-1)/2 rotation basis
    directions; the colliding regimes contribute one extra scalar family
    each.  Raises when (r, q) does not lie in the requested regime.
    """
    if not isinstance(manifold, ManifoldModel):
        raise CatalogError("manifold must be a ManifoldModel")
    r, q = Fraction(r), Fraction(q)
    if case_for(q, r) is not case:
        raise CatalogError(
            f"exponents r={r}, q={q} fall in regime "
            f"{case_for(q, r).label}, not {case.label}")
    n = manifold.n
    zero_xi = (ZERO,) * n

    def action(name, generator, t_flow, u_factor, rotation=None, domain=None):
        return GroupAction(name, case, manifold, generator, t_flow, u_factor,
                           rotation=rotation, domain=domain)

    out = [action("time_translation",
                  VectorFieldAnsatz(zero_xi, ONE, ZERO),
                  add(T, EPS), ONE)]

    if case is Case.Q_EQ_RPLUS1:
        # eta = phi/u = e^{rt}; flow t -> -(1/r)ln(e^{-rt} - r eps),
        # u -> u (e^{-rt} - r eps)^{-1/r} e^{-t}, on e^{-rt} - r eps > 0
        ert = app("exp", mul(num(r), T))
        w = add(app("exp", mul(num(-r), T)), mul(num(-r), EPS))
        out.append(action(
            "exponential_time_scaling",
            VectorFieldAnsatz(zero_xi, ert, mul(ert, U)),
            mul(num(Fraction(-1, 1) / r), app("ln", w)),
            mul(pow_(w, num(Fraction(-1, 1) / r)), app("exp", mul(MINUS_ONE, T))),
            domain=w))
    elif case is Case.Q_EQ_1:
        # eta = t, phi = u/r; flow (t, u) -> (e^eps t, e^{eps/r} u)
        out.append(action(
            "time_dilation",
            VectorFieldAnsatz(zero_xi, T, mul(num(Fraction(1, 1) / r), U)),
            mul(app("exp", EPS), T),
            app("exp", mul(num(Fraction(1, 1) / r), EPS))))
    elif case is Case.Q_EQ_RPLUS1_EQ_1:
        # phi = u; flow u -> e^eps u
        out.append(action(
            "amplitude_scaling",
            VectorFieldAnsatz(zero_xi, ZERO, U),
            T, app("exp", EPS)))

    for (i, j), rp in _rotation_basis(n):
        out.append(action(f"rotation_{i}{j}", _rotation_ansatz(rp),
                          T, ONE, rotation=rp))
    return out


def exponentiate_check(ga, rng=None, pairs=20):
    """Consistency of a flow with its generator and the group law.

    Scalar flows are checked symbolically: identity at eps=0, the
    eps-derivative at 0 against (eta, phi), and the composition law.
    Rotation flows are checked numerically: orthogonality/determinant of
    A_eps and the one-parameter subgroup property at random pairs.
    """
    rep = {"name": ga.name}
    at0 = lambda e: simplify(substitute(e, EPS, ZERO))
    rep["identity_at_zero"] = (at0(ga.t_flow) == T and at0(ga.u_factor) == ONE)

    d_t = at0(partial(ga.t_flow, EPS))
    d_u = at0(partial(mul(ga.u_factor, U), EPS))
    rep["derivative_matches_generator"] = (
        simplify(add(d_t, mul(MINUS_ONE, ga.generator.eta))) == ZERO
        and simplify(add(d_u, mul(MINUS_ONE, ga.generator.phi))) == ZERO)

    # group law on the scalar part: flow(beta) after flow(eps)
    a = parse("eps")
    b = parse("beta")
    t1 = substitute(ga.t_flow, EPS, a)
    f1 = substitute(ga.u_factor, EPS, a)
    t2 = substitute(substitute(ga.t_flow, EPS, b), T, t1)
    f2 = mul(substitute(substitute(ga.u_factor, EPS, b), T, t1), f1)
    tsum = substitute(ga.t_flow, EPS, add(a, b))
    fsum = substitute(ga.u_factor, EPS, add(a, b))
    law_t = simplify(add(t2, mul(MINUS_ONE, tsum)))
    law_u = simplify(add(f2, mul(MINUS_ONE, fsum)))
    if law_t == ZERO and law_u == ZERO:
        rep["group_law"] = "symbolic"
        rep["group_law_error"] = 0.0
    else:
        rng = np.random.default_rng(0) if rng is None else rng
        worst = 0.0
        for _ in range(pairs):
            tv = float(rng.uniform(-1, 1))
            # keep both steps inside the flow domain
            ev1, ev2 = (float(x) for x in rng.uniform(-0.2, 0.2, 2))
            if not (ga.in_domain(tv, ev1) and ga.in_domain(tv, ev1 + ev2)):
                continue
            tmid = evaluate(ga.t_flow, {T: tv, EPS: ev1})
            if not ga.in_domain(tmid, ev2):
                continue
            lhs_t = evaluate(ga.t_flow, {T: tmid, EPS: ev2})
            lhs_f = (evaluate(ga.u_factor, {T: tv, EPS: ev1})
                     * evaluate(ga.u_factor, {T: tmid, EPS: ev2}))
            rhs_t = evaluate(ga.t_flow, {T: tv, EPS: ev1 + ev2})
            rhs_f = evaluate(ga.u_factor, {T: tv, EPS: ev1 + ev2})
            worst = max(worst, abs(lhs_t - rhs_t), abs(lhs_f - rhs_f))
        rep["group_law"] = "numeric"
        rep["group_law_error"] = worst

    if ga.rotation is not None:
        rng = np.random.default_rng(0) if rng is None else rng
        eye = np.eye(ga.rotation.n)
        worst_orth = worst_det = worst_law = 0.0
        for _ in range(pairs):
            ev1, ev2 = (float(x) for x in rng.uniform(-3, 3, 2))
            m1, m2 = ga.rotation.matrix(ev1), ga.rotation.matrix(ev2)
            worst_orth = max(worst_orth,
                             float(np.max(np.abs(m1.T @ m1 - eye))))
            worst_det = max(worst_det, abs(np.linalg.det(m1) - 1.0))
            worst_law = max(worst_law, float(np.max(np.abs(
                m1 @ m2 - ga.rotation.matrix(ev1 + ev2)))))
        rep["rotation_orthogonality_error"] = worst_orth
        rep["rotation_determinant_error"] = worst_det
        rep["rotation_group_law_error"] = worst_law
    return rep


def act_on_function(ga, eps, samples):
    """Apply (x,t,u) -> (x~,t~,u~) pointwise to an array of samples.

    `samples` is array-like of shape (k, n+2) with columns x_1..x_n, t,
    u.  Raises when eps leaves the flow's parameter domain at any t.
    """
    pts = np.array(samples, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != ga.manifold.n + 2:
        raise CatalogError(
            f"samples must have shape (k, {ga.manifold.n + 2})")
    n = ga.manifold.n
    eps = float(eps)
    out = pts.copy()
    if ga.rotation is not None:
        out[:, :n] = pts[:, :n] @ ga.rotation.matrix(eps).T
    for row in range(pts.shape[0]):
        tv, uv = pts[row, n], pts[row, n + 1]
        if not ga.in_domain(tv, eps):
            raise CatalogError(
                f"eps={eps} outside the flow domain at t={tv}")
        out[row, n] = evaluate(ga.t_flow, {T: tv, EPS: eps})
        out[row, n + 1] = uv * evaluate(ga.u_factor, {T: tv, EPS: eps})
    return out


def reduce_to_semilinear(m, p):
    """Map v_t - Δ_g(v^m) = v^p exponents to (r, q) and classify.

    v(x,t) = u^m(x, t/m) turns the quasilinear form into
    u_t = u^{-r}(Δ_g u + u^q) with r = (1-m)/m, q = p/m.
    """
    m, p = Fraction(m), Fraction(p)
    if m == 0:
        raise CatalogError("m must be nonzero")
    r = (1 - m) / m
    q = p / m
    return r, q, case_for(q, r)


def inverse_reduction(r, q):
    """Recover (m, p) from (r, q); defined for r != -1."""
    r, q = Fraction(r), Fraction(q)
    if r == -1:
        raise CatalogError("r = -1 has no quasilinear preimage (m undefined)")
    m = 1 / (r + 1)
    return m, q * m
