"""Conformally flat model geometries.

Three models share the metric shape g_ij = c(x)^2 δ_ij: the stereographic
sphere chart with c = 2/(|x|^2+1) on all of R^n, the Poincare ball with
c = 2/(1-|x|^2) on |x| < 1, and flat space with c = 1.  The module keeps
two independent routes to the Laplace-Beltrami operator (the conformal
closed form and the Christoffel component formula); their agreement is a
standing test.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exprs import (ONE, ZERO, Coord, ExprError, Jet, add, coord,
                    free_symbols, mul, num, partial, pow_, to_expr)

SPHERE = "sphere"
HYPERBOLIC = "hyperbolic"
FLAT = "flat"

_KIND_ALIASES = {
    "sphere": SPHERE, "spherestereographic": SPHERE, "s": SPHERE,
    "hyperbolic": HYPERBOLIC, "hyperbolicpoincare": HYPERBOLIC,
    "ball": HYPERBOLIC, "poincare": HYPERBOLIC, "h": HYPERBOLIC,
    "flat": FLAT, "euclideanflat": FLAT, "euclidean": FLAT, "f": FLAT,
}


@dataclass(frozen=True)
class ManifoldModel:
    kind: str
    n: int

    def __post_init__(self):
        got = _KIND_ALIASES.get(self.kind.strip().lower())
        if got is None:
            raise ValueError(f"unknown manifold kind {self.kind!r}")
        object.__setattr__(self, "kind", got)
        if not isinstance(self.n, int) or self.n < 2:
            raise ValueError(f"dimension must be an integer >= 2, got {self.n!r}")

    @property
    def coords(self):
        return tuple(coord(i) for i in range(1, self.n + 1))

    def norm_sq(self):
        return add(*[c ** 2 for c in self.coords])

    def conformal_sum(self):
        """|x|^2+1 (sphere), 1-|x|^2 (ball), 1 (flat); call it S."""
        if self.kind == SPHERE:
            return add(ONE, self.norm_sq())
        if self.kind == HYPERBOLIC:
            return add(ONE, mul(-1, self.norm_sq()))
        return ONE

    def conformal_factor(self):
        """c(x) with g_ij = c^2 δ_ij."""
        if self.kind == FLAT:
            return ONE
        return mul(2, pow_(self.conformal_sum(), -1))

    def principal_coefficient(self):
        """Coefficient of the flat Laplacian in Δ_g: S²/4, or 1 when flat."""
        if self.kind == FLAT:
            return ONE
        return mul(num(1, 4), pow_(self.conformal_sum(), 2))

    def drift_coefficient(self):
        """Coefficient of x·∇ in Δ_g: ∓(n−2)·S/2 by model, 0 when flat."""
        if self.kind == FLAT:
            return ZERO
        sign = -1 if self.kind == SPHERE else 1
        return mul(num(sign * (self.n - 2), 2), self.conformal_sum())

    def in_domain(self, x):
        if self.kind == HYPERBOLIC:
            return sum(v * v for v in x) < 1.0
        return True


def _check_index(m, i, what="index"):
    if not 1 <= i <= m.n:
        raise ExprError(f"{what} {i} out of range for n={m.n}")


def metric(m, i, j):
    """Metric component g_ij."""
    _check_index(m, i)
    _check_index(m, j)
    if i != j:
        return ZERO
    return pow_(m.conformal_factor(), 2)


def inverse_metric(m, i, j):
    _check_index(m, i)
    _check_index(m, j)
    if i != j:
        return ZERO
    return pow_(m.conformal_factor(), -2)


def christoffel(m, k, i, j):
    """Γ^k_ij computed from the metric by the Levi-Civita formula.

    The metric is diagonal so only l = k contributes to g^{kl}(...).
    """
    for idx in (k, i, j):
        _check_index(m, idx)
    if m.kind == FLAT:
        return ZERO
    gkk_inv = inverse_metric(m, k, k)
    bracket = add(
        partial(metric(m, j, k), Coord(i)),
        partial(metric(m, i, k), Coord(j)),
        mul(-1, partial(metric(m, i, j), Coord(k))),
    )
    return mul(num(1, 2), gkk_inv, bracket)


def christoffel_closed_form(m, k, i, j):
    """Hand-expanded form ±(2/S)(x_k δ_ij − x_i δ_jk − x_j δ_ik)."""
    for idx in (k, i, j):
        _check_index(m, idx)
    if m.kind == FLAT:
        return ZERO
    xi, xj, xk = coord(i), coord(j), coord(k)
    body = add(
        mul(-1, xi) if j == k else ZERO,
        mul(-1, xj) if i == k else ZERO,
        xk if i == j else ZERO,
    )
    sign = 1 if m.kind == SPHERE else -1
    return mul(2 * sign, pow_(m.conformal_sum(), -1), body)


def _reject_jets(f):
    for s in free_symbols(f):
        if isinstance(s, Jet):
            raise ExprError(f"jet variable {s!r} not allowed here")


def laplace_beltrami(m, f):
    """Δ_g f by the conformal closed form; f in (x, t) only, no jets."""
    f = to_expr(f)
    _reject_jets(f)
    flat_lap = add(*[partial(partial(f, c), c) for c in m.coords])
    drift = add(*[mul(c, partial(f, c)) for c in m.coords])
    return add(mul(m.principal_coefficient(), flat_lap),
               mul(m.drift_coefficient(), drift))


def laplace_beltrami_components(m, f):
    """Δ_g f = g^{ij}(∂²_ij f − Γ^k_ij ∂_k f); the independent route."""
    f = to_expr(f)
    _reject_jets(f)
    parts = []
    for i in range(1, m.n + 1):
        second = partial(partial(f, coord(i)), coord(i))
        correction = add(*[mul(christoffel(m, k, i, i), partial(f, coord(k)))
                           for k in range(1, m.n + 1)])
        parts.append(mul(inverse_metric(m, i, i), add(second, mul(-1, correction))))
    return add(*parts)


@dataclass(frozen=True)
class ChartMaps:
    """Stereographic chart: forward has n+1 components, inverse takes them."""
    forward: tuple

    def inverse(self, components):
        components = [to_expr(c) for c in components]
        if len(components) != len(self.forward):
            raise ExprError("component count mismatch for chart inverse")
        *ys, z = components
        scale = pow_(add(ONE, mul(-1, z)), -1)
        return tuple(mul(y, scale) for y in ys)


def chart_maps(m):
    """Forward x ↦ (2x/S, (|x|²−1)/S) and inverse (y, z) ↦ y/(1−z)."""
    if m.kind != SPHERE:
        raise ExprError("chart maps are defined for the sphere model only")
    S_inv = pow_(m.conformal_sum(), -1)
    forward = tuple(mul(2, c, S_inv) for c in m.coords)
    last = mul(add(m.norm_sq(), mul(-1, ONE)), S_inv)
    return ChartMaps(forward + (last,))
