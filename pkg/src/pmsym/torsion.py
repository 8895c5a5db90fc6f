"""Conformal Killing-type torsion system and its solution family.

The system couples the diagonal stretches of a vector field ξ on ℝⁿ to a
scalar λ(x) and the radial moment x·ξ through

    ξ^i_i = λ(x) ± 2 x·ξ / (1 ± |x|²)   for every i (no sum),
    ξ^i_j + ξ^j_i = 0                   for i ≠ j,

in four sign/denominator variants.  Affine fields with antisymmetric
linear part and λ ≡ 0 solve it exactly; the radial reduction of the
system collapses to a first-order ODE whose only globally consistent
profile is λ ≡ 0, which this module reproduces numerically.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.integrate import quad

from .exprs import (Expr, ExprError, MINUS_ONE, ZERO, add, coord, mul, num,
                    partial, pow_, simplify, to_expr)


class TorsionError(ValueError):
    """Invalid torsion-system input (shape, symmetry, or variant)."""


_DENOMS = ("one_plus_norm_sq", "one_minus_norm_sq")

# CLI spellings; "ball" keeps the minus sign its reduced system carries
_VARIANTS = {
    "sphere+": (1, "one_plus_norm_sq"),
    "sphere-": (-1, "one_plus_norm_sq"),
    "ball": (-1, "one_minus_norm_sq"),
    "ball-": (-1, "one_minus_norm_sq"),
    "ball+": (1, "one_minus_norm_sq"),
}


@dataclass(frozen=True)
class TorsionSystem:
    """One of the four variants of the first-order system on ξ, λ."""
    n: int
    sign: int = 1
    denom: str = "one_plus_norm_sq"

    def __post_init__(self):
        if self.n < 2:
            raise TorsionError(f"need n >= 2, got {self.n}")
        if self.sign not in (1, -1):
            raise TorsionError(f"sign must be +1 or -1, got {self.sign!r}")
        if self.denom not in _DENOMS:
            raise TorsionError(f"unknown denominator kind {self.denom!r}")

    @classmethod
    def from_variant(cls, n, variant):
        try:
            sign, denom = _VARIANTS[variant]
        except KeyError:
            raise TorsionError(f"unknown variant {variant!r}; "
                               f"choose from {sorted(_VARIANTS)}") from None
        return cls(n, sign, denom)

    @property
    def variant(self):
        if self.denom == "one_plus_norm_sq":
            return "sphere" + ("+" if self.sign > 0 else "-")
        # documented name of the ball system's default orientation
        return "ball" if self.sign < 0 else "ball+"

    def denominator_expr(self):
        s = 1 if self.denom == "one_plus_norm_sq" else -1
        return add(num(1), *[mul(num(s), pow_(coord(i), 2))
                             for i in range(1, self.n + 1)])


def torsion_residual(ts, xi, lam):
    """All n + n(n-1)/2 equation residuals for a candidate (ξ, λ).

    ξ must have n components in x only; residuals come back simplified,
    trace equations first (i = 1..n), then ξ^i_j + ξ^j_i for i < j.
    """
    xi = [to_expr(c) for c in xi]
    lam = to_expr(lam)
    if len(xi) != ts.n:
        raise TorsionError(f"expected {ts.n} components, got {len(xi)}")
    radial = add(*[mul(coord(i), xi[i - 1]) for i in range(1, ts.n + 1)])
    coupling = mul(num(2 * ts.sign), radial, pow_(ts.denominator_expr(), -1))
    out = []
    for i in range(1, ts.n + 1):
        out.append(simplify(add(partial(xi[i - 1], coord(i)),
                                mul(MINUS_ONE, lam),
                                mul(MINUS_ONE, coupling))))
    for i in range(1, ts.n + 1):
        for j in range(i + 1, ts.n + 1):
            out.append(simplify(add(partial(xi[i - 1], coord(j)),
                                    partial(xi[j - 1], coord(i)))))
    return out


@dataclass(frozen=True)
class TorsionSolution:
    """Affine family ξ^i = Σ_{j≠i} a^i_j x^j + b^i with antisymmetric a."""
    a: tuple
    b: tuple
    lam0: Fraction = Fraction(0)

    @property
    def n(self):
        return len(self.b)

    def xi_expressions(self):
        out = []
        for i in range(self.n):
            terms = [num(self.b[i])]
            for j in range(self.n):
                if j != i and self.a[i][j]:
                    terms.append(mul(num(self.a[i][j]), coord(j + 1)))
            out.append(add(*terms))
        return out


def family_construct(a, b=None):
    """Build the affine solution; rejects a non-antisymmetric matrix."""
    a = [[Fraction(v) for v in row] for row in a]
    n = len(a)
    if any(len(row) != n for row in a):
        raise TorsionError("matrix a must be square")
    if n < 2:
        raise TorsionError(f"need n >= 2, got {n}")
    for i in range(n):
        for j in range(n):
            if a[i][j] != -a[j][i]:
                raise TorsionError(
                    f"a is not antisymmetric at ({i + 1},{j + 1})")
    if b is None:
        b = [Fraction(0)] * n
    b = [Fraction(v) for v in b]
    if len(b) != n:
        raise TorsionError(f"b must have {n} entries, got {len(b)}")
    return TorsionSolution(tuple(tuple(row) for row in a), tuple(b))


def harmonicity_check(xi):
    """Residuals of Δξ^j + (n-2)·∂²_j ξ^j for each component."""
    xi = [to_expr(c) for c in xi]
    n = len(xi)
    out = []
    for j in range(1, n + 1):
        lap = add(*[partial(partial(xi[j - 1], coord(i)), coord(i))
                    for i in range(1, n + 1)])
        second = partial(partial(xi[j - 1], coord(j)), coord(j))
        out.append(simplify(add(lap, mul(num(n - 2), second))))
    return out


# ---------------------------------------------------------------------------
# radial reduction: first-order ODEs in r = |x|

def _rk4(f, r0, y0, r1, h):
    """Classical fixed-step RK4 from r0 to r1; returns (grid, values)."""
    steps = max(1, round((r1 - r0) / h))
    rs = np.empty(steps + 1)
    ys = np.empty(steps + 1)
    r, y = r0, y0
    rs[0], ys[0] = r, y
    for k in range(steps):
        k1 = f(r, y)
        k2 = f(r + h / 2, y + h / 2 * k1)
        k3 = f(r + h / 2, y + h / 2 * k2)
        k4 = f(r + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        r = r0 + (k + 1) * h
        rs[k + 1], ys[k + 1] = r, y
    if not np.all(np.isfinite(ys)):
        raise ArithmeticError("radial integration produced NaN/inf; "
                              "reduce the step or the range")
    return rs, ys


def radial_reduction(lam, r_max=2.0, h=1e-3):
    """Integrate r·φ_r = λ(r)r² + ((r²-1)/(r²+1))φ from the origin.

    The ODE is singular at r=0 (φ/r term), so integration starts at r=h
    from the two-term series start φ(h) = (λ(0)/3)h² + (λ'(0)/4)h³, the
    expansion consistent with φ(0)=0, φ_r(0)=0.  Returns (r, φ) samples
    on [h, r_max].
    """
    if r_max <= h:
        raise TorsionError(f"r_max={r_max} must exceed the step {h}")
    lam0 = lam(0.0)
    dlam0 = (lam(h) - lam(-h)) / (2 * h)
    phi_h = lam0 / 3 * h ** 2 + dlam0 / 4 * h ** 3

    def rhs(r, phi):
        return lam(r) * r + (r * r - 1) / (r * (r * r + 1)) * phi

    return _rk4(rhs, h, phi_h, r_max, h)


def radial_closed_form(lam, r):
    """Quadrature route: φ(r) = ((r²+1)/r)·∫₀^r s²/(s²+1)·λ(s) ds."""
    if r <= 0:
        return 0.0
    val, _ = quad(lambda s: s * s / (s * s + 1) * lam(s), 0.0, r,
                  epsabs=1e-12, epsrel=1e-12)
    return (r * r + 1) / r * val


def lambda_closed_form(lam0, r):
    """λ(r) = λ0·(r²+3)/(r²+1), the unique profile the reduction allows."""
    r = np.asarray(r, dtype=float)
    return lam0 * (r * r + 3) / (r * r + 1)


def lambda_ode_check(lam0, r_max=5.0, h=1e-3, grid=20):
    """Integrate λ' = -4r λ/((r²+1)(r²+3)) and probe global consistency.

    The ODE is regular at r=0; the closed form fixes λ(0) = 3λ0.  The
    consistency residual couples the moment integral back to λ pointwise:

        (1/r³)(1 - r² - x_i r - 3x_i/r)·∫₀^r s²λ/(s²+1) ds
            - ((r - x_i)/r)·λ(r)

    with the exact moment ∫ = λ0 r³/(r²+3).  The residual is linear in λ0
    with a coefficient that does not vanish on the grid, so it is
    identically zero iff λ0 = 0.
    """
    lam0 = float(lam0)

    def rhs(r, lam):
        return -4 * r / ((r * r + 1) * (r * r + 3)) * lam

    rs, lams = _rk4(rhs, 0.0, 3 * lam0, r_max, h)
    max_dev = float(np.max(np.abs(lams - lambda_closed_form(lam0, rs))))

    r_grid = np.linspace(0.25, r_max, grid)
    theta = np.linspace(0.0, np.pi, grid)
    max_res = 0.0
    for r in r_grid:
        moment = lam0 * r ** 3 / (r * r + 3)
        lam_r = lam0 * (r * r + 3) / (r * r + 1)
        for xi_coord in r * np.cos(theta):
            lhs = (1 - r * r - xi_coord * r - 3 * xi_coord / r) / r ** 3 * moment
            res = lhs - (r - xi_coord) / r * lam_r
            max_res = max(max_res, abs(res))
    return {
        "lam0": lam0,
        "max_ode_deviation": max_dev,
        "grid_max_residual": float(max_res),
        "consistent": bool(max_res < 1e-12),
    }
