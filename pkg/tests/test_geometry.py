"""Model manifolds: metric data, dual-route Laplacian, chart maps."""

import random

import numpy as np
import pytest

from pmsym.exprs import (ExprError, ONE, ZERO, add, app, compile_expr, coord,
                         evaluate, mul, num, parse, pow_, subst_many, to_expr)
from pmsym.geometry import (ChartMaps, ManifoldModel, chart_maps, christoffel,
                            christoffel_closed_form, inverse_metric,
                            laplace_beltrami, laplace_beltrami_components,
                            metric)

SPHERE2 = ManifoldModel("sphere", 2)
SPHERE3 = ManifoldModel("sphere", 3)
BALL2 = ManifoldModel("hyperbolic", 2)
BALL3 = ManifoldModel("hyperbolic", 3)
FLAT3 = ManifoldModel("flat", 3)


def test_kind_aliases_and_validation():
    assert ManifoldModel("ball", 2).kind == "hyperbolic"
    assert ManifoldModel("poincare", 4).kind == "hyperbolic"
    assert ManifoldModel("euclidean", 3).kind == "flat"
    with pytest.raises(ValueError):
        ManifoldModel("torus", 2)
    with pytest.raises(ValueError):
        ManifoldModel("sphere", 1)


def test_conformal_data():
    s = SPHERE2.conformal_sum()
    assert s == parse("1 + x1^2 + x2^2", n=2)
    assert SPHERE2.conformal_factor() == mul(2, pow_(s, -1))
    sb = BALL2.conformal_sum()
    assert sb == parse("1 - x1^2 - x2^2", n=2)
    assert FLAT3.conformal_factor() == ONE
    assert FLAT3.drift_coefficient() == ZERO


def test_metric_is_conformal_diagonal():
    assert metric(SPHERE2, 1, 2) == ZERO
    assert metric(SPHERE2, 1, 1) == mul(4, pow_(SPHERE2.conformal_sum(), -2))
    prod = mul(metric(BALL3, 2, 2), inverse_metric(BALL3, 2, 2))
    assert prod == ONE
    with pytest.raises(ExprError):
        metric(SPHERE2, 1, 3)


# Γ^k_ij for g = c²δ is δ_jk ∂_i ln c + δ_ik ∂_j ln c − δ_ij ∂_k ln c;
# on the sphere ∂_i ln c = −2x_i/S.
def test_christoffel_hand_oracle_sphere():
    S = SPHERE2.conformal_sum()
    g111 = mul(-2, coord(1), pow_(S, -1))
    assert christoffel(SPHERE2, 1, 1, 1) == g111
    assert christoffel(SPHERE2, 1, 2, 2) == mul(-1, g111)
    assert christoffel(SPHERE2, 2, 1, 2) == g111


def test_christoffel_hand_oracle_ball():
    S = BALL2.conformal_sum()
    assert christoffel(BALL2, 1, 1, 1) == mul(2, coord(1), pow_(S, -1))
    assert christoffel(BALL2, 1, 2, 2) == mul(-2, coord(1), pow_(S, -1))


@pytest.mark.parametrize("m", [SPHERE2, SPHERE3, BALL2, BALL3, FLAT3])
def test_christoffel_routes_agree(m):
    for k in range(1, m.n + 1):
        for i in range(1, m.n + 1):
            for j in range(1, m.n + 1):
                assert christoffel(m, k, i, j) == \
                    christoffel_closed_form(m, k, i, j)


def test_christoffel_symmetry_in_lower_indices():
    for m in (SPHERE3, BALL3):
        for k in range(1, 4):
            for i in range(1, 4):
                for j in range(1, 4):
                    assert christoffel(m, k, i, j) == christoffel(m, k, j, i)


BASIS = ["x1", "x1^2", "x1*x2", "exp(x1)", "arctan(x2)",
         "x1^2 + x2^2", "ln(1 + x1^2 + x2^2)"]


@pytest.mark.parametrize("m", [SPHERE2, SPHERE3, BALL2, BALL3, FLAT3])
@pytest.mark.parametrize("text", BASIS)
def test_laplacian_routes_agree_symbolically(m, text):
    f = parse(text, n=m.n)
    a = laplace_beltrami(m, f)
    b = laplace_beltrami_components(m, f)
    # the two routes may park denominators differently; subtract
    assert add(a, mul(-1, b)) == ZERO


@pytest.mark.parametrize("m", [SPHERE2, SPHERE3, BALL2, BALL3])
def test_laplacian_matches_finite_differences(m):
    # Δ_g f against a 2nd-order FD stencil of the flat Laplacian pieces
    rng = np.random.default_rng(11 + m.n)
    f = parse("exp(x1)*arctan(x2) + x1^2", n=m.n)
    lap = laplace_beltrami(m, f)
    syms = m.coords
    f_num = compile_expr(f, syms)
    lap_num = compile_expr(lap, syms)
    princ = compile_expr(m.principal_coefficient(), syms)
    drift = compile_expr(m.drift_coefficient(), syms)
    h = 1e-4
    checked = 0
    while checked < 50:
        x = rng.uniform(-0.6, 0.6, m.n)
        if not m.in_domain(x):
            continue
        flat = 0.0
        grad_dot_x = 0.0
        for i in range(m.n):
            up, dn = x.copy(), x.copy()
            up[i] += h
            dn[i] -= h
            flat += (f_num(*up) - 2 * f_num(*x) + f_num(*dn)) / h ** 2
            grad_dot_x += x[i] * (f_num(*up) - f_num(*dn)) / (2 * h)
        want = princ(*x) * flat + drift(*x) * grad_dot_x
        assert abs(lap_num(*x) - want) < 1e-5 * max(1.0, abs(want))
        checked += 1


def test_laplacian_rejects_jets():
    with pytest.raises(ExprError):
        laplace_beltrami(SPHERE2, parse("u_1", n=2))


def test_chart_round_trip_symbolic():
    maps = chart_maps(SPHERE2)
    back = maps.inverse(maps.forward)
    assert back == SPHERE2.coords
    with pytest.raises(ExprError):
        chart_maps(BALL2)


def test_chart_lands_on_unit_sphere():
    maps = chart_maps(SPHERE3)
    total = add(*[pow_(c, 2) for c in maps.forward])
    assert total == ONE


def test_chart_inverse_numeric():
    maps = chart_maps(SPHERE2)
    rng = random.Random(5)
    for _ in range(20):
        x = [rng.uniform(-2, 2), rng.uniform(-2, 2)]
        env = dict(zip(SPHERE2.coords, x))
        comps = [evaluate(c, env) for c in maps.forward]
        back = maps.inverse([num(0)] * 3)  # shape check only
        assert len(back) == 2
        z = comps[-1]
        got = [c / (1 - z) for c in comps[:-1]]
        assert max(abs(g - v) for g, v in zip(got, x)) < 1e-12
