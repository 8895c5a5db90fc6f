"""Group catalog: contents per regime, exponentiation, reduction map."""

import random
from fractions import Fraction

import numpy as np
import pytest

from pmsym.catalog import (CatalogError, GroupAction, RotationParameter,
                           act_on_function, build_catalog, exponentiate_check,
                           inverse_reduction, reduce_to_semilinear)
from pmsym.exprs import (Case, EPS, ONE, T, U, ZERO, add, app, case_for,
                         coord, evaluate, mul, num, parse, pow_, substitute)
from pmsym.geometry import ManifoldModel
from pmsym.prolongation import PDEInstance, apply_symmetry_criterion

SPHERE2 = ManifoldModel("sphere", 2)
SPHERE3 = ManifoldModel("sphere", 3)
BALL2 = ManifoldModel("hyperbolic", 2)
BALL3 = ManifoldModel("hyperbolic", 3)

CASE_PARAMS = {
    Case.GENERIC: (1, 3),
    Case.Q_EQ_RPLUS1: (1, 2),
    Case.Q_EQ_1: (1, 1),
    Case.R_EQ_0: (0, 2),
    Case.Q_EQ_RPLUS1_EQ_1: (0, 1),
}


def names(cat):
    return [ga.name for ga in cat]


# ------------------------------------------------------------------ content

def test_case1_contents_and_dimension_count():
    cat = build_catalog(SPHERE3, Case.GENERIC, 1, 3)
    assert names(cat) == ["time_translation", "rotation_12", "rotation_13",
                          "rotation_23"]
    assert len(cat) == 1 + 3 * (3 - 1) // 2


def test_case2_has_exponential_scaling():
    cat = build_catalog(SPHERE2, Case.Q_EQ_RPLUS1, 1, 2)
    assert "exponential_time_scaling" in names(cat)
    ga = {g.name: g for g in cat}["exponential_time_scaling"]
    assert ga.generator.eta == app("exp", T)
    assert ga.generator.phi == mul(app("exp", T), U)
    assert ga.domain is not None


def test_case3_time_dilation_flow():
    cat = build_catalog(BALL2, Case.Q_EQ_1, 2, 1)
    ga = {g.name: g for g in cat}["time_dilation"]
    # flow t -> e^eps t, u -> e^{eps/r} u
    assert substitute(ga.t_flow, EPS, ZERO) == T
    assert ga.generator.phi == mul(num(1, 2), U)


def test_case5_amplitude_scaling():
    cat = build_catalog(SPHERE2, Case.Q_EQ_RPLUS1_EQ_1, 0, 1)
    ga = {g.name: g for g in cat}["amplitude_scaling"]
    assert ga.generator.phi == U
    assert ga.u_factor == app("exp", EPS)
    assert ga.t_flow == T


def test_case4_is_translation_and_rotations_only():
    cat = build_catalog(BALL3, Case.R_EQ_0, 0, 2)
    assert names(cat) == ["time_translation", "rotation_12", "rotation_13",
                          "rotation_23"]


def test_catalog_rejects_inconsistent_exponents():
    with pytest.raises(CatalogError):
        build_catalog(SPHERE2, Case.GENERIC, 1, 2)  # that's q = r+1
    with pytest.raises(CatalogError):
        build_catalog(SPHERE2, Case.Q_EQ_1, 0, 1)  # that's case 5


def test_rotation_parameter_validation():
    with pytest.raises(CatalogError):
        RotationParameter(((Fraction(0), Fraction(1)),
                           (Fraction(1), Fraction(0))))


# ------------------------------------------------------- criterion symbolic

@pytest.mark.parametrize("m", [SPHERE2, SPHERE3, BALL2, BALL3],
                         ids=lambda m: f"{m.kind}{m.n}")
@pytest.mark.parametrize("case", list(CASE_PARAMS), ids=lambda c: c.label)
def test_every_generator_annihilates_the_criterion(m, case):
    r, q = CASE_PARAMS[case]
    pde = PDEInstance(m, r=r, q=q)
    for ga in build_catalog(m, case, r, q):
        assert apply_symmetry_criterion(ga.generator, pde) == ZERO


# ------------------------------------------------------------ exponentiation

@pytest.mark.parametrize("m", [SPHERE2, BALL3], ids=lambda m: f"{m.kind}{m.n}")
@pytest.mark.parametrize("case", list(CASE_PARAMS), ids=lambda c: c.label)
def test_exponentiation_consistency(m, case):
    r, q = CASE_PARAMS[case]
    rng = np.random.default_rng(42)
    for ga in build_catalog(m, case, r, q):
        rep = exponentiate_check(ga, rng=rng, pairs=25)
        assert rep["identity_at_zero"]
        assert rep["derivative_matches_generator"]
        if rep["group_law"] == "symbolic":
            assert rep["group_law_error"] == 0.0
        else:
            assert rep["group_law_error"] < 1e-10
        if ga.rotation is not None:
            assert rep["rotation_orthogonality_error"] < 1e-12
            assert rep["rotation_determinant_error"] < 1e-12
            assert rep["rotation_group_law_error"] < 1e-10


def test_scalar_group_laws_close_symbolically():
    for case, (r, q) in CASE_PARAMS.items():
        for ga in build_catalog(SPHERE2, case, r, q):
            if ga.rotation is None:
                rep = exponentiate_check(ga)
                assert rep["group_law"] == "symbolic", ga.name


# -------------------------------------------------------------- flow action

def test_act_on_function_identity_at_zero():
    cat = build_catalog(SPHERE2, Case.Q_EQ_RPLUS1_EQ_1, 0, 1)
    ga = {g.name: g for g in cat}["amplitude_scaling"]
    pts = np.array([[0.1, -0.3, 0.5, 2.0], [1.0, 0.2, -0.1, 0.7]])
    out = act_on_function(ga, 0.0, pts)
    assert np.allclose(out, pts, atol=1e-14)


def test_act_on_function_doubles_amplitude():
    cat = build_catalog(SPHERE2, Case.Q_EQ_RPLUS1_EQ_1, 0, 1)
    ga = {g.name: g for g in cat}["amplitude_scaling"]
    pts = np.array([[0.1, -0.3, 0.5, 2.0]])
    out = act_on_function(ga, np.log(2.0), pts)
    assert abs(out[0, -1] - 4.0) < 1e-12
    assert np.allclose(out[0, :3], pts[0, :3])


def test_act_on_function_exponential_scaling_values():
    cat = build_catalog(SPHERE2, Case.Q_EQ_RPLUS1, 1, 2)
    ga = {g.name: g for g in cat}["exponential_time_scaling"]
    pts = np.array([[0.0, 0.0, 0.0, 1.0]])
    out = act_on_function(ga, 0.5, pts)
    assert abs(out[0, 2] - np.log(2.0)) < 1e-12  # -ln(1 - 1/2)
    assert abs(out[0, 3] - 2.0) < 1e-12          # (1 - 1/2)^{-1} e^0
    with pytest.raises(CatalogError):
        act_on_function(ga, 1.5, pts)  # e^{-rt} - r eps <= 0


def test_act_on_function_rotates_coordinates():
    cat = build_catalog(SPHERE2, Case.GENERIC, 1, 3)
    ga = {g.name: g for g in cat}["rotation_12"]
    pts = np.array([[1.0, 0.0, 0.3, 1.5]])
    out = act_on_function(ga, np.pi / 2, pts)
    # basis direction has a[1][2] = +1, so the flow turns e1 onto -e2
    assert np.allclose(out[0, :2], [0.0, -1.0], atol=1e-12)
    assert out[0, 2] == pts[0, 2] and out[0, 3] == pts[0, 3]


def test_act_on_function_shape_validation():
    cat = build_catalog(SPHERE2, Case.GENERIC, 1, 3)
    with pytest.raises(CatalogError):
        act_on_function(cat[0], 0.1, np.zeros((4, 3)))


# ------------------------------------------------------------ reduction map

@pytest.mark.parametrize("m,p,r,q,case", [
    (1, 1, 0, 1, Case.Q_EQ_RPLUS1_EQ_1),
    (2, 3, Fraction(-1, 2), Fraction(3, 2), Case.GENERIC),
    (Fraction(1, 2), Fraction(1, 2), 1, 1, Case.Q_EQ_1),
])
def test_reduce_examples(m, p, r, q, case):
    got_r, got_q, got_case = reduce_to_semilinear(m, p)
    assert (got_r, got_q) == (Fraction(r), Fraction(q))
    assert got_case is case


def test_reduce_rejects_zero_m():
    with pytest.raises(CatalogError):
        reduce_to_semilinear(0, 2)


def test_inverse_reduction_rejects_r_minus_one():
    with pytest.raises(CatalogError):
        inverse_reduction(-1, 1)


def test_reduction_round_trip_random():
    rng = random.Random(77)
    for _ in range(100):
        m = Fraction(rng.randint(-30, 30), rng.randint(1, 12))
        if m == 0:
            m = Fraction(1, 3)
        p = Fraction(rng.randint(-30, 30), rng.randint(1, 12))
        r, q, _ = reduce_to_semilinear(m, p)
        assert inverse_reduction(r, q) == (m, p)
