"""Prolongation coefficients and the three-stage determining systems.

The comparison and reduced fixtures below were reduced by hand from the
symmetry criterion for u^r u_t = Delta_g u + u^q on both conformal
models, then frozen; the derivation must land on exactly this set after
normalization.  Two deliberately wrong bracket variants (a phi_u term
in the spatial condition, and a (1-n-r) dilation coefficient) are
pinned as non-members: substituting the known exponential-scaling
symmetry leaves a nonzero residue in them.
"""

import pytest

from pmsym.exprs import (Case, MINUS_ONE, ONE, Q, R, T, U, ZERO, add, app,
                         coord, fn, jet, mul, num, parse, partial, pow_,
                         subst_functions, substitute, to_expr, to_text)
from pmsym.geometry import ManifoldModel, laplace_beltrami
from pmsym.prolongation import (ANSATZ_FUNCTIONS, DeterminingSystem,
                                PDEInstance, VectorFieldAnsatz,
                                apply_symmetry_criterion, check_membership,
                                criterion_pieces, derive_determining_system,
                                general_ansatz, normalize_equation,
                                prolong_coefficients)

U_T = jet((), 1)

SPHERE2 = ManifoldModel("sphere", 2)
SPHERE3 = ManifoldModel("sphere", 3)
BALL2 = ManifoldModel("hyperbolic", 2)
BALL3 = ManifoldModel("hyperbolic", 3)

_SYSTEMS = {}


def system_for(m):
    if m not in _SYSTEMS:
        _SYSTEMS[m] = derive_determining_system(PDEInstance(m))
    return _SYSTEMS[m]


# ------------------------------------------------- prolongation coefficients

def test_scaling_field_prolongs_to_itself():
    v = VectorFieldAnsatz(xi=(ZERO, ZERO), eta=ZERO, phi=U)
    phi_i, phi_t, phi_ij = prolong_coefficients(v)
    assert phi_i == [jet((1,)), jet((2,))]
    assert phi_t == U_T
    assert phi_ij[(1, 1)] == jet((1, 1))
    assert phi_ij[(1, 2)] == jet((1, 2))
    assert phi_ij[(2, 2)] == jet((2, 2))


def test_rotation_field_prolongation_by_hand():
    v = VectorFieldAnsatz(xi=(mul(-1, coord(2)), coord(1)), eta=ZERO,
                          phi=ZERO)
    phi_i, phi_t, phi_ij = prolong_coefficients(v)
    assert phi_i == [mul(-1, jet((2,))), jet((1,))]
    assert phi_t == ZERO
    assert phi_ij[(1, 1)] == mul(-2, jet((1, 2)))
    assert phi_ij[(1, 2)] == add(jet((1, 1)), mul(-1, jet((2, 2))))
    assert phi_ij[(2, 2)] == mul(2, jet((1, 2)))


def test_dilation_field_prolongation_by_hand():
    v = VectorFieldAnsatz(xi=(coord(1), ZERO), eta=ZERO, phi=ZERO)
    phi_i, phi_t, phi_ij = prolong_coefficients(v)
    assert phi_i == [mul(-1, jet((1,))), ZERO]
    assert phi_ij[(1, 1)] == mul(-2, jet((1, 1)))
    assert phi_ij[(1, 2)] == mul(-1, jet((1, 2)))
    assert phi_ij[(2, 2)] == ZERO


def test_phi_ij_keeps_u_dependent_advection_term():
    # xi^1 = u: the second-order coefficient must carry the
    # -(xi^1_u u_1) u_{11} contribution on top of the chain-rule rows
    v = VectorFieldAnsatz(xi=(U, ZERO), eta=ZERO, phi=ZERO)
    phi_i, _, phi_ij = prolong_coefficients(v)
    assert phi_i[0] == mul(-1, pow_(jet((1,)), 2))
    assert phi_ij[(1, 1)] == mul(-3, jet((1,)), jet((1, 1)))


def test_phi_ij_keeps_u_dependent_time_term():
    # eta = u contributes -(eta_u u_t) u_{11} - 2 (D_1 eta) u_{1t}
    v = VectorFieldAnsatz(xi=(ZERO, ZERO), eta=U, phi=ZERO)
    _, _, phi_ij = prolong_coefficients(v)
    want = add(mul(-1, U_T, jet((1, 1))), mul(-2, jet((1,)), jet((1,), 1)))
    assert phi_ij[(1, 1)] == want


def test_ansatz_rejects_jet_components():
    with pytest.raises(Exception):
        VectorFieldAnsatz(xi=(jet((1,)), ZERO), eta=ZERO, phi=ZERO)


# ------------------------------------------------------------- pde instance

def test_pde_residual_structure():
    pde = PDEInstance(SPHERE2)
    # u^r u_t - principal*(u_11+u_22) - drift*(x·∇u) - u^q, F-cleared
    sol = pde.ut_solution()
    back = substitute(pde.F, U_T, sol)
    assert back == ZERO


def test_criterion_pieces_sum_to_criterion():
    pde = PDEInstance(SPHERE2, r=1, q=3)
    v = VectorFieldAnsatz(xi=(mul(-1, coord(2)), coord(1)), eta=ZERO,
                          phi=ZERO)
    pieces = criterion_pieces(v, pde, eliminate=False)
    assert add(*pieces) == apply_symmetry_criterion(v, pde, eliminate=False)
    assert apply_symmetry_criterion(v, pde) == ZERO


# --------------------------------------------------------- fixture encoding

def _stage_b_functions(n):
    xi = [fn(f"xi{k}", deps=("x", "t")) for k in range(1, n + 1)]
    eta = fn("eta", deps=("t",))
    return xi, eta


def comparison_fixture(m):
    """The seven hand-reduced coefficient conditions (phi still general)."""
    n, s = m.n, (1 if m.kind == "sphere" else -1)
    S = m.conformal_sum()
    xi, eta = _stage_b_functions(n)
    phi = fn("phi", deps=("x", "t", "u"))
    eta_t = partial(eta, T)
    x_dot_xi = add(*[mul(coord(i), xi[i - 1]) for i in range(1, n + 1)])
    conds = [partial(partial(phi, U), U)]
    for i in range(1, n + 1):
        conds.append(add(
            mul(R, pow_(U, -1), phi),
            mul(-1, eta_t),
            mul(-4 * s, pow_(S, -1), x_dot_xi),
            mul(2, partial(xi[i - 1], coord(i)))))
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            conds.append(add(partial(xi[i - 1], coord(j)),
                             partial(xi[j - 1], coord(i))))
    for k in range(1, n + 1):
        flat_lap = add(*[partial(partial(xi[k - 1], c), c) for c in m.coords])
        conds.append(add(
            mul(2 * s, pow_(S, -1), pow_(U, R), partial(xi[k - 1], T)),
            mul(s, num(1, 2), S,
                add(mul(2, partial(partial(phi, coord(k)), U)),
                    mul(-1, flat_lap))),
            mul(2 - n, coord(k),
                add(eta_t, mul(-1, R, pow_(U, -1), phi))),
            mul(2 - n, add(
                mul(2 * s, pow_(S, -1), x_dot_xi, coord(k)),
                xi[k - 1],
                mul(-1, add(*[mul(partial(xi[k - 1], c), c)
                              for c in m.coords]))))))
    flat_lap_phi = add(*[partial(partial(phi, c), c) for c in m.coords])
    x_dot_dphi = add(*[mul(c, partial(phi, c)) for c in m.coords])
    conds.append(add(
        mul(add(R, mul(-1, Q)), pow_(U, add(Q, -1)), phi),
        mul(pow_(U, R), partial(phi, T)),
        mul(add(partial(phi, U), mul(-1, eta_t)), pow_(U, Q)),
        mul(-1, num(1, 4), pow_(S, 2), flat_lap_phi),
        mul(-s * (2 - n), num(1, 2), S, x_dot_dphi)))
    return conds


def reduced_fixture(m):
    """The linear-multiplier system phi = alpha(x,t) u, hand-reduced."""
    n, s = m.n, (1 if m.kind == "sphere" else -1)
    S = m.conformal_sum()
    xi, eta = _stage_b_functions(n)
    alpha = fn("alpha", deps=("x", "t"))
    eta_t = partial(eta, T)
    x_dot_xi = add(*[mul(coord(i), xi[i - 1]) for i in range(1, n + 1)])
    conds = []
    for i in range(1, n + 1):
        conds.append(add(
            mul(2, partial(xi[i - 1], coord(i))),
            mul(R, alpha),
            mul(-1, eta_t),
            mul(-4 * s, pow_(S, -1), x_dot_xi)))
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            conds.append(add(partial(xi[i - 1], coord(j)),
                             partial(xi[j - 1], coord(i))))
    conds.append(add(
        mul(add(R, ONE, mul(-1, Q)), alpha, pow_(U, Q)),
        mul(-1, eta_t, pow_(U, Q)),
        mul(partial(alpha, T), pow_(U, add(R, 1))),
        mul(-1, U, laplace_beltrami(m, alpha))))
    for k in range(1, n + 1):
        conds.append(add(
            mul(pow_(U, R), partial(xi[k - 1], T)),
            mul(-1, laplace_beltrami(m, xi[k - 1])),
            mul(num(1, 2), pow_(S, 2), partial(alpha, coord(k))),
            mul(s * (2 - n), num(1, 2), S, coord(k),
                add(eta_t, mul(-1, R, alpha))),
            mul(2 - n, add(mul(x_dot_xi, coord(k)),
                           mul(s, num(1, 2), S, xi[k - 1])))))
    return conds


def wrong_bracket_spatial_condition(m, k):
    """The corrected fixture's spatial condition with the bracket
    replaced by [-r u^-1 phi + eta_t + (1-n) phi_u] x^k."""
    n, s = m.n, (1 if m.kind == "sphere" else -1)
    S = m.conformal_sum()
    xi, eta = _stage_b_functions(n)
    phi = fn("phi", deps=("x", "t", "u"))
    x_dot_xi = add(*[mul(coord(i), xi[i - 1]) for i in range(1, n + 1)])
    flat_lap = add(*[partial(partial(xi[k - 1], c), c) for c in m.coords])
    return add(
        mul(2 * s, pow_(S, -1), pow_(U, R), partial(xi[k - 1], T)),
        mul(s, num(1, 2), S,
            add(mul(2, partial(partial(phi, coord(k)), U)),
                mul(-1, flat_lap))),
        mul(-1, R, pow_(U, -1), phi, coord(k)),
        mul(add(partial(eta, T), mul(1 - n, partial(phi, U))), coord(k)),
        mul(2 - n, add(
            mul(2 * s, pow_(S, -1), x_dot_xi, coord(k)),
            xi[k - 1],
            mul(-1, add(*[mul(partial(xi[k - 1], c), c)
                          for c in m.coords])))))


def wrong_dilation_coefficient_condition(m, k):
    """Reduced spatial condition with s*(S/2)(eta_t+(1-n-r)alpha)x^k."""
    n, s = m.n, (1 if m.kind == "sphere" else -1)
    S = m.conformal_sum()
    xi, eta = _stage_b_functions(n)
    alpha = fn("alpha", deps=("x", "t"))
    x_dot_xi = add(*[mul(coord(i), xi[i - 1]) for i in range(1, n + 1)])
    return add(
        mul(pow_(U, R), partial(xi[k - 1], T)),
        mul(-1, laplace_beltrami(m, xi[k - 1])),
        mul(num(1, 2), pow_(S, 2), partial(alpha, coord(k))),
        mul(s, num(1, 2), S, coord(k),
            add(partial(eta, T), mul(add(num(1 - n), mul(-1, R)), alpha))),
        mul(2 - n, add(mul(x_dot_xi, coord(k)),
                       mul(s, num(1, 2), S, xi[k - 1]))))


def _keys(m, exprs):
    return frozenset(normalize_equation(e, m).key for e in exprs)


# ------------------------------------------------------------ fixture tests

@pytest.mark.parametrize("m", [SPHERE2, SPHERE3, BALL2, BALL3],
                         ids=lambda m: f"{m.kind}{m.n}")
def test_atomic_structure_conditions(m):
    ds = system_for(m)
    got_names = set()
    for e in ds.atomics:
        assert e.__class__.__name__ == "Fn"
        got_names.add((e.name, e.spatial, e.t_count, e.u_count))
    expected = {("eta", (), 0, 1), ("phi", (), 0, 2)}
    expected |= {("eta", (k,), 0, 0) for k in range(1, m.n + 1)}
    expected |= {(f"xi{k}", (), 0, 1) for k in range(1, m.n + 1)}
    assert got_names == expected


@pytest.mark.parametrize("m", [SPHERE2, SPHERE3, BALL2, BALL3],
                         ids=lambda m: f"{m.kind}{m.n}")
def test_comparison_conditions_match_hand_encoding(m):
    ds = system_for(m)
    assert _keys(m, comparison_fixture(m)) == _keys(m, ds.comparison)


@pytest.mark.parametrize("m", [SPHERE2, SPHERE3, BALL2, BALL3],
                         ids=lambda m: f"{m.kind}{m.n}")
def test_reduced_conditions_match_hand_encoding(m):
    ds = system_for(m)
    assert _keys(m, reduced_fixture(m)) == _keys(m, ds.reduced)


@pytest.mark.parametrize("m", [SPHERE2, SPHERE3, BALL3],
                         ids=lambda m: f"{m.kind}{m.n}")
def test_wrong_bracket_variants_are_not_derived(m):
    ds = system_for(m)
    comparison = _keys(m, ds.comparison)
    reduced = _keys(m, ds.reduced)
    for k in range(1, m.n + 1):
        bad = normalize_equation(wrong_bracket_spatial_condition(m, k), m)
        assert bad.key not in comparison
        bad2 = normalize_equation(
            wrong_dilation_coefficient_condition(m, k), m)
        assert bad2.key not in reduced


def test_exponential_scaling_rejects_wrong_bracket():
    # the known symmetry eta = e^{rt}, phi = e^{rt} u of the q = r+1
    # regime satisfies the corrected spatial condition but leaves
    # (1-n) e^{rt} x^k in the phi_u-bracket variant
    mapping = {"eta": app("exp", mul(R, T)),
               "phi": mul(app("exp", mul(R, T)), U),
               "xi1": ZERO, "xi2": ZERO, "xi3": ZERO}
    for m in (SPHERE3, BALL3):
        fixture = comparison_fixture(m)
        # spatial conditions sit after phi_uu and the n + pairs entries
        start = 1 + m.n + m.n * (m.n - 1) // 2
        for k in range(1, m.n + 1):
            good = subst_functions(fixture[start + k - 1], mapping)
            assert good == ZERO
            bad = subst_functions(wrong_bracket_spatial_condition(m, k),
                                  mapping)
            want = mul(1 - m.n, app("exp", mul(R, T)), coord(k))
            assert bad == want


# -------------------------------------------------------------- memberships

def _field(n, xi=None, eta=ZERO, phi=ZERO):
    xi = tuple(xi) if xi is not None else tuple([ZERO] * n)
    return VectorFieldAnsatz(xi=xi, eta=eta, phi=phi)


def test_time_translation_belongs_to_every_system():
    for m in (SPHERE2, BALL2):
        ds = system_for(m)
        rep = check_membership(_field(2, eta=ONE), ds)
        assert rep["satisfied"]


def test_rotation_belongs():
    ds = system_for(SPHERE2)
    rot = _field(2, xi=(mul(-1, coord(2)), coord(1)))
    assert check_membership(rot, ds)["satisfied"]


def test_plain_dilation_is_rejected():
    ds = system_for(SPHERE2)
    dil = _field(2, xi=(coord(1), coord(2)))
    rep = check_membership(dil, ds)
    assert not rep["satisfied"]
    assert any(res != ZERO for res in rep["residuals"])


def test_exponential_scaling_membership_depends_on_case():
    v = _field(2, eta=app("exp", mul(R, T)),
               phi=mul(app("exp", mul(R, T)), U))
    generic = system_for(SPHERE2)
    assert not check_membership(v, generic)["satisfied"]
    tied = derive_determining_system(PDEInstance(SPHERE2),
                                     Case.Q_EQ_RPLUS1)
    assert check_membership(v, tied)["satisfied"]


# ------------------------------------------------------------ normalization

def test_normalize_equation_kills_rational_scale():
    e = parse("xi1_2 + xi2_1", n=2, functions=ANSATZ_FUNCTIONS)
    for c in (num(3), num(-1, 7)):
        assert normalize_equation(mul(c, e), SPHERE2) == \
            normalize_equation(e, SPHERE2)


def test_normalize_equation_clears_conformal_denominators():
    S = SPHERE2.conformal_sum()
    e = parse("xi1_2 + xi2_1", n=2, functions=ANSATZ_FUNCTIONS)
    assert normalize_equation(mul(pow_(S, -2), e), SPHERE2) == \
        normalize_equation(e, SPHERE2)


def test_derivation_is_deterministic():
    a = derive_determining_system(PDEInstance(SPHERE2))
    b = derive_determining_system(PDEInstance(SPHERE2))
    assert [e.key for e in a.equations] == [e.key for e in b.equations]
