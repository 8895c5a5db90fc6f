"""Pipeline entry points shared by the FastAPI routes and the CLI.

Each handler takes a request model and returns a response model.  Bad
configuration raises ValueError (mapped to HTTP 400 / exit code 2);
anything else that escapes is an internal error (HTTP 500 / exit 3).
Checks that run but fail set `passed = False` instead of raising.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..catalog import build_catalog, reduce_to_semilinear
from ..exprs import Case, ZERO, parse, to_text
from ..geometry import ManifoldModel
from ..prolongation import (PDEInstance, VectorFieldAnsatz,
                            derive_determining_system, prolong_coefficients)
from ..torsion import (TorsionSystem, family_construct, lambda_ode_check,
                       torsion_residual)
from ..verify import generator_report, sample_jet_points
from .models import (CatalogRequest, CatalogResponse, DetermineRequest,
                     DetermineResponse, FamilyEntry, GeneratorReport,
                     OdeReport, ProlongRequest, ProlongResponse,
                     ReduceRequest, ReduceResponse, TorsionCheckRequest,
                     TorsionCheckResponse, VerifyRequest, VerifyResponse)


def rational_in(value) -> Fraction:
    """Read an exact rational from an int, a float, or a 'p/q' string."""
    if isinstance(value, bool):
        raise ValueError(f"expected a rational number, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, (float, str)):
        try:
            return Fraction(str(value).strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational number: {value!r} ({exc})")
    raise ValueError(f"expected a rational number, got {value!r}")


def rational_out(value: Fraction):
    value = Fraction(value)
    if value.denominator == 1:
        return int(value)
    return f"{value.numerator}/{value.denominator}"


def _model(manifold: str, n: int) -> ManifoldModel:
    m = ManifoldModel(manifold, n)
    if m.kind == "flat":
        raise ValueError("the flat model has no symmetry classification "
                         "here; choose sphere or hyperbolic")
    return m


def handle_determine(req: DetermineRequest) -> DetermineResponse:
    m = _model(req.manifold, req.n)
    case = Case.from_string(req.case)
    system = derive_determining_system(PDEInstance(m), case)
    return DetermineResponse(
        manifold=m.kind, n=m.n, case=case.label,
        equations=[to_text(e) for e in system.equations])


def _family_entry(ga) -> FamilyEntry:
    rotation = None
    if ga.rotation is not None:
        rotation = [[rational_out(v) for v in row] for row in ga.rotation.a]
    return FamilyEntry(
        name=ga.name,
        xi=[to_text(c) for c in ga.generator.xi],
        eta=to_text(ga.generator.eta),
        phi=to_text(ga.generator.phi),
        t_flow=to_text(ga.t_flow),
        u_factor=to_text(ga.u_factor),
        domain=None if ga.domain is None else to_text(ga.domain),
        rotation=rotation)


def handle_catalog(req: CatalogRequest) -> CatalogResponse:
    m = _model(req.manifold, req.n)
    case = Case.from_string(req.case)
    r, q = rational_in(req.r), rational_in(req.q)
    families = build_catalog(m, case, r, q)
    return CatalogResponse(
        manifold=m.kind, n=m.n, case=case.label,
        r=rational_out(r), q=rational_out(q),
        families=[_family_entry(ga) for ga in families])


def handle_verify(req: VerifyRequest) -> VerifyResponse:
    m = _model(req.manifold, req.n)
    case = Case.from_string(req.case)
    r, q = rational_in(req.r), rational_in(req.q)
    families = build_catalog(m, case, r, q)
    pde = PDEInstance(m, r=r, q=q)
    points = sample_jet_points(pde, req.points, req.seed)
    reports = {}
    all_pass = True
    for ga in families:
        rep = generator_report(ga.generator, pde, points)
        ok = rep["max_residual"] < req.tol
        all_pass = all_pass and ok
        reports[ga.name] = GeneratorReport(
            max_residual=rep["max_residual"],
            mean_residual=rep["mean_residual"],
            points=rep["points"], passed=ok)
    return VerifyResponse(
        manifold=m.kind, n=m.n, case=case.label,
        r=rational_out(r), q=rational_out(q),
        points=req.points, seed=req.seed, tol=req.tol,
        generators=reports, passed=all_pass)


def _random_antisymmetric(n: int, rng) -> list:
    a = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            v = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 8)))
            a[i][j], a[j][i] = v, -v
    return a


def handle_torsion_check(req: TorsionCheckRequest) -> TorsionCheckResponse:
    ts = TorsionSystem.from_variant(req.n, req.variant)
    rng = np.random.default_rng(req.seed)
    nonzero = 0
    for _ in range(req.random):
        sol = family_construct(_random_antisymmetric(req.n, rng))
        residuals = torsion_residual(ts, sol.xi_expressions(), ZERO)
        if any(res != ZERO for res in residuals):
            nonzero += 1
    exact = nonzero == 0
    passed = exact

    ode = None
    if req.lam0 is not None:
        if req.n != 3:
            raise ValueError("the radial ODE route is the n = 3 reduction; "
                             "drop --lam0 or use --n 3")
        report = lambda_ode_check(float(rational_in(req.lam0)))
        ode = OdeReport(**report)
        passed = passed and report["max_ode_deviation"] < req.tol \
            and report["consistent"]

    return TorsionCheckResponse(
        n=req.n, variant=ts.variant, seed=req.seed,
        random_families=req.random, nonzero_residuals=nonzero,
        family_exact_zero=exact, ode=ode, passed=passed)


def handle_prolong(req: ProlongRequest) -> ProlongResponse:
    n = len(req.xi) if req.n is None else req.n
    if n != len(req.xi):
        raise ValueError(f"got {len(req.xi)} xi components for n = {n}")
    v = VectorFieldAnsatz(
        xi=tuple(parse(s, n=n) for s in req.xi),
        eta=parse(req.eta, n=n), phi=parse(req.phi, n=n))
    phi_i, phi_t, phi_ij = prolong_coefficients(v)
    return ProlongResponse(
        n=n,
        phi_i=[to_text(e) for e in phi_i],
        phi_t=to_text(phi_t),
        phi_ij={f"{i},{j}": to_text(e) for (i, j), e in phi_ij.items()})


def handle_reduce(req: ReduceRequest) -> ReduceResponse:
    r, q, case = reduce_to_semilinear(rational_in(req.m), rational_in(req.p))
    return ReduceResponse(r=rational_out(r), q=rational_out(q),
                          case=case.label)
