"""Command-line client over the service handlers.

Every subcommand builds a request model, runs the matching handler in
process, and serializes the response deterministically (sorted keys,
two-space indent), so identical configuration and seed give
byte-identical artifacts.  A human-readable summary goes to stdout
unless --json-only is set; --out writes the JSON document to a file.

Exit codes: 0 all checks passed, 1 a verification check failed,
2 usage error, 3 internal error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .service import handlers
from .service.models import (CatalogRequest, DetermineRequest,
                             ProlongRequest, ReduceRequest,
                             TorsionCheckRequest, VerifyRequest)


def dumps(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _common(fn):
    # global flags, attached to every subcommand
    fn = click.option("--json-only", is_flag=True,
                      help="Print only the JSON document.")(fn)
    fn = click.option("--out", type=click.Path(dir_okay=False),
                      default=None, help="Write the JSON artifact here.")(fn)
    fn = click.option("--tol", type=float, default=1e-8, show_default=True,
                      help="Residual tolerance for pass/fail checks.")(fn)
    fn = click.option("--seed", type=int, default=0, show_default=True,
                      help="Seed for the randomized routes.")(fn)
    return fn


def _run(handler, request, out, json_only, summary):
    """Invoke, emit, exit. Returns only when every check passed."""
    try:
        response = handler(request)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    except Exception as exc:
        click.echo(f"internal error: {exc}", err=True)
        sys.exit(3)
    payload = response.model_dump(by_alias=True)
    text = dumps(payload)
    if out:
        Path(out).write_text(text)
    if json_only:
        click.echo(text, nl=False)
    else:
        for line in summary(payload):
            click.echo(line)
        if not out:
            click.echo(text, nl=False)
    if not payload.get("passed", True):
        sys.exit(1)


@click.group()
def main():
    """Symmetry groups of u_t = u^-r (Lap_g u + u^q) on model manifolds."""


@main.command()
@click.option("--manifold", default="sphere", show_default=True)
@click.option("--n", type=int, default=2, show_default=True)
@click.option("--case", default="generic", show_default=True)
@_common
def determine(manifold, n, case, seed, tol, out, json_only):
    """Derive the determining system for (manifold, n) under a case."""
    req = DetermineRequest(manifold=manifold, n=n, case=case)

    def summary(p):
        yield (f"{p['manifold']} n={p['n']} case={p['case']}: "
               f"{len(p['equations'])} determining equations")

    _run(handlers.handle_determine, req, out, json_only, summary)


@main.command()
@click.option("--manifold", default="sphere", show_default=True)
@click.option("--n", type=int, default=2, show_default=True)
@click.option("--case", required=True)
@click.option("--r", "r", required=True)
@click.option("--q", "q", required=True)
@_common
def catalog(manifold, n, case, r, q, seed, tol, out, json_only):
    """List the symmetry group families for one exponent case."""
    req = CatalogRequest(manifold=manifold, n=n, case=case, r=r, q=q)

    def summary(p):
        yield (f"{p['manifold']} n={p['n']} case={p['case']} "
               f"r={p['r']} q={p['q']}: {len(p['families'])} families")
        for fam in p["families"]:
            yield f"  {fam['name']}"

    _run(handlers.handle_catalog, req, out, json_only, summary)


@main.command()
@click.option("--manifold", default="sphere", show_default=True)
@click.option("--n", type=int, default=2, show_default=True)
@click.option("--case", required=True)
@click.option("--r", "r", required=True)
@click.option("--q", "q", required=True)
@click.option("--points", type=int, default=1000, show_default=True)
@_common
def verify(manifold, n, case, r, q, points, seed, tol, out, json_only):
    """Evaluate the prolonged criterion at random on-shell jet points."""
    req = VerifyRequest(manifold=manifold, n=n, case=case, r=r, q=q,
                        points=points, seed=seed, tol=tol)

    def summary(p):
        for name in sorted(p["generators"]):
            rep = p["generators"][name]
            verdict = "pass" if rep["pass"] else "FAIL"
            yield (f"{name}: max={rep['max_residual']:.3e} "
                   f"mean={rep['mean_residual']:.3e} [{verdict}]")
        yield "all passed" if p["passed"] else "verification FAILED"

    _run(handlers.handle_verify, req, out, json_only, summary)


@main.command("torsion-check")
@click.option("--n", type=int, default=3, show_default=True)
@click.option("--variant", default="sphere+", show_default=True,
              help="sphere+, sphere-, or ball.")
@click.option("--lam0", default=None,
              help="Also run the radial ODE route at this lambda_0.")
@click.option("--random", "random_k", type=int, default=0, show_default=True,
              help="Number of random antisymmetric family members to check.")
@_common
def torsion_check(n, variant, lam0, random_k, seed, tol, out, json_only):
    """Check torsion-system residuals and the radial ODE reduction."""
    req = TorsionCheckRequest(n=n, variant=variant, lam0=lam0,
                              random=random_k, seed=seed, tol=tol)

    def summary(p):
        if p["random_families"]:
            yield (f"{p['random_families']} random families: "
                   f"{p['nonzero_residuals']} nonzero residuals")
        if p["ode"] is not None:
            o = p["ode"]
            yield (f"lam0={o['lam0']}: ode deviation {o['max_ode_deviation']:.3e}, "
                   f"grid residual {o['grid_max_residual']:.3e}, "
                   f"consistent={o['consistent']}")
        yield "all passed" if p["passed"] else "verification FAILED"

    _run(handlers.handle_torsion_check, req, out, json_only, summary)


@main.command()
@click.option("--n", type=int, default=None)
@click.option("--xi", "xi", multiple=True, required=True,
              help="Spatial components, one flag per coordinate.")
@click.option("--eta", default="0", show_default=True)
@click.option("--phi", default="0", show_default=True)
@_common
def prolong(n, xi, eta, phi, seed, tol, out, json_only):
    """Print the prolongation coefficients of a point vector field."""
    req = ProlongRequest(n=n, xi=list(xi), eta=eta, phi=phi)

    def summary(p):
        for k, e in enumerate(p["phi_i"], start=1):
            yield f"phi^{k} = {e}"
        yield f"phi^t = {p['phi_t']}"
        for key in sorted(p["phi_ij"]):
            yield f"phi^({key}) = {p['phi_ij'][key]}"

    _run(handlers.handle_prolong, req, out, json_only, summary)


@main.command()
@click.option("--m", "m", required=True)
@click.option("--p", "p", required=True)
@_common
def reduce(m, p, seed, tol, out, json_only):
    """Map u_t - Lap_g(u^m) = u^p to normal-form exponents (r, q)."""
    req = ReduceRequest(m=m, p=p)

    def summary(pay):
        yield f"r={pay['r']} q={pay['q']} case={pay['case']}"

    _run(handlers.handle_reduce, req, out, json_only, summary)


if __name__ == "__main__":
    main()
