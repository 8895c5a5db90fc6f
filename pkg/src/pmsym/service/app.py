"""HTTP face of the toolkit: one POST route per pipeline.

Run with `uvicorn pmsym.service.app:app`.  Routes return the same
response models the CLI serializes, so artifacts match byte for byte
after identical-config requests.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from . import handlers
from .models import (CatalogRequest, CatalogResponse, DetermineRequest,
                     DetermineResponse, ProlongRequest, ProlongResponse,
                     ReduceRequest, ReduceResponse, TorsionCheckRequest,
                     TorsionCheckResponse, VerifyRequest, VerifyResponse)


def _call(handler, req):
    try:
        return handler(req)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    except Exception as exc:  # pragma: no cover - defensive
        raise HTTPException(status_code=500, detail=f"internal error: {exc}")


def create_app() -> FastAPI:
    app = FastAPI(title="pmsym", description=__doc__)

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/v1/determine", response_model=DetermineResponse)
    def determine(req: DetermineRequest):
        return _call(handlers.handle_determine, req)

    @app.post("/v1/catalog", response_model=CatalogResponse)
    def catalog(req: CatalogRequest):
        return _call(handlers.handle_catalog, req)

    @app.post("/v1/verify", response_model=VerifyResponse)
    def verify(req: VerifyRequest):
        return _call(handlers.handle_verify, req)

    @app.post("/v1/torsion-check", response_model=TorsionCheckResponse)
    def torsion_check(req: TorsionCheckRequest):
        return _call(handlers.handle_torsion_check, req)

    @app.post("/v1/prolong", response_model=ProlongResponse)
    def prolong(req: ProlongRequest):
        return _call(handlers.handle_prolong, req)

    @app.post("/v1/reduce", response_model=ReduceResponse)
    def reduce(req: ReduceRequest):
        return _call(handlers.handle_reduce, req)

    return app


app = create_app()
