"""Request and response schemas shared by the HTTP service and the CLI.

Exact rationals cross the wire as JSON integers when integral and as
"p/q" strings otherwise; floats are accepted on input and read through
their decimal representation.
"""

from __future__ import annotations

from typing import Optional, Union

from pydantic import BaseModel, ConfigDict, Field

Rational = Union[int, str, float]


class DetermineRequest(BaseModel):
    manifold: str = "sphere"
    n: int = Field(default=2, ge=2, le=6)
    case: str = "generic"


class DetermineResponse(BaseModel):
    manifold: str
    n: int
    case: str
    equations: list[str]


class FamilyEntry(BaseModel):
    """One one-parameter group: generator components plus its flow."""

    name: str
    xi: list[str]
    eta: str
    phi: str
    t_flow: str
    u_factor: str
    domain: Optional[str] = None
    rotation: Optional[list[list[Rational]]] = None


class CatalogRequest(BaseModel):
    manifold: str = "sphere"
    n: int = Field(default=2, ge=2, le=6)
    case: str
    r: Rational
    q: Rational


class CatalogResponse(BaseModel):
    manifold: str
    n: int
    case: str
    r: Rational
    q: Rational
    families: list[FamilyEntry]


class VerifyRequest(BaseModel):
    manifold: str = "sphere"
    n: int = Field(default=2, ge=2, le=6)
    case: str
    r: Rational
    q: Rational
    points: int = Field(default=1000, ge=1)
    seed: int = 0
    tol: float = 1e-8


class GeneratorReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    max_residual: float
    mean_residual: float
    points: int
    passed: bool = Field(alias="pass")


class VerifyResponse(BaseModel):
    manifold: str
    n: int
    case: str
    r: Rational
    q: Rational
    points: int
    seed: int
    tol: float
    generators: dict[str, GeneratorReport]
    passed: bool


class TorsionCheckRequest(BaseModel):
    n: int = Field(default=3, ge=2, le=6)
    variant: str = "sphere+"
    lam0: Optional[Rational] = None
    random: int = Field(default=0, ge=0)
    seed: int = 0
    tol: float = 1e-8


class OdeReport(BaseModel):
    lam0: float
    max_ode_deviation: float
    grid_max_residual: float
    consistent: bool


class TorsionCheckResponse(BaseModel):
    n: int
    variant: str
    seed: int
    random_families: int
    nonzero_residuals: int
    family_exact_zero: bool
    ode: Optional[OdeReport] = None
    passed: bool


class ProlongRequest(BaseModel):
    n: Optional[int] = Field(default=None, ge=1, le=6)
    xi: list[str] = Field(min_length=1)
    eta: str = "0"
    phi: str = "0"


class ProlongResponse(BaseModel):
    n: int
    phi_i: list[str]
    phi_t: str
    phi_ij: dict[str, str]


class ReduceRequest(BaseModel):
    m: Rational
    p: Rational


class ReduceResponse(BaseModel):
    r: Rational
    q: Rational
    case: str
