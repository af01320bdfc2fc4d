"""Pydantic request/response models for the HTTP service.

The JSON field layout deliberately matches the file formats in
symstar.serialize, so the same dicts round-trip between the CLI, the
service, and the on-disk formats; semantic validation (PSD checks,
duplicate exponents, dimension agreement) happens in the core package.
"""

from __future__ import annotations

from pydantic import BaseModel, Field


class PolyTermModel(BaseModel):
    exp: list[int]
    re: float = 0.0
    im: float = 0.0


class PolyModel(BaseModel):
    dim: int
    terms: list[PolyTermModel] = Field(default_factory=list)


class MatrixModel(BaseModel):
    dim: int
    re: list[list[float]]
    im: list[list[float]] | None = None


class StateModel(BaseModel):
    rho: list[float]
    b: MatrixModel
    z: float = 1.0


class MultiplyRequest(BaseModel):
    x: PolyModel
    y: PolyModel
    lam: MatrixModel | None = None  # omitted -> plain symmetric product


class MultiplyResponse(BaseModel):
    product: PolyModel


class VerifyRequest(BaseModel):
    suite: str
    samples: int = 200
    dim: int = 2
    maxdeg: int = 4
    seed: int = 0
    tol: float = 1e-9


class VerifyResponse(BaseModel):
    suite: str
    passed: bool
    checks: int
    failures: int
    max_ratio: float | None = None
    csv: str
    witness: dict | None = None


class SeriesRequest(BaseModel):
    x: PolyModel
    y: PolyModel | None = None
    eps: float | None = None
    nmax: int = 10
    # reference form for the default eps rule (identity when omitted)
    alpha: MatrixModel | None = None


class GnsRequest(BaseModel):
    state: StateModel
    lam: MatrixModel
    cutoff: int = 6
    series: SeriesRequest | None = None


class GnsResponse(BaseModel):
    rep: dict
    min_eigenvalue: float
    hilbert_dim: int
    series_csv: str | None = None
    series_threshold: int | None = None


class ErrorResponse(BaseModel):
    error: str
    message: str
    min_eigenvalue: float | None = None
