"""Service handlers: pure functions from request models to response models.

The CLI calls these directly when no remote server is configured; the
FastAPI app wires them to routes.  Core-level exceptions (InputError,
PositivityError) propagate to the caller, which maps them to exit codes
or HTTP statuses.
"""

from __future__ import annotations

import numpy as np

from .. import serialize
from ..errors import InputError
from ..forms import HermForm
from ..polyalg import vee
from ..starprod import star
from ..states import StateDesc, analytic_vector_series, gns_build
from ..verify import run_suite
from .models import (GnsRequest, GnsResponse, MultiplyRequest,
                     MultiplyResponse, PolyModel, VerifyRequest,
                     VerifyResponse)


def do_multiply(req: MultiplyRequest) -> MultiplyResponse:
    x = serialize.poly_from_json(req.x.model_dump())
    y = serialize.poly_from_json(req.y.model_dump())
    if req.lam is None:
        product = vee(x, y)
    else:
        lam = serialize.bilform_from_json(req.lam.model_dump())
        product = star(x, y, lam)
    return MultiplyResponse(
        product=PolyModel.model_validate(serialize.poly_to_json(product)))


def do_verify(req: VerifyRequest) -> VerifyResponse:
    rep = run_suite(req.suite, samples=req.samples, d=req.dim,
                    maxdeg=req.maxdeg, seed=req.seed, tol=req.tol)
    return VerifyResponse(suite=rep.suite, passed=rep.passed,
                          checks=rep.checks, failures=rep.failures,
                          max_ratio=rep.max_ratio, csv=rep.to_csv(),
                          witness=rep.witness)


def do_gns(req: GnsRequest) -> GnsResponse:
    state = StateDesc.from_json(req.state.model_dump())
    lam = serialize.bilform_from_json(req.lam.model_dump())
    if req.cutoff < 0:
        raise InputError("cutoff must be >= 0")
    rep = gns_build(state, lam, req.cutoff)
    h = (rep.gram + rep.gram.conj().T) / 2.0
    min_eig = float(np.linalg.eigvalsh(h)[0])
    series_csv = None
    threshold = None
    if req.series is not None:
        x = serialize.poly_from_json(req.series.x.model_dump())
        y = None
        if req.series.y is not None:
            y = serialize.poly_from_json(req.series.y.model_dump())
        alpha = None
        if req.series.alpha is not None:
            alpha = HermForm(
                serialize.matrix_from_json(req.series.alpha.model_dump()))
        table = analytic_vector_series(rep, x, y=y, eps=req.series.eps,
                                       nmax=req.series.nmax, alpha=alpha)
        series_csv = table.to_csv()
        threshold = int(table.witness["threshold"])
    return GnsResponse(rep=rep.to_json(), min_eigenvalue=min_eig,
                       hilbert_dim=rep.hilbert_dim, series_csv=series_csv,
                       series_threshold=threshold)
