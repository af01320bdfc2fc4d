"""FastAPI application exposing the core operations over HTTP.

POST /multiply, /verify, /gns with the request models from
symstar.service.models; GET /health for liveness.  Input problems map to
400, positivity failures to 409 (with the offending eigenvalue in the
body); pydantic shape violations give FastAPI's usual 422.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..errors import InputError, PositivityError
from . import api
from .models import (GnsRequest, GnsResponse, MultiplyRequest,
                     MultiplyResponse, VerifyRequest, VerifyResponse)


def create_app() -> FastAPI:
    app = FastAPI(title="symstar",
                  description="deformed products on symmetric tensor "
                              "algebras, with verification suites")

    @app.exception_handler(InputError)
    async def _input_error(request: Request, exc: InputError):
        return JSONResponse(status_code=400,
                            content={"error": "input", "message": str(exc)})

    @app.exception_handler(PositivityError)
    async def _positivity_error(request: Request, exc: PositivityError):
        return JSONResponse(
            status_code=409,
            content={"error": "positivity", "message": str(exc),
                     "min_eigenvalue": exc.min_eigenvalue})

    @app.get("/health")
    async def health():
        return {"status": "ok"}

    @app.post("/multiply", response_model=MultiplyResponse)
    async def multiply(req: MultiplyRequest):
        return api.do_multiply(req)

    @app.post("/verify", response_model=VerifyResponse)
    async def verify(req: VerifyRequest):
        return api.do_verify(req)

    @app.post("/gns", response_model=GnsResponse)
    async def gns(req: GnsRequest):
        return api.do_gns(req)

    return app
