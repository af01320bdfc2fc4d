"""Command line front end.

The CLI is a thin client over the service handlers: by default it calls
them in-process, with --server URL it sends the same request models to a
running instance over HTTP.  Exit codes: 0 success, 1 verification
failure, 2 input error, 3 positivity failure.
"""

from __future__ import annotations

import json
import sys

import click
import httpx
from pydantic import ValidationError

from . import serialize
from .errors import InputError, PositivityError
from .service import api
from .service.models import (GnsRequest, GnsResponse, MatrixModel,
                             MultiplyRequest, MultiplyResponse, PolyModel,
                             SeriesRequest, StateModel, VerifyRequest,
                             VerifyResponse)
from .verify import SUITES

_LOCAL = {
    "/multiply": (api.do_multiply, MultiplyResponse),
    "/verify": (api.do_verify, VerifyResponse),
    "/gns": (api.do_gns, GnsResponse),
}


def _call(server: str | None, path: str, request, response_cls):
    if server is None:
        handler, _ = _LOCAL[path]
        return handler(request)
    url = server.rstrip("/") + path
    try:
        resp = httpx.post(url, json=request.model_dump(mode="json"),
                          timeout=600.0)
    except httpx.HTTPError as e:
        raise InputError(f"cannot reach server {url}: {e}")
    if resp.status_code in (400, 422):
        raise InputError(f"server rejected input: {resp.text}")
    if resp.status_code == 409:
        try:
            body = resp.json()
        except ValueError:
            body = {}
        raise PositivityError(body.get("message", resp.text),
                              min_eigenvalue=body.get("min_eigenvalue"))
    if resp.status_code != 200:
        raise InputError(f"server error {resp.status_code}: {resp.text}")
    return response_cls.model_validate(resp.json())


def _model_from_file(path: str, model_cls):
    obj = serialize.load_json_file(path)
    try:
        return model_cls.model_validate(obj)
    except ValidationError as e:
        first = e.errors()[0]
        loc = ".".join(str(p) for p in first.get("loc", ()))
        raise InputError(f"{path}: invalid {model_cls.__name__}"
                         f"{' at ' + loc if loc else ''}: {first.get('msg')}")


def _write_or_print(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


@click.group()
def main():
    """Deformed products on symmetric tensor algebras."""


@main.command()
@click.argument("x_file", type=click.Path())
@click.argument("y_file", type=click.Path())
@click.option("--lambda", "lam_file", type=click.Path(), default=None,
              help="matrix JSON for the driving form; omitted means the "
                   "plain symmetric product")
@click.option("--out", type=click.Path(), default=None,
              help="write the product JSON here instead of stdout")
@click.option("--server", default=None, help="URL of a running service")
def multiply(x_file, y_file, lam_file, out, server):
    """Multiply two polynomial files."""

    def run():
        req = MultiplyRequest(
            x=_model_from_file(x_file, PolyModel),
            y=_model_from_file(y_file, PolyModel),
            lam=_model_from_file(lam_file, MatrixModel) if lam_file else None)
        resp = _call(server, "/multiply", req, MultiplyResponse)
        text = json.dumps(resp.product.model_dump(), indent=2) + "\n"
        _write_or_print(text, out)
        return 0

    sys.exit(_execute(run))


@main.command()
@click.option("--suite", required=True,
              type=click.Choice(sorted(SUITES), case_sensitive=False))
@click.option("--samples", default=200, show_default=True)
@click.option("--dim", default=2, show_default=True)
@click.option("--maxdeg", default=4, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--tol", default=1e-9, show_default=True)
@click.option("--out", type=click.Path(), default=None,
              help="write the CSV report here")
@click.option("--server", default=None, help="URL of a running service")
def verify(suite, samples, dim, maxdeg, seed, tol, out, server):
    """Run a verification suite; exit 1 if any check fails."""

    def run():
        req = VerifyRequest(suite=suite, samples=samples, dim=dim,
                            maxdeg=maxdeg, seed=seed, tol=tol)
        resp = _call(server, "/verify", req, VerifyResponse)
        if out:
            _write_or_print(resp.csv, out)
        else:
            click.echo(resp.csv, nl=False)
        state = "pass" if resp.passed else "FAIL"
        click.echo(f"suite={resp.suite} {state}: checks={resp.checks} "
                   f"failures={resp.failures}", err=True)
        if not resp.passed and resp.witness:
            click.echo(f"witness: {json.dumps(resp.witness)}", err=True)
        return 0 if resp.passed else 1

    sys.exit(_execute(run))


@main.command()
@click.option("--state", "state_file", required=True, type=click.Path(),
              help="state JSON: {rho, b, z}")
@click.option("--lambda", "lam_file", required=True, type=click.Path(),
              help="matrix JSON for the driving form")
@click.option("--maxdeg", default=6, show_default=True,
              help="monomial degree cutoff of the representation")
@click.option("--series-x", "series_file", type=click.Path(), default=None,
              help="polynomial JSON; also emit the analytic-series table "
                   "for this element")
@click.option("--series-y", "series_y_file", type=click.Path(), default=None,
              help="polynomial JSON for the reference vector")
@click.option("--alpha", "alpha_file", type=click.Path(), default=None,
              help="matrix JSON for the form in the default eps rule")
@click.option("--eps", type=float, default=None,
              help="series scale (default: 1/(8 e^6 ||x||^2))")
@click.option("--nmax", default=10, show_default=True)
@click.option("--out", type=click.Path(), default=None,
              help="basename: writes OUT.gns.json and OUT.series.csv")
@click.option("--server", default=None, help="URL of a running service")
def gns(state_file, lam_file, maxdeg, series_file, series_y_file, alpha_file,
        eps, nmax, out, server):
    """Build the GNS data of a state; exit 3 if the state is not positive."""

    def run():
        series = None
        if series_file:
            series = SeriesRequest(
                x=_model_from_file(series_file, PolyModel),
                y=_model_from_file(series_y_file, PolyModel)
                if series_y_file else None,
                alpha=_model_from_file(alpha_file, MatrixModel)
                if alpha_file else None,
                eps=eps, nmax=nmax)
        elif eps is not None or series_y_file or alpha_file:
            raise InputError("--eps/--series-y/--alpha need --series-x")
        req = GnsRequest(state=_model_from_file(state_file, StateModel),
                         lam=_model_from_file(lam_file, MatrixModel),
                         cutoff=maxdeg, series=series)
        resp = _call(server, "/gns", req, GnsResponse)
        rep_text = json.dumps(resp.rep, indent=2) + "\n"
        if out:
            _write_or_print(rep_text, f"{out}.gns.json")
            if resp.series_csv is not None:
                _write_or_print(resp.series_csv, f"{out}.series.csv")
        else:
            click.echo(rep_text, nl=False)
            if resp.series_csv is not None:
                click.echo(resp.series_csv, nl=False)
        click.echo(f"hilbert_dim={resp.hilbert_dim} "
                   f"min_eigenvalue={resp.min_eigenvalue!r}", err=True)
        return 0

    sys.exit(_execute(run))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app
    uvicorn.run(create_app(), host=host, port=port)


def _execute(fn) -> int:
    try:
        return fn()
    except InputError as e:
        click.echo(f"error: {e}", err=True)
        return 2
    except PositivityError as e:
        click.echo(f"positivity failure: {e}", err=True)
        return 3


if __name__ == "__main__":
    main()
