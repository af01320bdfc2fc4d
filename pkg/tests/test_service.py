"""HTTP facade: the endpoints delegate to the core package and map domain
errors onto status codes (400 input, 409 positivity)."""

import math

import pytest
from fastapi.testclient import TestClient

from symstar.polyalg import Poly, allclose
from symstar.serialize import poly_from_json
from symstar.service.app import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def P(dim, terms):
    return {"dim": dim, "terms": [{"exp": list(e), "re": c.real, "im": c.imag}
                                  for e, c in terms.items()]}


E2 = P(1, {(2,): complex(1.0)})


def test_health(client):
    r = client.get("/health")
    assert r.status_code == 200
    assert r.json() == {"status": "ok"}


def test_multiply_deformed(client):
    r = client.post("/multiply", json={
        "x": E2, "y": E2, "lam": {"dim": 1, "re": [[0.5]]}})
    assert r.status_code == 200
    got = poly_from_json(r.json()["product"])
    want = Poly(1, {(4,): 1.0, (2,): 2.0, (0,): 0.5})
    assert allclose(got, want, rel=1e-12)


def test_multiply_defaults_to_plain_product(client):
    r = client.post("/multiply", json={"x": E2, "y": E2})
    assert r.status_code == 200
    got = poly_from_json(r.json()["product"])
    assert allclose(got, Poly(1, {(4,): 1.0}), rel=1e-12)


def test_multiply_rejects_duplicate_exponent(client):
    bad = {"dim": 1, "terms": [{"exp": [2], "re": 1.0}, {"exp": [2], "re": 2.0}]}
    r = client.post("/multiply", json={"x": bad, "y": E2})
    assert r.status_code == 400
    body = r.json()
    assert body["error"] == "input"
    assert "duplicate exponent" in body["message"]


def test_multiply_schema_violation_is_422(client):
    r = client.post("/multiply", json={"x": {"dim": 1}})
    assert r.status_code == 422


def test_verify_endpoint(client):
    r = client.post("/verify", json={"suite": "plambda", "samples": 10})
    assert r.status_code == 200
    body = r.json()
    assert body["passed"] is True
    assert body["checks"] >= 10
    assert body["csv"].startswith("# suite=plambda")


def test_verify_unknown_suite(client):
    r = client.post("/verify", json={"suite": "bogus"})
    assert r.status_code == 400
    assert "available" in r.json()["message"]


def test_verify_reports_failure_with_witness(client):
    r = client.post("/verify", json={"suite": "equivalence", "samples": 5,
                                     "tol": 0.0})
    assert r.status_code == 200
    body = r.json()
    assert body["passed"] is False
    assert body["witness"] is not None


def test_gns_endpoint(client):
    r = client.post("/gns", json={
        "state": {"rho": [0.0], "b": {"dim": 1, "re": [[0.0]]}, "z": 1.0},
        "lam": {"dim": 1, "re": [[1.0]]},
        "cutoff": 4})
    assert r.status_code == 200
    body = r.json()
    assert body["hilbert_dim"] == 5
    assert body["min_eigenvalue"] == pytest.approx(1.0)
    assert body["series_csv"] is None


def test_gns_with_series(client):
    r = client.post("/gns", json={
        "state": {"rho": [0.0], "b": {"dim": 1, "re": [[0.0]]}, "z": 1.0},
        "lam": {"dim": 1, "re": [[1.0]]},
        "cutoff": 6,
        "series": {"x": E2, "nmax": 6}})
    assert r.status_code == 200
    body = r.json()
    assert body["series_threshold"] == 0
    assert body["series_csv"].startswith("# suite=series")


def test_gns_positivity_failure_is_409(client):
    r = client.post("/gns", json={
        "state": {"rho": [0.0], "b": {"dim": 1, "re": [[1.0]]}, "z": -5.0},
        "lam": {"dim": 1, "re": [[1.0]]},
        "cutoff": 4})
    assert r.status_code == 409
    body = r.json()
    assert body["error"] == "positivity"
    assert body["min_eigenvalue"] < 0


def test_gns_series_degree_guard(client):
    r = client.post("/gns", json={
        "state": {"rho": [0.0], "b": {"dim": 1, "re": [[0.0]]}, "z": 1.0},
        "lam": {"dim": 1, "re": [[1.0]]},
        "cutoff": 6,
        "series": {"x": P(1, {(3,): complex(1.0)})}})
    assert r.status_code == 400
    assert "quadratic divergence" in r.json()["message"]
