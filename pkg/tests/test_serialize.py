"""JSON readers and writers: round trips, validation, error positions."""

import numpy as np
import pytest

from symstar.errors import InputError
from symstar.forms import BilForm
from symstar.polyalg import Poly, allclose
from symstar.sampling import random_poly, rng_for
from symstar.serialize import (
    bilform_from_json,
    hermform_from_json,
    load_json_file,
    loads,
    matrix_from_json,
    matrix_to_json,
    poly_from_json,
    poly_to_json,
)


def test_poly_round_trip(rng):
    for _ in range(10):
        d = int(rng.integers(1, 4))
        x = random_poly(rng, d, 4)
        assert allclose(poly_from_json(poly_to_json(x)), x, rel=1e-15)


def test_poly_terms_emitted_in_canonical_order():
    x = Poly(2, {(2, 0): 1.0, (0, 0): 2.0, (0, 1): 3.0, (1, 1): 4.0})
    exps = [tuple(t["exp"]) for t in poly_to_json(x)["terms"]]
    assert exps == [(0, 0), (0, 1), (2, 0), (1, 1)] or \
        exps == sorted(exps, key=lambda m: (sum(m), m))


def test_poly_reader_validation():
    with pytest.raises(InputError, match="missing 'dim'"):
        poly_from_json({"terms": []})
    with pytest.raises(InputError, match="must be >= 1"):
        poly_from_json({"dim": 0, "terms": []})
    with pytest.raises(InputError, match="'exp'"):
        poly_from_json({"dim": 2, "terms": [{"re": 1.0}]})
    with pytest.raises(InputError, match="list of 2 integers"):
        poly_from_json({"dim": 2, "terms": [{"exp": [1], "re": 1.0}]})
    with pytest.raises(InputError, match="negative exponent"):
        poly_from_json({"dim": 1, "terms": [{"exp": [-1], "re": 1.0}]})
    with pytest.raises(InputError, match="duplicate exponent"):
        poly_from_json({"dim": 1, "terms": [{"exp": [1], "re": 1.0},
                                            {"exp": [1], "im": 2.0}]})
    with pytest.raises(InputError, match="JSON object"):
        poly_from_json([1, 2, 3])


def test_matrix_round_trip_real_omits_im():
    m = np.array([[1.0, 2.0], [3.0, 4.0]])
    doc = matrix_to_json(m)
    assert "im" not in doc
    assert np.allclose(matrix_from_json(doc), m)


def test_matrix_round_trip_complex():
    m = np.array([[1.0, 2j], [-2j, 0.5]])
    doc = matrix_to_json(m)
    assert "im" in doc
    assert np.allclose(matrix_from_json(doc), m)


def test_matrix_reader_validation():
    with pytest.raises(InputError, match="'dim' and 're'"):
        matrix_from_json({"dim": 2})
    with pytest.raises(InputError, match="2x2"):
        matrix_from_json({"dim": 2, "re": [[1.0, 2.0]]})
    with pytest.raises(InputError, match="only numbers"):
        matrix_from_json({"dim": 1, "re": [["x"]]})


def test_hermform_reader_names_eigenvalue():
    doc = {"dim": 2, "re": [[1.0, 0.0], [0.0, -2.0]]}
    with pytest.raises(InputError, match="eigenvalue"):
        hermform_from_json(doc)
    good = hermform_from_json({"dim": 1, "re": [[2.0]]})
    assert good.matrix[0, 0] == pytest.approx(2.0)


def test_bilform_reader():
    b = bilform_from_json({"dim": 2, "re": [[0.0, 1.0], [-1.0, 0.0]]})
    assert isinstance(b, BilForm)
    assert not b.is_symmetric()


def test_loads_reports_position():
    with pytest.raises(InputError, match=r"line 2 column 10"):
        loads('{\n  "dim": ,\n}', what="driving form")
    with pytest.raises(InputError, match="driving form"):
        loads("{nope}", what="driving form")


def test_load_json_file(tmp_path):
    p = tmp_path / "x.json"
    p.write_text('{"dim": 1, "terms": [{"exp": [2], "re": 1.5}]}')
    x = poly_from_json(load_json_file(str(p)))
    assert x.coefficient((2,)) == pytest.approx(1.5)
    with pytest.raises(InputError, match="cannot read"):
        load_json_file(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2,")
    with pytest.raises(InputError, match="line 1"):
        load_json_file(str(bad))
