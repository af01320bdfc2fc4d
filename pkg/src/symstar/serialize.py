"""JSON interchange for algebra elements and matrices.

Formats:

  polynomial   {"dim": d, "terms": [{"exp": [m_1, ..., m_d],
                                     "re": x, "im": y}, ...]}
  matrix       {"dim": d, "re": [[...]], "im": [[...]]}
               ("im" may be omitted for real matrices)

Readers validate shapes and reject duplicate exponents; writers emit terms
in the canonical (degree, lexicographic) order so output is deterministic.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import InputError
from .forms import BilForm, HermForm
from .polyalg import Poly


def poly_to_json(x: Poly) -> dict:
    terms = []
    for m, c in x.terms.items():
        terms.append({"exp": list(m), "re": float(c.real), "im": float(c.imag)})
    return {"dim": x.dim, "terms": terms}


def poly_from_json(obj) -> Poly:
    if not isinstance(obj, dict):
        raise InputError(f"polynomial must be a JSON object, got {type(obj).__name__}")
    if "dim" not in obj:
        raise InputError("polynomial object is missing 'dim'")
    try:
        dim = int(obj["dim"])
    except (TypeError, ValueError):
        raise InputError(f"polynomial 'dim' must be an integer, got {obj['dim']!r}")
    if dim < 1:
        raise InputError(f"polynomial 'dim' must be >= 1, got {dim}")
    raw = obj.get("terms", [])
    if not isinstance(raw, list):
        raise InputError("polynomial 'terms' must be a list")
    terms = {}
    for i, t in enumerate(raw):
        if not isinstance(t, dict) or "exp" not in t:
            raise InputError(f"term {i} must be an object with an 'exp' field")
        exp = t["exp"]
        if (not isinstance(exp, list) or len(exp) != dim
                or any(not isinstance(v, int) or isinstance(v, bool) for v in exp)):
            raise InputError(
                f"term {i}: 'exp' must be a list of {dim} integers, got {exp!r}")
        if any(v < 0 for v in exp):
            raise InputError(f"term {i}: negative exponent in {exp}")
        key = tuple(exp)
        if key in terms:
            raise InputError(f"duplicate exponent {list(key)} in polynomial terms")
        try:
            c = complex(float(t.get("re", 0.0)), float(t.get("im", 0.0)))
        except (TypeError, ValueError):
            raise InputError(f"term {i}: 're'/'im' must be numbers")
        terms[key] = c
    return Poly(dim, terms)


def matrix_to_json(mat) -> dict:
    mat = np.asarray(mat, dtype=complex)
    out = {"dim": int(mat.shape[0]),
           "re": [[float(v) for v in row] for row in mat.real]}
    if np.any(mat.imag != 0):
        out["im"] = [[float(v) for v in row] for row in mat.imag]
    return out


def matrix_from_json(obj) -> np.ndarray:
    if not isinstance(obj, dict):
        raise InputError(f"matrix must be a JSON object, got {type(obj).__name__}")
    if "dim" not in obj or "re" not in obj:
        raise InputError("matrix object needs 'dim' and 're' fields")
    try:
        dim = int(obj["dim"])
    except (TypeError, ValueError):
        raise InputError(f"matrix 'dim' must be an integer, got {obj['dim']!r}")
    if dim < 1:
        raise InputError(f"matrix 'dim' must be >= 1, got {dim}")

    def _block(name):
        rows = obj[name]
        if (not isinstance(rows, list) or len(rows) != dim
                or any(not isinstance(r, list) or len(r) != dim for r in rows)):
            raise InputError(f"matrix '{name}' must be a {dim}x{dim} array of numbers")
        try:
            return np.array([[float(v) for v in r] for r in rows])
        except (TypeError, ValueError):
            raise InputError(f"matrix '{name}' must contain only numbers")

    mat = _block("re").astype(complex)
    if obj.get("im") is not None:
        mat = mat + 1j * _block("im")
    return mat


def hermform_from_json(obj) -> HermForm:
    """Reads and validates a PSD Hermitian form (constructor errors name
    the offending eigenvalue)."""
    return HermForm(matrix_from_json(obj))


def bilform_from_json(obj) -> BilForm:
    return BilForm(matrix_from_json(obj))


def loads(text: str, what: str = "input"):
    """json.loads with the parse position surfaced in the error."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(
            f"malformed JSON in {what}: {e.msg} at line {e.lineno} column {e.colno}")


def load_json_file(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror or e}")
    return loads(text, what=path)
