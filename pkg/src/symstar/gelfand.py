"""Jets of algebra elements viewed as functions on functionals.

An element X defines a function on the space of linear functionals by
rho -> evaluate(X, rho).  Around a base point the function is determined
by its derivatives along the frame directions of a positive form alpha;
the jet collects, for each multi-index m over the frame, the value

    jet[m] = <E^f_m, translate(X, rho)>_alpha / |m|!

(E^f_m the frame monomial).  Equivalently: rewrite the translated element
in frame coordinates and rescale the coefficient of m by m!/|m|!.  All of
this is exact polynomial algebra; difference quotients appear only in the
test suite as an independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import serialize
from .errors import DimensionMismatch, InputError
from .forms import (HermForm, frame_coefficients, lambda_of_form, seminorm,
                    weighted_dot)
from .polyalg import (Poly, directional_derivative, evaluate, index_factorial,
                      involution, substitute, translate)
from .report import Report, parallel_map
from .sampling import random_poly, rng_for
from .starprod import star


@dataclass(frozen=True)
class Jet:
    """Derivative data of an element at a base functional.

    coefficients maps multi-indices over the frame variables (length =
    rank of alpha) to complex values; maxdeg is the order the jet was
    taken to.
    """

    dim: int
    rho: tuple
    alpha: HermForm
    maxdeg: int
    coefficients: dict

    @property
    def rank(self) -> int:
        return self.alpha.frame().rank

    def to_json(self) -> dict:
        terms = []
        for m in sorted(self.coefficients, key=lambda m: (sum(m), m)):
            c = self.coefficients[m]
            terms.append({"exp": list(m), "re": float(c.real),
                          "im": float(c.imag)})
        return {"dim": self.dim,
                "rank": self.rank,
                "maxdeg": self.maxdeg,
                "rho": [[float(r.real), float(r.imag)] for r in self.rho],
                "alpha": serialize.matrix_to_json(self.alpha.matrix),
                "terms": terms}


def jet_of(x: Poly, alpha: HermForm, rho, maxdeg: int | None = None) -> Jet:
    """Jet of x at the functional rho w.r.t. the frame of alpha."""
    if x.dim != alpha.dim:
        raise DimensionMismatch(
            f"element has dim {x.dim}, form has dim {alpha.dim}")
    rho = tuple(complex(v) for v in rho)
    if len(rho) != x.dim:
        raise DimensionMismatch(
            f"base point has length {len(rho)}, expected {x.dim}")
    tx = translate(x, rho)
    if maxdeg is None:
        maxdeg = max(tx.top_degree, 0)
    txf = frame_coefficients(tx, alpha)
    coeffs = {}
    for m, c in txf.terms.items():
        k = sum(m)
        if k <= maxdeg:
            coeffs[m] = c * index_factorial(m) / math.factorial(k)
    return Jet(x.dim, rho, alpha, int(maxdeg), coeffs)


def reconstruct(jet: Jet) -> tuple[Poly, bool]:
    """Element with the given jet at the origin, up to the kernel of alpha.

    Returns (element, complete): complete is False when alpha is
    degenerate, in which case only the component visible to the frame can
    be recovered.  Jets at nonzero base points are rejected (recentering
    would need the inverse translation on the invisible part too).
    """
    if any(v != 0 for v in jet.rho):
        raise InputError("reconstruction is only available at base point 0")
    fr = jet.alpha.frame()
    if fr.rank == 0:
        # rank-0 frame: jets live over a single dummy variable and only
        # the constant term is visible
        scalar = jet.coefficients.get((0,), 0j)
        out = Poly(jet.dim, {(0,) * jet.dim: scalar}) if scalar else \
            Poly.zero(jet.dim)
        return out, False
    terms = {}
    for m, c in jet.coefficients.items():
        k = sum(m)
        terms[m] = c * math.factorial(k) / index_factorial(m)
    frame_poly = Poly(fr.rank, terms) if terms else Poly.zero(fr.rank)
    out = substitute(frame_poly, fr.change.T)
    return out, fr.rank == jet.dim


def pointwise_bracket(x: Poly, y: Poly, alpha: HermForm, rho) -> complex:
    """Pointwise pairing of two elements at a functional:

        sum_m (|m|!)^2 / m! * conj(jet_x[m]) * jet_y[m].

    Agrees with <translate(x, rho), translate(y, rho)>_alpha, and for real
    rho also with evaluating x* * y (product driven by alpha's pairing
    form) at rho; the test suite checks all three routes against each
    other.
    """
    jx = jet_of(x, alpha, rho)
    jy = jet_of(y, alpha, rho)
    total = 0j
    for m in jx.coefficients.keys() & jy.coefficients.keys():
        w = math.factorial(sum(m)) ** 2 / index_factorial(m)
        total += w * jx.coefficients[m].conjugate() * jy.coefficients[m]
    return total


def translated_bracket(x: Poly, y: Poly, alpha: HermForm, rho) -> complex:
    """Same pairing via the inner product of the translated elements."""
    tx = frame_coefficients(translate(x, list(rho)), alpha)
    ty = frame_coefficients(translate(y, list(rho)), alpha)
    return weighted_dot(tx, ty)


def star_bracket(x: Poly, y: Poly, alpha: HermForm, rho) -> complex:
    """Same pairing (for real rho) by evaluating x* * y at rho, with the
    product driven by alpha's conjugate pairing."""
    return evaluate(star(involution(x), y, lambda_of_form(alpha)), list(rho))


# -- derivative and translation norm bounds -------------------------------


def functional_dominated(rho, alpha: HermForm, slack: float = 1e-10) -> bool:
    """Whether |rho(v)| <= ||v||_alpha for every v: rho must kill the
    kernel of alpha and have frame norm at most 1."""
    rho = np.asarray(list(rho), dtype=complex)
    if rho.shape != (alpha.dim,):
        raise DimensionMismatch(
            f"functional has length {rho.shape[0]}, expected {alpha.dim}")
    fr = alpha.frame()
    rtol = 1e-12 * max(1.0, float(np.max(np.abs(rho))) if rho.size else 0.0)
    if fr.kernel.size and float(np.max(np.abs(rho @ fr.kernel))) > rtol:
        return False
    if fr.rank == 0:
        return True
    return float(np.linalg.norm(fr.change @ rho)) <= 1.0 + slack


_DERIV_INEQ = ("||D_rho^t X||_alpha <= sqrt(t!) * ||X||_{2 alpha}; "
               "translation rows (k=-1): ||translate(X, rho)||_alpha <= "
               "2/(sqrt(2)-1) * ||X||_{2 alpha}; needs |rho(v)| <= ||v||_alpha")

TRANSLATION_CONST = 2.0 / (math.sqrt(2.0) - 1.0)


def _derivative_rows(x: Poly, rho, alpha: HermForm, tmax: int, tol: float,
                     tag: str):
    doubled = alpha.scaled(2.0)
    base = seminorm(x, doubled)
    rows = []
    term = x
    for t in range(tmax + 1):
        if t > 0:
            term = directional_derivative(term, rho)
        observed = seminorm(term, alpha)
        bound = math.sqrt(math.factorial(t)) * base
        ratio = observed / bound if bound > 0 else \
            (0.0 if observed <= 1e-12 else math.inf)
        rows.append(((f"{tag}t{t}", t, x.top_degree, observed, bound, ratio),
                     ratio <= 1.0 + tol, ratio))
    observed = seminorm(translate(x, list(rho)), alpha)
    bound = TRANSLATION_CONST * base
    ratio = observed / bound if bound > 0 else \
        (0.0 if observed <= 1e-12 else math.inf)
    rows.append(((f"{tag}tr", -1, x.top_degree, observed, bound, ratio),
                 ratio <= 1.0 + tol, ratio))
    return rows


def verify_derivative_estimates(rho, alpha: HermForm, samples: int = 100,
                                seed: int = 0, maxdeg: int = 5,
                                tmax: int = 4, tol: float = 1e-9) -> Report:
    """Derivative and translation bounds for a fixed dominated functional."""
    if not functional_dominated(rho, alpha):
        raise InputError(
            "derivative bounds need a dominated functional: "
            "|rho(v)| <= ||v||_alpha fails")
    rep = Report("derivatives", _DERIV_INEQ)
    rho = [complex(v) for v in rho]
    for i in range(samples):
        rng = rng_for(seed, i)
        x = random_poly(rng, alpha.dim, maxdeg)
        for row, ok, ratio in _derivative_rows(x, rho, alpha, tmax, tol,
                                               str(i)):
            rep.record(row, ok=ok, ratio=ratio)
    return rep


def _derivatives_sample(args):
    seed, idx, d, maxdeg, tol = args
    rng = rng_for(seed, idx)
    a = rng.standard_normal((d, d))
    alpha = HermForm(a.T @ a / d + 0.1 * np.eye(d), check=False)
    rho = rng.standard_normal(d)
    fr = alpha.frame()
    s = float(np.linalg.norm(fr.change @ rho))
    rho = rho * (rng.uniform(0.05, 1.0) / s)
    x = random_poly(rng, d, maxdeg)
    tmax = int(rng.integers(1, 5))
    return _derivative_rows(x, [complex(v) for v in rho], alpha, tmax, tol,
                            str(idx))


def verify_derivatives_suite(samples: int = 200, d: int = 2, maxdeg: int = 5,
                             seed: int = 0, tol: float = 1e-9) -> Report:
    """Derivative and translation bounds over random dominated functionals
    (real alpha and rho)."""
    rep = Report("derivatives", _DERIV_INEQ)
    results = parallel_map(_derivatives_sample,
                           [(seed, i, d, maxdeg, tol) for i in range(samples)])
    for rows in results:
        for row, ok, ratio in rows:
            rep.record(row, ok=ok, ratio=ratio)
    return rep
