"""Named verification suites with a uniform call signature.

Each suite draws its own random admissible inputs from (seed, sample
index) pairs and returns a Report; CSV output is byte-identical for a
fixed seed regardless of STARPROD_THREADS.
"""

from __future__ import annotations

from .equivalence import verify_equivalence_suite, verify_laplace_suite
from .errors import InputError
from .gelfand import verify_derivatives_suite
from .report import Report
from .starprod import (verify_binomial_lemma, verify_perturbation_bound,
                       verify_plambda_bound, verify_product_chain_bound,
                       verify_star_norm_bound)


def _chain_suite(samples, d, maxdeg, seed, tol):
    k = max(1, min(maxdeg, 2))
    return verify_product_chain_bound(k=k, n=3, d=d, seed=seed,
                                      samples=samples, tol=tol)


def _binomis_suite(samples, d, maxdeg, seed, tol):
    # exhaustive in exact arithmetic; the sampling knobs do not apply
    return verify_binomial_lemma(kmax=8, nmax=8)


SUITES = {
    "plambda": lambda samples, d, maxdeg, seed, tol:
        verify_plambda_bound(samples, d, maxdeg, seed, tol),
    "chain": _chain_suite,
    "equivalence": lambda samples, d, maxdeg, seed, tol:
        verify_equivalence_suite(samples, d, maxdeg, seed, tol),
    "laplace": lambda samples, d, maxdeg, seed, tol:
        verify_laplace_suite(samples, d, maxdeg, seed, tol),
    "derivatives": lambda samples, d, maxdeg, seed, tol:
        verify_derivatives_suite(samples, d, maxdeg, seed, tol),
    "perturbation": lambda samples, d, maxdeg, seed, tol:
        verify_perturbation_bound(samples, d, maxdeg, seed, tol),
    "starbound": lambda samples, d, maxdeg, seed, tol:
        verify_star_norm_bound(samples, d, maxdeg, seed, tol),
    "binomis": _binomis_suite,
}


def run_suite(name: str, samples: int = 200, d: int = 2, maxdeg: int = 4,
              seed: int = 0, tol: float = 1e-9) -> Report:
    fn = SUITES.get(name)
    if fn is None:
        raise InputError(
            f"unknown suite {name!r}; available: {', '.join(sorted(SUITES))}")
    if samples < 1:
        raise InputError("samples must be >= 1")
    if d < 1:
        raise InputError("dim must be >= 1")
    if maxdeg < 1:
        raise InputError("maxdeg must be >= 1")
    if seed < 0:
        raise InputError("seed must be >= 0")
    if tol < 0:
        raise InputError("tol must be >= 0")
    return fn(samples, d, maxdeg, seed, tol)
