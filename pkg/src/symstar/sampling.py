"""Deterministic random generation of test inputs.

Every sample index gets its own generator seeded by (seed, index), so
suites can be mapped over workers in any order and still produce
byte-identical reports.
"""

from __future__ import annotations

import numpy as np

from .forms import BilForm, HermForm, hs_frame_norm, in_PVLambda
from .polyalg import Poly

# geometric decay parameter for term degrees: P(deg = k) ~ (1-p)^k
DEGREE_DECAY = 0.45


def rng_for(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(index)])


def _random_coeff(rng, complex_coeffs=True) -> complex:
    if complex_coeffs:
        return complex(rng.standard_normal(), rng.standard_normal())
    return complex(rng.standard_normal())


def random_exponent(rng, dim: int, maxdeg: int) -> tuple:
    """Multi-index with geometric degree decay, clipped at maxdeg."""
    k = min(int(rng.geometric(DEGREE_DECAY)) - 1, maxdeg)
    counts = rng.multinomial(k, [1.0 / dim] * dim)
    return tuple(int(v) for v in counts)

def random_poly(rng, dim: int, maxdeg: int, nterms: int | None = None,
                complex_coeffs: bool = True) -> Poly:
    if nterms is None:
        nterms = int(rng.integers(1, 5))
    terms = {}
    for _ in range(nterms):
        m = random_exponent(rng, dim, maxdeg)
        terms[m] = terms.get(m, 0j) + _random_coeff(rng, complex_coeffs)
    return Poly(dim, terms)


def random_homogeneous(rng, dim: int, degree: int,
                       nterms: int | None = None,
                       complex_coeffs: bool = True) -> Poly:
    """Nonzero homogeneous element of the given degree."""
    if nterms is None:
        nterms = int(rng.integers(1, 4))
    while True:
        terms = {}
        for _ in range(nterms):
            counts = rng.multinomial(degree, [1.0 / dim] * dim)
            m = tuple(int(v) for v in counts)
            terms[m] = terms.get(m, 0j) + _random_coeff(rng, complex_coeffs)
        p = Poly(dim, terms)
        if not p.is_zero:
            return p


def random_psd(rng, dim: int, *, complex_entries: bool = True,
               min_eig: float = 0.0) -> HermForm:
    b = rng.standard_normal((dim, dim))
    if complex_entries:
        b = b + 1j * rng.standard_normal((dim, dim))
    a = b.conj().T @ b / dim
    if min_eig > 0:
        a = a + min_eig * np.eye(dim)
    return HermForm(a, check=False)


def random_degenerate_psd(rng, dim: int, rank: int) -> HermForm:
    b = rng.standard_normal((rank, dim)) + 1j * rng.standard_normal((rank, dim))
    return HermForm(b.conj().T @ b / max(rank, 1), check=False)


def random_bilform(rng, dim: int, *, complex_entries: bool = True) -> BilForm:
    m = rng.standard_normal((dim, dim))
    if complex_entries:
        m = m + 1j * rng.standard_normal((dim, dim))
    return BilForm(m)


def random_symmetric_bilform(rng, dim: int, *, complex_entries: bool = True) -> BilForm:
    m = random_bilform(rng, dim, complex_entries=complex_entries).matrix
    return BilForm((m + m.T) / 2.0)


def scale_into_membership(lam: BilForm, *gammas: HermForm,
                          margin: float = 1.0) -> BilForm:
    """Rescale the bilinear form so its largest frame singular value
    w.r.t. every given positive form is (just under) margin.  With the
    default margin the result is dominated by each form; margins > 1
    deliberately leave it outside (used to exercise the perturbation
    estimate at rho < 1)."""
    smax = 0.0
    for g in gammas:
        fr = g.frame()
        omega = fr.change @ lam.matrix @ fr.change.T
        if omega.size:
            smax = max(smax, float(np.linalg.svd(omega, compute_uv=False)[0]))
    if smax <= 0:
        return lam
    scaled = lam.scaled(margin / (smax * (1.0 + 1e-9)))
    if margin <= 1.0:
        for g in gammas:
            assert in_PVLambda(g, scaled)
    return scaled


def scale_into_hs(b: BilForm, alpha: HermForm, target: float = 1.0) -> BilForm:
    """Rescale a symmetric form so its frame Frobenius norm is <= target."""
    f = hs_frame_norm(b, alpha)
    if f == 0.0 or not np.isfinite(f):
        return b
    return b.scaled(target / (f * (1.0 + 1e-9)))
