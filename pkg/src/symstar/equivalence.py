"""Second-order lowering operator and the induced equivalences of deformed
products.

For a bilinear form b the operator acts on monomials by

    L_b E_m = (1/2) sum_{i,j} b_ij m_i (m - delta_i)_j E_{m - delta_i - delta_j},

i.e. half the contraction of two derivative slots with b; elements of
degree 0 or 1 are annihilated.  Exponentiating it (a finite sum on
polynomials, since each application lowers degree by two) intertwines the
deformed products:

    e^{z L_b} (X *_L Y) = (e^{z L_b} X) *_{L + z b} (e^{z L_b} Y),

which is checked here numerically, together with the quantitative norm
bounds the powers of the operator satisfy.
"""

from __future__ import annotations

import math

import numpy as np

from . import serialize
from .errors import DimensionMismatch, InputError
from .forms import (BilForm, HermForm, hilbert_schmidt_check, seminorm)
from .polyalg import Poly, vee
from .report import Report, parallel_map
from .sampling import (random_bilform, random_poly, random_psd,
                       random_symmetric_bilform, rng_for, scale_into_hs)
from .starprod import star


def laplace(x: Poly, b: BilForm) -> Poly:
    """One application of the lowering operator for b."""
    if x.dim != b.dim:
        raise DimensionMismatch(
            f"element has dim {x.dim}, form has dim {b.dim}")
    mat = b.matrix
    nz = [(int(i), int(j), complex(mat[i, j]))
          for i, j in np.argwhere(mat != 0)]
    out: dict[tuple, complex] = {}
    for m, c in x.terms.items():
        for i, j, bij in nz:
            mi = m[i]
            if mi == 0:
                continue
            lower = m[:i] + (mi - 1,) + m[i + 1:]
            mj = lower[j]
            if mj == 0:
                continue
            key = lower[:j] + (mj - 1,) + lower[j + 1:]
            out[key] = out.get(key, 0j) + 0.5 * c * bij * mi * mj
    return Poly(x.dim, out)


def exp_laplace(x: Poly, b: BilForm, z: complex = 1.0) -> Poly:
    """e^{z L_b} x: finite sum, terminates once the degree drops below 2."""
    z = complex(z)
    total = x
    term = x
    t = 1
    while term.top_degree >= 2:
        term = laplace(term, b).scale(z / t)
        total = total + term
        t += 1
    return total


def equivalence_residual(x: Poly, y: Poly, lam: BilForm, b: BilForm,
                         z: complex = 1.0) -> float:
    """Relative identity-form residual of the intertwining identity."""
    lhs = exp_laplace(star(x, y, lam), b, z)
    rhs = star(exp_laplace(x, b, z), exp_laplace(y, b, z),
               lam + b.scaled(z))
    ident = HermForm.identity(x.dim)
    denom = max(1.0, seminorm(lhs, ident))
    return seminorm(lhs - rhs, ident) / denom


_EQUIV_INEQ = ("residual of  e^{zL_b}(X *_L Y) = (e^{zL_b}X) *_{L+zb} "
               "(e^{zL_b}Y)  <= tol (relative, identity form)")


def verify_equivalence(x: Poly, y: Poly, lam: BilForm, b: BilForm,
                       z: complex = 1.0, tol: float = 1e-9) -> Report:
    """Single-instance check of the intertwining identity."""
    rep = Report("equivalence", _EQUIV_INEQ)
    res = equivalence_residual(x, y, lam, b, z)
    ratio = res / tol if tol > 0 else (0.0 if res == 0.0 else math.inf)
    rep.record(("0", x.top_degree, y.top_degree, res, tol, ratio),
               ok=res <= tol, ratio=ratio)
    return rep


def _equivalence_sample(args):
    seed, idx, d, maxdeg, tol = args
    rng = rng_for(seed, idx)
    x = random_poly(rng, d, maxdeg)
    y = random_poly(rng, d, maxdeg)
    lam = random_bilform(rng, d)
    b = random_symmetric_bilform(rng, d)
    z = complex(rng.standard_normal(), rng.standard_normal()) * 0.7
    res = equivalence_residual(x, y, lam, b, z)
    ratio = res / tol if tol > 0 else (0.0 if res == 0.0 else math.inf)
    ok = res <= tol
    witness = None
    if not ok:
        witness = {"sample": idx,
                   "x": serialize.poly_to_json(x),
                   "y": serialize.poly_to_json(y),
                   "lam": serialize.matrix_to_json(lam.matrix),
                   "b": serialize.matrix_to_json(b.matrix),
                   "z": [z.real, z.imag]}
    return (str(idx), x.top_degree, y.top_degree, res, tol, ratio), \
        ok, ratio, witness


def verify_equivalence_suite(samples: int = 200, d: int = 2, maxdeg: int = 4,
                             seed: int = 0, tol: float = 1e-9) -> Report:
    """Intertwining identity on random data (relative residuals)."""
    rep = Report("equivalence", _EQUIV_INEQ)
    results = parallel_map(_equivalence_sample,
                           [(seed, i, d, maxdeg, tol) for i in range(samples)])
    for row, ok, ratio, witness in results:
        rep.record(row, ok=ok, ratio=ratio)
        if witness is not None and rep.witness is None:
            rep.witness = witness
    return rep


# -- norm bounds for powers of the lowering operator ----------------------

_LAPLACE_INEQ = ("||L_b^t X||_alpha <= sqrt((2t)!)/(2r)^t * ||X||_{2 r alpha}"
                 "  (needs the Hilbert-Schmidt bound for b w.r.t. alpha)")


def laplace_power(x: Poly, b: BilForm, t: int) -> Poly:
    out = x
    for _ in range(t):
        out = laplace(out, b)
    return out


def _laplace_bound_row(x: Poly, b: BilForm, alpha: HermForm, t: int,
                       r: float, tol: float):
    observed = seminorm(laplace_power(x, b, t), alpha)
    bound = (math.sqrt(math.factorial(2 * t)) / (2.0 * r) ** t
             * seminorm(x, alpha.scaled(2.0 * r)))
    if bound <= 0:
        ratio = 0.0 if observed <= 1e-12 else math.inf
    else:
        ratio = observed / bound
    return observed, bound, ratio, ratio <= 1.0 + tol


def verify_laplace_power_bound(b: BilForm, alpha: HermForm, t: int, r: float,
                               samples: int = 100, seed: int = 0,
                               maxdeg: int = 6, tol: float = 1e-9) -> Report:
    """Power bound for fixed (b, alpha, t, r) over random elements."""
    if r < 1.0:
        raise InputError(f"the power bound needs r >= 1, got {r}")
    if t < 0:
        raise InputError("power order must be >= 0")
    if not hilbert_schmidt_check(b, alpha):
        raise InputError(
            "the power bound needs the Hilbert-Schmidt precondition: "
            "the symmetric form must have frame Frobenius norm <= 1 "
            "relative to alpha")
    rep = Report("laplace", _LAPLACE_INEQ)
    for i in range(samples):
        rng = rng_for(seed, i)
        x = random_poly(rng, b.dim, maxdeg)
        observed, bound, ratio, ok = _laplace_bound_row(x, b, alpha, t, r, tol)
        rep.record((str(i), t, float(r), observed, bound, ratio),
                   ok=ok, ratio=ratio)
    return rep


def _laplace_sample(args):
    seed, idx, d, maxdeg, tol = args
    rng = rng_for(seed, idx)
    alpha = random_psd(rng, d, min_eig=0.1)
    b = scale_into_hs(random_symmetric_bilform(rng, d), alpha,
                      target=rng.uniform(0.2, 1.0))
    t = int(rng.integers(0, 4))
    r = float((1.0, 1.5, 2.0)[idx % 3])
    x = random_poly(rng, d, maxdeg)
    observed, bound, ratio, ok = _laplace_bound_row(x, b, alpha, t, r, tol)
    witness = None
    if not ok:
        witness = {"sample": idx, "t": t, "r": r,
                   "x": serialize.poly_to_json(x),
                   "b": serialize.matrix_to_json(b.matrix),
                   "alpha": serialize.matrix_to_json(alpha.matrix)}
    return (str(idx), t, r, observed, bound, ratio), ok, ratio, witness


def verify_laplace_suite(samples: int = 200, d: int = 2, maxdeg: int = 5,
                         seed: int = 0, tol: float = 1e-9) -> Report:
    """Power bound over random admissible (b, alpha, t, r)."""
    rep = Report("laplace", _LAPLACE_INEQ)
    results = parallel_map(_laplace_sample,
                           [(seed, i, d, maxdeg, tol) for i in range(samples)])
    for row, ok, ratio, witness in results:
        rep.record(row, ok=ok, ratio=ratio)
        if witness is not None and rep.witness is None:
            rep.witness = witness
    return rep


# -- sharp operator-norm witness ------------------------------------------


def hs_witness(b: BilForm, alpha: HermForm) -> Poly:
    """Degree-2 element on which the lowering operator attains its norm.

    In an alpha-orthonormal frame the element is
    sum_{p,q} conj(b(f_p, f_q)) f_p v f_q; its image under L_b is the
    squared frame Frobenius norm F^2 while its alpha-seminorm is
    sqrt(2) F, so sqrt(2) * |L_b X| / ||X||_alpha recovers F exactly.
    """
    if b.dim != alpha.dim:
        raise DimensionMismatch(
            f"form has dim {alpha.dim}, bilinear form has dim {b.dim}")
    fr = alpha.frame()
    if fr.rank == 0:
        return Poly.zero(alpha.dim)
    inner = fr.change @ b.matrix @ fr.change.T
    out = Poly.zero(alpha.dim)
    for p in range(fr.rank):
        fp = Poly.from_vector(fr.change[p])
        for q in range(fr.rank):
            fq = Poly.from_vector(fr.change[q])
            c = complex(np.conj(inner[p, q]))
            if c != 0:
                out = out + vee(fp, fq).scale(c)
    return out


def hs_witness_ratio(b: BilForm, alpha: HermForm) -> float:
    """sqrt(2) * |L_b X| / ||X||_alpha for the witness; equals the frame
    Frobenius norm of b (0 when b vanishes on the frame)."""
    x = hs_witness(b, alpha)
    nx = seminorm(x, alpha)
    if nx == 0.0:
        return 0.0
    val = abs(laplace(x, b).scalar_part())
    return math.sqrt(2.0) * val / nx
