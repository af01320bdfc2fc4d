"""Gaussian-type states on the deformed algebra and their GNS data.

A state is described by a real base point rho, a real symmetric bilinear
form b and a real scale z; it acts as evaluation at rho after applying the
exponential of the lowering operator:

    omega(X) = evaluate(e^{z L_b} X, rho).

Positivity of omega for a given driving form L is a property of the Gram
matrix omega(E_m* * E_n) over monomials, which is also the raw material of
the GNS construction: orthonormalizing its non-null eigenspaces gives a
finite-dimensional compression of the left-multiplication representation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import serialize
from .equivalence import exp_laplace
from .errors import DimensionMismatch, InputError, PositivityError
from .forms import BilForm, HermForm, extended_inner_product, seminorm
from .polyalg import (Poly, component_of_degree, evaluate, involution,
                      truncate_degree, vee, vee_power)
from .report import Report
from .starprod import star


@dataclass(frozen=True)
class StateDesc:
    """Description of a Gaussian-type state: base point, symmetric form,
    scale.  The form must be real symmetric and the base point real, else
    the functional would not be Hermitian (omega(X*) = conj(omega(X)))."""

    rho: tuple
    b: BilForm
    z: float

    def __post_init__(self):
        rho = tuple(float(v) for v in self.rho)
        object.__setattr__(self, "rho", rho)
        if len(rho) != self.b.dim:
            raise DimensionMismatch(
                f"base point has length {len(rho)}, form has dim {self.b.dim}")
        if not self.b.is_symmetric():
            raise InputError("state form must be symmetric")
        if float(np.max(np.abs(self.b.matrix.imag))) > 1e-12 * max(
                1.0, self.b.max_abs()):
            raise InputError("state form must be real")
        object.__setattr__(self, "z", float(self.z))

    @property
    def dim(self) -> int:
        return self.b.dim

    @classmethod
    def vacuum(cls, dim: int) -> "StateDesc":
        return cls((0.0,) * dim, BilForm(np.zeros((dim, dim))), 0.0)

    def to_json(self) -> dict:
        return {"rho": [float(v) for v in self.rho],
                "b": serialize.matrix_to_json(self.b.matrix),
                "z": float(self.z)}

    @classmethod
    def from_json(cls, obj) -> "StateDesc":
        if not isinstance(obj, dict) or "rho" not in obj or "b" not in obj:
            raise InputError("state object needs 'rho' and 'b' fields")
        rho = obj["rho"]
        if not isinstance(rho, list):
            raise InputError("state 'rho' must be a list of numbers")
        try:
            rho = tuple(float(v) for v in rho)
        except (TypeError, ValueError):
            raise InputError("state 'rho' must be a list of numbers")
        b = BilForm(serialize.matrix_from_json(obj["b"]))
        try:
            z = float(obj.get("z", 1.0))
        except (TypeError, ValueError):
            raise InputError("state 'z' must be a number")
        return cls(rho, b, z)


def apply_state(s: StateDesc, x: Poly) -> complex:
    """omega(x) for the described state."""
    if x.dim != s.dim:
        raise DimensionMismatch(
            f"element has dim {x.dim}, state has dim {s.dim}")
    return evaluate(exp_laplace(x, s.b, s.z), list(s.rho))


def monomials_up_to(dim: int, maxdeg: int) -> list[tuple]:
    """All multi-indices of degree <= maxdeg in (degree, lex) order."""
    out = [()]
    for _ in range(dim):
        out = [m + (v,) for m in out for v in range(maxdeg + 1)]
    out = [m for m in out if sum(m) <= maxdeg]
    out.sort(key=lambda m: (sum(m), m))
    return out


def gram_matrix(s: StateDesc, lam: BilForm, cutoff: int) -> np.ndarray:
    """Matrix omega(E_m* * E_n) over all monomials of degree <= cutoff."""
    if s.dim != lam.dim:
        raise DimensionMismatch(
            f"state has dim {s.dim}, form has dim {lam.dim}")
    if cutoff < 0:
        raise InputError("cutoff must be >= 0")
    monos = monomials_up_to(s.dim, cutoff)
    polys = [Poly(s.dim, {m: 1.0}) for m in monos]
    n = len(monos)
    g = np.zeros((n, n), dtype=complex)
    for a in range(n):
        # monomials are conjugation-fixed, so E_m* = E_m
        for b in range(n):
            g[a, b] = apply_state(s, star(polys[a], polys[b], lam))
    return g


def positivity_check(s: StateDesc, lam: BilForm,
                     cutoff: int) -> tuple[bool, float]:
    """Whether the Gram matrix up to the cutoff is PSD; returns the
    minimal eigenvalue as evidence (tolerance -1e-9 times the norm)."""
    g = gram_matrix(s, lam, cutoff)
    w = np.linalg.eigvalsh((g + g.conj().T) / 2.0)
    min_eig = float(w[0])
    gnorm = float(np.max(np.abs(w)))
    return min_eig >= -1e-9 * gnorm, min_eig


@dataclass(frozen=True)
class GnsRep:
    """Finite GNS compression of a positive state.

    basis has one column per Hilbert-space basis vector, expressed over
    the monomials; support_degrees[a] is the largest monomial degree the
    a-th column touches (used to pick which vectors an operator block can
    act on without leaving the cutoff space).
    """

    state: StateDesc
    lam: BilForm
    cutoff: int
    monomials: tuple
    gram: np.ndarray
    basis: np.ndarray
    support_degrees: tuple
    eigenvalues: tuple

    @property
    def dim(self) -> int:
        return self.lam.dim

    @property
    def hilbert_dim(self) -> int:
        return int(self.basis.shape[1])

    def basis_poly(self, a: int) -> Poly:
        col = self.basis[:, a]
        return Poly(self.dim, {m: c for m, c in zip(self.monomials, col)
                               if c != 0})

    def to_json(self) -> dict:
        def rect(mat):
            out = {"re": [[float(v) for v in row] for row in mat.real]}
            if np.any(mat.imag != 0):
                out["im"] = [[float(v) for v in row] for row in mat.imag]
            return out

        return {"dim": self.dim,
                "cutoff": self.cutoff,
                "hilbert_dim": self.hilbert_dim,
                "state": self.state.to_json(),
                "lambda": serialize.matrix_to_json(self.lam.matrix),
                "monomials": [list(m) for m in self.monomials],
                "gram": rect(self.gram),
                "basis": rect(self.basis),
                "support_degrees": [int(v) for v in self.support_degrees],
                "eigenvalues": [float(v) for v in self.eigenvalues]}


def gns_build(s: StateDesc, lam: BilForm, cutoff: int,
              rel_cutoff: float = 1e-10) -> GnsRep:
    """GNS data for a positive state: eigen-orthonormalized quotient basis
    of the monomial space up to the cutoff.

    Eigenvalues below rel_cutoff times the largest count as null
    directions (note this is relative to the largest eigenvalue, which
    grows fast with the cutoff).  Raises PositivityError if the Gram
    matrix has a genuinely negative eigenvalue.
    """
    g = gram_matrix(s, lam, cutoff)
    h = (g + g.conj().T) / 2.0
    w, v = np.linalg.eigh(h)
    gnorm = float(np.max(np.abs(w))) if w.size else 0.0
    if w.size and float(w[0]) < -1e-9 * gnorm:
        raise PositivityError(
            f"state is not positive for this product: Gram matrix has "
            f"eigenvalue {float(w[0]):.6e}", min_eigenvalue=float(w[0]))
    keep = w > rel_cutoff * max(gnorm, 0.0)
    order = np.argsort(-w[keep])
    kept_w = w[keep][order]
    kept_v = v[:, keep][:, order]
    if kept_w.size:
        basis = kept_v / np.sqrt(kept_w)
    else:
        basis = np.zeros((g.shape[0], 0), dtype=complex)
    monos = monomials_up_to(s.dim, cutoff)
    support = []
    for a in range(basis.shape[1]):
        col = np.abs(basis[:, a])
        thresh = 1e-12 * float(col.max()) if col.size else 0.0
        degs = [sum(m) for m, v_ in zip(monos, col) if v_ > thresh]
        support.append(max(degs) if degs else 0)
    for arr in (g, basis):
        arr.flags.writeable = False
    return GnsRep(s, lam, int(cutoff), tuple(monos), g, basis,
                  tuple(support), tuple(float(x) for x in kept_w))


def gns_vector(rep: GnsRep, x: Poly) -> np.ndarray:
    """Coordinates of the class [x] in the GNS basis (x must fit under
    the cutoff)."""
    if x.dim != rep.dim:
        raise DimensionMismatch(
            f"element has dim {x.dim}, representation has dim {rep.dim}")
    if x.top_degree > rep.cutoff:
        raise InputError(
            f"element of degree {x.top_degree} exceeds the cutoff {rep.cutoff}")
    polys = [Poly(rep.dim, {m: 1.0}) for m in rep.monomials]
    vals = np.array([apply_state(rep.state, star(p, x, rep.lam))
                     for p in polys])
    return rep.basis.conj().T @ vals


def gns_matrix(rep: GnsRep, x: Poly) -> np.ndarray:
    """Compression of left multiplication by x to the block of basis
    vectors whose support degree fits under cutoff - deg(x).

    On that block the matrix is exact: images stay inside the cutoff
    space, so entries are plain state evaluations with no truncation
    error.  Raises InputError when the block is empty.
    """
    if x.dim != rep.dim:
        raise DimensionMismatch(
            f"element has dim {x.dim}, representation has dim {rep.dim}")
    degx = max(x.top_degree, 0)
    limit = rep.cutoff - degx
    block = [a for a in range(rep.hilbert_dim)
             if rep.support_degrees[a] <= limit]
    if not block:
        raise InputError(
            f"element of degree {degx} exceeds the cutoff block: no basis "
            f"vector is supported in degrees <= {limit}")
    polys = [Poly(rep.dim, {m: 1.0}) for m in rep.monomials]
    mat = np.zeros((len(block), len(block)), dtype=complex)
    for jb, b in enumerate(block):
        y = star(x, rep.basis_poly(b), rep.lam)
        vals = np.array([apply_state(rep.state, star(p, y, rep.lam))
                         for p in polys])
        col = rep.basis[:, block].conj().T @ vals
        mat[:, jb] = col
    return mat


def gns_block_indices(rep: GnsRep, deg: int) -> list[int]:
    """Basis indices whose support degree fits under cutoff - deg."""
    limit = rep.cutoff - max(deg, 0)
    return [a for a in range(rep.hilbert_dim)
            if rep.support_degrees[a] <= limit]


# -- exponential vectors ---------------------------------------------------


def exp_vee(v, cutoff: int) -> Poly:
    """Truncated plain exponential sum_{k <= cutoff} v^{v k} / k!."""
    xv = Poly.from_vector(v)
    out = Poly.unit(xv.dim)
    term = Poly.unit(xv.dim)
    for k in range(1, cutoff + 1):
        term = vee(term, xv).scale(1.0 / k)
        out = out + term
    return out


def star_exponential_vector(v, lam: BilForm, cutoff: int,
                            nmax: int | None = None) -> tuple[Poly, float]:
    """Exponential series of a vector in the deformed product, truncated
    to degree <= cutoff, together with the relative distance to the
    closed form e^{Lambda(v, v)/2} * exp_vee(v).

    The series sum_{n} v^{* n} / n! converges coefficientwise; terms with
    n well beyond the cutoff still feed the low degrees through
    contractions, so the sum runs until those contributions die out.
    """
    v = np.asarray(list(v), dtype=complex)
    if v.shape != (lam.dim,):
        raise DimensionMismatch(
            f"vector has length {v.shape[0]}, form has dim {lam.dim}")
    if cutoff < 0:
        raise InputError("cutoff must be >= 0")
    if nmax is None:
        nmax = cutoff + 40
    xv = Poly.from_vector(v)
    ident = HermForm.identity(lam.dim)
    acc = Poly.unit(lam.dim)
    power = Poly.unit(lam.dim)
    fact = 1.0
    quiet = 0
    for n in range(1, nmax + 1):
        power = star(power, xv, lam)
        fact *= n
        term = truncate_degree(power, cutoff).scale(1.0 / fact)
        acc = acc + term
        scale = max(1.0, seminorm(truncate_degree(acc, cutoff), ident))
        if seminorm(term, ident) < 1e-17 * scale:
            quiet += 1
            if quiet >= 2 and n > cutoff:
                break
        else:
            quiet = 0
    result = truncate_degree(acc, cutoff)
    closed = exp_vee(v, cutoff).scale(cmath.exp(0.5 * lam.apply(v, v)))
    denom = max(1.0, seminorm(closed, ident))
    residual = seminorm(result - closed, ident) / denom
    return result, float(residual)


def exp_product_residual(v, w, lam: BilForm, cutoff: int,
                         margin: int = 16) -> float:
    """Relative residual, up to the cutoff degree, of the product law

        exp(v) * exp(w) = e^{Lambda(v, w)} exp(v + w)

    computed from exponential sums truncated margin degrees higher.

    The left side is assembled term pair by term pair with exact
    summation per coefficient: starring the two full truncated
    exponentials in one call loses ~6 digits to cancellation when v and
    w nearly oppose, and the k!-weighted seminorm amplifies whatever is
    left in the top degrees.
    """
    v = np.asarray(list(v), dtype=complex)
    w = np.asarray(list(w), dtype=complex)
    big = cutoff + margin
    xv = Poly.from_vector(v)
    xw = Poly.from_vector(w)
    buckets: dict = {}
    for p in range(big + 1):
        left = vee_power(xv, p).scale(1.0 / math.factorial(p))
        for q in range(big + 1):
            prod = star(left, vee_power(xw, q), lam)
            fq = math.factorial(q)
            for m, c in prod.terms.items():
                if sum(m) <= cutoff:
                    buckets.setdefault(m, []).append(c / fq)
    lhs = Poly(lam.dim, {m: complex(math.fsum(z.real for z in cs),
                                    math.fsum(z.imag for z in cs))
                         for m, cs in buckets.items()})
    rhs = exp_vee(v + w, cutoff).scale(cmath.exp(lam.apply(v, w)))
    rhs = truncate_degree(rhs, cutoff)
    ident = HermForm.identity(lam.dim)
    denom = max(1.0, seminorm(rhs, ident))
    return float(seminorm(lhs - rhs, ident) / denom)


# -- growth diagnostics ----------------------------------------------------

_DIVERGENCE_INEQ = ("<X^{v n}, X^{v n}>_omega >= (n!)^2 for a homogeneous "
                    "degree-2 element (ratio column = value / (n!)^2)")


def quadratic_divergence_witness(x: Poly, omega_form: HermForm,
                                 nmax: int = 10,
                                 tol: float = 1e-9) -> Report:
    """Growth table for powers of a degree-2 element: the squared
    seminorms of x^{v n} grow at least like (n!)^2, which is what rules
    out exponential series of quadratic elements."""
    if x.is_zero or x.top_degree != 2 or component_of_degree(x, 2) != x:
        raise InputError(
            "divergence witness needs a nonzero homogeneous degree-2 element")
    rep = Report("divergence", _DIVERGENCE_INEQ, columns=("n", "value", "ratio"))
    for n in range(nmax + 1):
        xn = vee_power(x, n)
        val = extended_inner_product(xn, xn, omega_form).real
        ratio = val / math.factorial(n) ** 2
        rep.record((str(n), float(val), float(ratio)),
                   ok=ratio >= 1.0 - tol, ratio=ratio)
    return rep


_SERIES_INEQ = ("term_n = eps^n ||pi(X)^n Y|| / n!; ratios term_n / "
                "term_{n-1} must fall to <= 2^(-1/2) (plus slack) past a "
                "finite threshold")


def analytic_vector_series(rep: GnsRep, x: Poly, y: Poly | None = None,
                           eps: float | None = None, nmax: int = 10,
                           slack: float = 0.05,
                           alpha: HermForm | None = None) -> Report:
    """Decay table of the exponential series of pi(x) applied to the
    vector of y.

    Only elements of degree <= 2 are admitted: for higher degree the
    squared norms of powers grow so fast (the quadratic-divergence growth
    is already the borderline) that no eps > 0 makes the series summable.
    The default eps is 1 / (8 e^6 ||x||^2) with the seminorm of alpha
    (identity form when omitted).  The report fails when the last ratio
    still exceeds the decay target; the witness records eps and the decay
    threshold.
    """
    if x.dim != rep.dim:
        raise DimensionMismatch(
            f"element has dim {x.dim}, representation has dim {rep.dim}")
    if x.top_degree > 2:
        raise InputError(
            f"degree {x.top_degree} element rejected: beyond degree 2 the "
            "squared norms of powers outgrow (n!)^2 (quadratic divergence), "
            "so the exponential series has no positive radius")
    d = rep.dim
    if y is None:
        y = Poly.unit(d)
    ystar = involution(y)
    if alpha is None:
        alpha = HermForm.identity(d)
    nx = seminorm(x, alpha)
    if eps is None:
        eps = 1.0 if nx == 0.0 else 1.0 / (8.0 * math.e ** 6 * nx * nx)
    eps = float(eps)
    if eps <= 0:
        raise InputError(f"eps must be positive, got {eps}")
    q = (1.0 + slack) / math.sqrt(2.0)

    report = Report("series", _SERIES_INEQ, columns=("n", "term", "ratio"))
    report.witness = {"eps": eps}
    terms = []
    power = Poly.unit(d)
    for n in range(nmax + 1):
        if n > 0:
            power = star(power, x, rep.lam)
        sq = star(star(ystar, star(involution(power), power, rep.lam),
                       rep.lam), y, rep.lam)
        val = max(apply_state(rep.state, sq).real, 0.0)
        term = (eps ** n) * math.sqrt(val) / math.factorial(n)
        terms.append(term)
    report.record(("0", float(terms[0]), 0.0), ok=True)
    threshold = 0
    for n in range(1, nmax + 1):
        prev = terms[n - 1]
        if prev > 0:
            ratio = terms[n] / prev
        else:
            ratio = 0.0 if terms[n] == 0 else math.inf
        if ratio > q:
            threshold = n
        ok = not (n == nmax and ratio > q)
        report.record((str(n), float(terms[n]), float(ratio)),
                      ok=ok, ratio=ratio)
    report.witness["threshold"] = threshold
    return report
