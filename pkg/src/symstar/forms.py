"""Positive Hermitian forms, bilinear forms, and the seminorms they induce
on the symmetric algebra.

A positive semidefinite Hermitian form alpha on C^d induces on each degree
the k!-weighted inner product

    <x_1 (x) ... (x) x_k, y_1 (x) ... (x) y_k> = k! * prod_i <x_i, y_i>_alpha

(antilinear in the first slot), hence a seminorm on the polynomial model.
On monomials over an alpha-orthonormal frame this gives <E_m, E_n> =
delta_{mn} * m!.  Two independent evaluation routes are kept side by side:
the frame-substitution route (extended_inner_product) and a permanent-based
oracle on monomial pairs (inner_product_permanent_oracle); tests compare
them, so neither may be rewritten in terms of the other.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DimensionMismatch, InputError
from .polyalg import (Poly, RawTensor, index_factorial, substitute)

EIG_CUTOFF_REL = 1e-12


class BilForm:
    """Plain bilinear form on C^d: Lambda(v, w) = v^T L w (no conjugation)."""

    __slots__ = ("dim", "matrix")

    def __init__(self, matrix):
        mat = np.array(matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise InputError(f"bilinear form matrix must be square, got shape {mat.shape}")
        if mat.shape[0] < 1:
            raise InputError("bilinear form needs dimension >= 1")
        mat.flags.writeable = False
        object.__setattr__(self, "dim", int(mat.shape[0]))
        object.__setattr__(self, "matrix", mat)

    def __setattr__(self, *a):
        raise AttributeError("BilForm is immutable")

    def apply(self, v, w) -> complex:
        v = np.asarray(v, dtype=complex)
        w = np.asarray(w, dtype=complex)
        return complex(v @ self.matrix @ w)

    def star(self) -> "BilForm":
        """The form Lambda* with Lambda*(v, w) = conj(Lambda(conj(w), conj(v)));
        under the default (coefficientwise) conjugation its matrix is the
        conjugate transpose."""
        return BilForm(self.matrix.conj().T)

    def scaled(self, c) -> "BilForm":
        return BilForm(self.matrix * complex(c))

    def __add__(self, other: "BilForm") -> "BilForm":
        if self.dim != other.dim:
            raise DimensionMismatch(
                f"forms have dimensions {self.dim} and {other.dim}")
        return BilForm(self.matrix + other.matrix)

    def __sub__(self, other: "BilForm") -> "BilForm":
        if self.dim != other.dim:
            raise DimensionMismatch(
                f"forms have dimensions {self.dim} and {other.dim}")
        return BilForm(self.matrix - other.matrix)

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        scale = max(1.0, self.max_abs())
        return bool(np.max(np.abs(self.matrix - self.matrix.T)) <= tol * scale)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        scale = max(1.0, self.max_abs())
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T)) <= tol * scale)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.matrix))) if self.matrix.size else 0.0

    def __repr__(self):
        return f"BilForm(dim={self.dim})"


class OrthoFrame:
    """Orthonormal frame of the non-degenerate part of a PSD Hermitian form.

    rank        number r of frame vectors
    change      r x d matrix C whose rows are the frame-vector coordinates,
                f_p = sum_i change[p, i] e_i; satisfies conj(C) A C^T = id_r
                (the familiar C A C^+ = id_r when A is real)
    coord_map   r x d matrix S expressing alpha-coordinates, e_i ->
                sum_p S[p, i] f_p; substitution along S is isometric from
                the alpha-seminorm to the identity form on C^r, and kills
                exactly the kernel
    kernel      d x (d - r) matrix of null vectors (columns)
    eigenvalues kept eigenvalues, descending
    """

    __slots__ = ("rank", "change", "coord_map", "kernel", "eigenvalues")

    def __init__(self, rank, change, coord_map, kernel, eigenvalues):
        object.__setattr__(self, "rank", int(rank))
        object.__setattr__(self, "change", change)
        object.__setattr__(self, "coord_map", coord_map)
        object.__setattr__(self, "kernel", kernel)
        object.__setattr__(self, "eigenvalues", eigenvalues)

    def __setattr__(self, *a):
        raise AttributeError("OrthoFrame is immutable")

    def __repr__(self):
        d = self.change.shape[1] if self.change.size else self.kernel.shape[0]
        return f"OrthoFrame(rank={self.rank}, dim={d})"


class HermForm:
    """Positive semidefinite Hermitian form on C^d.

    The constructor validates Hermitian symmetry and positive
    semidefiniteness (up to relative tolerance 1e-12) and rejects bad input
    naming the offending eigenvalue.  The associated orthonormal frame is
    computed lazily and memoized; recomputation is idempotent, so no lock
    is needed.
    """

    __slots__ = ("dim", "matrix", "_frame")

    def __init__(self, matrix, *, check: bool = True):
        mat = np.array(matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise InputError(f"form matrix must be square, got shape {mat.shape}")
        if mat.shape[0] < 1:
            raise InputError("form needs dimension >= 1")
        if check:
            scale = max(1.0, float(np.max(np.abs(mat))) if mat.size else 0.0)
            asym = float(np.max(np.abs(mat - mat.conj().T)))
            if asym > 1e-12 * scale:
                raise InputError(
                    f"form matrix is not Hermitian (max asymmetry {asym:.3e})")
            mat = (mat + mat.conj().T) / 2.0
            w = np.linalg.eigvalsh(mat)
            wmax = float(np.max(np.abs(w)))
            if w[0] < -1e-12 * max(wmax, 1.0):
                raise InputError(
                    f"form is not positive semidefinite: eigenvalue {w[0]:.6e}")
        mat.flags.writeable = False
        object.__setattr__(self, "dim", int(mat.shape[0]))
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "_frame", None)

    def __setattr__(self, *a):
        raise AttributeError("HermForm is immutable")

    @classmethod
    def identity(cls, dim: int) -> "HermForm":
        return cls(np.eye(dim), check=False)

    def scaled(self, c) -> "HermForm":
        c = float(c)
        if c < 0:
            raise InputError(f"scaling a positive form by {c} < 0")
        return HermForm(self.matrix * c, check=False)

    def __rmul__(self, c):
        return self.scaled(c)

    def __add__(self, other: "HermForm") -> "HermForm":
        if self.dim != other.dim:
            raise DimensionMismatch(
                f"forms have dimensions {self.dim} and {other.dim}")
        return HermForm(self.matrix + other.matrix, check=False)

    def frame(self) -> OrthoFrame:
        if self._frame is None:
            object.__setattr__(self, "_frame", orthonormalize(self))
        return self._frame

    def basis_norm(self, i: int) -> float:
        """||e_i||_alpha = sqrt(alpha(e_i, e_i))."""
        return math.sqrt(max(self.matrix[i, i].real, 0.0))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.matrix))) if self.matrix.size else 0.0

    def __repr__(self):
        return f"HermForm(dim={self.dim})"


def lambda_of_form(alpha: HermForm) -> BilForm:
    """The bilinear form (v, w) -> <conj(v), w>_alpha.  With the default
    conjugation fixing the basis its matrix is just alpha's matrix."""
    return BilForm(np.array(alpha.matrix))


def orthonormalize(alpha: HermForm) -> OrthoFrame:
    """Eigen-orthonormalization of a PSD Hermitian form.

    Eigenvalues below 1e-12 times the largest are treated as kernel.
    Frame vectors are ordered by descending eigenvalue.
    """
    a = alpha.matrix
    w, vecs = np.linalg.eigh((a + a.conj().T) / 2.0)
    wmax = float(w[-1]) if w.size else 0.0
    cutoff = EIG_CUTOFF_REL * max(wmax, 0.0)
    keep = w > cutoff
    order = np.argsort(-w[keep])  # descending among the kept ones
    kept_w = w[keep][order]
    kept_v = vecs[:, keep][:, order]
    # rows of C are frame coordinates: f_p = sum_i C[p,i] e_i
    if kept_w.size:
        change = (kept_v / np.sqrt(kept_w)).T
        coord_map = np.sqrt(kept_w)[:, None] * kept_v.conj().T
    else:
        change = np.zeros((0, alpha.dim), dtype=complex)
        coord_map = np.zeros((0, alpha.dim), dtype=complex)
    kernel = vecs[:, ~keep]
    for arr in (change, coord_map, kernel):
        arr.flags.writeable = False
    return OrthoFrame(int(kept_w.size), change, coord_map, kernel,
                      tuple(float(v) for v in kept_w))


def frame_coefficients(x: Poly, alpha: HermForm) -> Poly:
    """x rewritten in the orthonormal frame of alpha (kernel part dropped).

    Substituting along the frame's coord_map is isometric for the
    alpha-seminorm, so inner products reduce to the weighted dot below.
    Rank-0 forms keep only the scalar part (as a 1-dim zero substitution).
    """
    if x.dim != alpha.dim:
        raise DimensionMismatch(
            f"element has dim {x.dim}, form has dim {alpha.dim}")
    fr = alpha.frame()
    if fr.rank == 0:
        return substitute(x, np.zeros((1, alpha.dim)))
    return substitute(x, fr.coord_map)


def weighted_dot(xf: Poly, yf: Poly) -> complex:
    """sum_m m! conj(a_m) b_m for two elements in orthonormal coordinates."""
    if xf.dim != yf.dim:
        raise DimensionMismatch(
            f"operands have dimensions {xf.dim} and {yf.dim}")
    small, big = (xf.terms, yf.terms) if len(xf.terms) <= len(yf.terms) \
        else (yf.terms, xf.terms)
    total = 0j
    for m, c in small.items():
        other = big.get(m)
        if other is not None:
            total += index_factorial(m) * (
                c.conjugate() * other if small is xf.terms
                else other.conjugate() * c)
    return total


def extended_inner_product(x: Poly, y: Poly, alpha: HermForm) -> complex:
    """k!-weighted inner product <x, y>_alpha (antilinear in x), computed
    by rewriting both arguments in an alpha-orthonormal frame."""
    return weighted_dot(frame_coefficients(x, alpha), frame_coefficients(y, alpha))


def seminorm(x: Poly, alpha: HermForm) -> float:
    """||x||_alpha = sqrt(<x, x>_alpha) (clamped at 0 against rounding)."""
    return math.sqrt(max(extended_inner_product(x, x, alpha).real, 0.0))


# -- permanent-based oracle (independent route, small degrees) ----------

_RYSER_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}

PERMANENT_MAX = 8


def _ryser_tables(k: int):
    got = _RYSER_CACHE.get(k)
    if got is None:
        n = 1 << k
        masks = np.zeros((n - 1, k))
        sizes = np.zeros(n - 1)
        for s in range(1, n):
            row = [(s >> j) & 1 for j in range(k)]
            masks[s - 1] = row
            sizes[s - 1] = sum(row)
        signs = np.where((k - sizes) % 2 == 0, 1.0, -1.0)
        got = (masks, signs)
        _RYSER_CACHE[k] = got
    return got


def permanent(g: np.ndarray) -> complex:
    """Permanent of a k x k matrix by Ryser's inclusion-exclusion formula.

    Exact up to floating point for the small k used here; rejects k beyond
    PERMANENT_MAX to keep the oracle honest about its cost.
    """
    g = np.asarray(g, dtype=complex)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise InputError(f"permanent needs a square matrix, got {g.shape}")
    k = g.shape[0]
    if k == 0:
        return 1.0 + 0j
    if k > PERMANENT_MAX:
        raise InputError(
            f"permanent oracle limited to k <= {PERMANENT_MAX}, got {k}")
    masks, signs = _ryser_tables(k)
    rowsums = masks @ g.T  # (subsets, k); entry = sum over chosen columns
    return complex(np.sum(signs * np.prod(rowsums, axis=1)))


def _index_expansion(m) -> list[int]:
    out = []
    for i, v in enumerate(m):
        out.extend([i] * v)
    return out


def inner_product_permanent_oracle(m, n, alpha: HermForm) -> complex:
    """<E_m, E_n>_alpha evaluated as a matrix permanent.

    Monomials of different degree are orthogonal (returns 0).  Kept free of
    any frame machinery so it can cross-check the substitution route.
    """
    m = tuple(int(v) for v in m)
    n = tuple(int(v) for v in n)
    if len(m) != alpha.dim or len(n) != alpha.dim:
        raise DimensionMismatch(
            f"multi-index lengths {len(m)}, {len(n)} do not match dim {alpha.dim}")
    if sum(m) != sum(n):
        return 0j
    rows = _index_expansion(m)
    cols = _index_expansion(n)
    if len(rows) > PERMANENT_MAX:
        raise InputError(
            f"permanent oracle limited to degree <= {PERMANENT_MAX}, got {len(rows)}")
    if not rows:
        return 1.0 + 0j
    g = alpha.matrix[np.ix_(rows, cols)]
    return permanent(g)


def raw_inner_product(s: RawTensor, t: RawTensor, alpha: HermForm) -> complex:
    """k!-weighted inner product of raw tensors (no symmetrization):

        <x_1 (x) .. (x) x_k, y_1 (x) .. (x) y_k> = k! prod_i <x_i, y_i>_alpha

    extended sesquilinearly to sums; summands of different degree are
    orthogonal.  Used as an oracle for tensor-product norm identities.
    """
    if s.dim != alpha.dim or t.dim != alpha.dim:
        raise DimensionMismatch("raw tensor dimension does not match the form")
    a = alpha.matrix
    total = 0j
    for c1, fs in s.summands:
        for c2, gs in t.summands:
            if len(fs) != len(gs):
                continue
            v = c1.conjugate() * c2 * math.factorial(len(fs))
            for x, y in zip(fs, gs):
                v *= complex(np.conj(x) @ a @ y)
            total += v
    return total


def projective_seminorm_upper(x: Poly, alpha: HermForm) -> float:
    """Upper bound for the projective (pi) seminorm:

        |x_0| + sum_k sqrt(k!) sum_{|m| = k} |c_m| prod_j ||e_j||_alpha^{m_j}.

    Each monomial is estimated through its factorization into basis
    vectors; the true projective seminorm is an infimum over all
    decompositions, so only an upper bound is produced here.
    """
    if x.dim != alpha.dim:
        raise DimensionMismatch(
            f"element has dim {x.dim}, form has dim {alpha.dim}")
    norms = [alpha.basis_norm(i) for i in range(alpha.dim)]
    total = 0.0
    for m, c in x.terms.items():
        k = sum(m)
        v = abs(c) * math.sqrt(math.factorial(k))
        for nj, mj in zip(norms, m):
            if mj:
                v *= nj ** mj
        total += v
    return total


# -- admissibility checks ------------------------------------------------


def in_PVLambda(gamma: HermForm, lam: BilForm, *, slack: float = 1e-10) -> bool:
    """Whether the bilinear form is dominated by the positive form, i.e.

        |Lambda(v, w)| <= ||v||_gamma * ||w||_gamma   for all v, w.

    Equivalent finite-dimensional criterion: Lambda must vanish on the
    kernel of gamma (both slots) and the frame matrix C L C^T must have
    largest singular value <= 1.  A small relative slack absorbs rounding.
    """
    if gamma.dim != lam.dim:
        raise DimensionMismatch(
            f"form has dim {gamma.dim}, bilinear form has dim {lam.dim}")
    fr = gamma.frame()
    l = lam.matrix
    ltol = 1e-12 * max(1.0, lam.max_abs())
    if fr.kernel.size:
        if float(np.max(np.abs(l @ fr.kernel))) > ltol:
            return False
        if float(np.max(np.abs(fr.kernel.T @ l))) > ltol:
            return False
    if fr.rank == 0:
        return True
    omega = fr.change @ l @ fr.change.T
    smax = float(np.linalg.svd(omega, compute_uv=False)[0])
    return smax <= 1.0 + slack


def hilbert_schmidt_check(b: BilForm, alpha: HermForm, *, slack: float = 1e-10) -> bool:
    """Whether a symmetric bilinear form has Hilbert-Schmidt norm <= 1
    relative to alpha: it must vanish on alpha's kernel and the frame
    matrix C B C^T must have Frobenius norm <= 1.

    Non-symmetric b is rejected outright.
    """
    if b.dim != alpha.dim:
        raise DimensionMismatch(
            f"form has dim {alpha.dim}, bilinear form has dim {b.dim}")
    if not b.is_symmetric():
        raise InputError("Hilbert-Schmidt check requires a symmetric bilinear form")
    fr = alpha.frame()
    mat = b.matrix
    btol = 1e-12 * max(1.0, b.max_abs())
    if fr.kernel.size and float(np.max(np.abs(mat @ fr.kernel))) > btol:
        return False
    if fr.rank == 0:
        return True
    inner = fr.change @ mat @ fr.change.T
    return float(np.linalg.norm(inner)) <= 1.0 + slack


def hs_frame_norm(b: BilForm, alpha: HermForm) -> float:
    """Frobenius norm of the symmetric form in an alpha-orthonormal frame
    (infinite when the form does not vanish on the kernel)."""
    if b.dim != alpha.dim:
        raise DimensionMismatch(
            f"form has dim {alpha.dim}, bilinear form has dim {b.dim}")
    if not b.is_symmetric():
        raise InputError("Hilbert-Schmidt norm requires a symmetric bilinear form")
    fr = alpha.frame()
    btol = 1e-12 * max(1.0, b.max_abs())
    if fr.kernel.size and float(np.max(np.abs(b.matrix @ fr.kernel))) > btol:
        return math.inf
    if fr.rank == 0:
        return 0.0
    return float(np.linalg.norm(fr.change @ b.matrix @ fr.change.T))
