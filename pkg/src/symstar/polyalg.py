"""Sparse polynomial model of the symmetric tensor algebra over C^d.

Elements are finite complex linear combinations of monomials E_m indexed by
multi-indices m = (m_1, ..., m_d).  E_m stands for the symmetrized product
of m_1 copies of e_1, m_2 copies of e_2, etc., normalized so that the
symmetric product simply adds exponents:

    E_m v E_n = E_{m+n},      deg E_m = |m| = m_1 + ... + m_d.

With this normalization v^{v k} (k-fold symmetric power of a vector) equals
the plain k-fold tensor power, and the k!-weighted inner product of basis
monomials of equal degree against an orthonormal basis comes out as
<E_m, E_m> = m_1! * ... * m_d!  (see the forms module).

Coefficients are complex doubles.  After every operation, terms whose
magnitude falls below 1e-14 times the largest coefficient magnitude are
dropped, so exact cancellations stay exact and noise does not accumulate.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DimensionMismatch, InputError

PRUNE_REL = 1e-14


def _validate_index(m, dim) -> tuple[int, ...]:
    m = tuple(int(v) for v in m)
    if len(m) != dim:
        raise DimensionMismatch(
            f"multi-index {m} has length {len(m)}, expected {dim}")
    if any(v < 0 for v in m):
        raise InputError(f"multi-index {m} has a negative entry")
    return m


def index_degree(m) -> int:
    return sum(m)


def index_factorial(m) -> int:
    """m! = m_1! * ... * m_d! for a multi-index m."""
    out = 1
    for v in m:
        out *= math.factorial(v)
    return out


def _sort_key(m):
    # graded ordering: degree first, then lexicographic
    return (sum(m), m)


class Poly:
    """Immutable sparse element of the symmetric algebra over C^dim.

    terms maps multi-index tuples to nonzero complex coefficients and is
    kept sorted by (degree, lex).  Treat instances as read-only; every
    operation returns a fresh Poly.
    """

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Mapping | None = None):
        dim = int(dim)
        if dim < 1:
            raise InputError(f"dimension must be >= 1, got {dim}")
        object.__setattr__(self, "dim", dim)
        clean: dict[tuple[int, ...], complex] = {}
        if terms:
            for m, c in terms.items():
                m = _validate_index(m, dim)
                c = complex(c)
                if m in clean:
                    raise InputError(f"duplicate exponent {m}")
                if c != 0:
                    clean[m] = c
        if clean:
            top = max(abs(c) for c in clean.values())
            cut = PRUNE_REL * top
            clean = {m: c for m, c in clean.items() if abs(c) >= cut}
        object.__setattr__(
            self, "terms",
            {m: clean[m] for m in sorted(clean, key=_sort_key)})

    def __setattr__(self, *a):
        raise AttributeError("Poly is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, dim: int) -> "Poly":
        return cls(dim, {})

    @classmethod
    def unit(cls, dim: int) -> "Poly":
        """The empty product E_0 (the scalar 1)."""
        return cls(dim, {(0,) * dim: 1.0})

    @classmethod
    def monomial(cls, m: Sequence[int], coeff=1.0, dim: int | None = None) -> "Poly":
        m = tuple(int(v) for v in m)
        return cls(len(m) if dim is None else dim, {m: coeff})

    @classmethod
    def variable(cls, dim: int, i: int) -> "Poly":
        """The degree-1 basis vector e_i (0-based i)."""
        if not 0 <= i < dim:
            raise InputError(f"variable index {i} out of range for dim {dim}")
        m = [0] * dim
        m[i] = 1
        return cls(dim, {tuple(m): 1.0})

    @classmethod
    def from_vector(cls, v: Sequence[complex]) -> "Poly":
        """The degree-1 element sum_i v_i e_i."""
        v = list(v)
        if not v:
            raise InputError("empty coordinate vector")
        terms = {}
        for i, c in enumerate(v):
            m = [0] * len(v)
            m[i] = 1
            terms[tuple(m)] = complex(c)
        return cls(len(v), terms)

    # -- basic queries -------------------------------------------------

    def coefficient(self, m) -> complex:
        return self.terms.get(tuple(int(v) for v in m), 0j)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def top_degree(self) -> int:
        """Largest monomial degree present, -1 for the zero element."""
        if not self.terms:
            return -1
        return max(sum(m) for m in self.terms)

    def max_abs(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def scalar_part(self) -> complex:
        return self.terms.get((0,) * self.dim, 0j)

    # -- arithmetic ----------------------------------------------------

    def _check_dim(self, other: "Poly"):
        if self.dim != other.dim:
            raise DimensionMismatch(
                f"operands have dimensions {self.dim} and {other.dim}")

    def __add__(self, other: "Poly") -> "Poly":
        self._check_dim(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0j) + c
        return Poly(self.dim, out)

    def __sub__(self, other: "Poly") -> "Poly":
        self._check_dim(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0j) - c
        return Poly(self.dim, out)

    def __neg__(self) -> "Poly":
        return Poly(self.dim, {m: -c for m, c in self.terms.items()})

    def scale(self, c) -> "Poly":
        c = complex(c)
        return Poly(self.dim, {m: c * v for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, Poly):
            return vee(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other):
        return (isinstance(other, Poly) and self.dim == other.dim
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.dim, tuple(self.terms.items())))

    def __repr__(self):
        return f"Poly(dim={self.dim}, nterms={len(self.terms)}, deg={self.top_degree})"

    def __str__(self):
        if not self.terms:
            return "0"
        bits = []
        for m, c in list(self.terms.items())[:12]:
            bits.append(f"({c:.6g})*E{m}")
        tail = " + ..." if len(self.terms) > 12 else ""
        return " + ".join(bits) + tail


def allclose(x: Poly, y: Poly, rel: float = 1e-10, abs_tol: float = 0.0) -> bool:
    """Coefficient-wise comparison, relative to the larger element."""
    if x.dim != y.dim:
        return False
    scale = max(x.max_abs(), y.max_abs())
    tol = max(rel * scale, abs_tol)
    for m in x.terms.keys() | y.terms.keys():
        if abs(x.terms.get(m, 0j) - y.terms.get(m, 0j)) > tol:
            return False
    return True


# -- symmetric product and friends -------------------------------------


def vee(x: Poly, y: Poly) -> Poly:
    """Symmetric product: bilinear extension of E_m v E_n = E_{m+n}."""
    x._check_dim(y)
    out: dict[tuple[int, ...], complex] = {}
    for m, a in x.terms.items():
        for n, b in y.terms.items():
            k = tuple(mi + ni for mi, ni in zip(m, n))
            out[k] = out.get(k, 0j) + a * b
    return Poly(x.dim, out)


def vee_power(x: Poly, n: int) -> Poly:
    if n < 0:
        raise InputError("negative symmetric power")
    out = Poly.unit(x.dim)
    for _ in range(n):
        out = vee(out, x)
    return out


def component_of_degree(x: Poly, k: int) -> Poly:
    """Projection onto the homogeneous degree-k part."""
    return Poly(x.dim, {m: c for m, c in x.terms.items() if sum(m) == k})


def truncate_degree(x: Poly, k: int) -> Poly:
    """Drop all terms of degree above k."""
    return Poly(x.dim, {m: c for m, c in x.terms.items() if sum(m) <= k})


def involution(x: Poly, conj_basis: np.ndarray | None = None) -> Poly:
    """Antilinear involution X -> X*.

    With the default conjugation (basis vectors fixed) this conjugates all
    coefficients.  conj_basis, if given, is the d x d matrix of the basis
    conjugation, bar(e_i) = sum_j conj_basis[j, i] e_j; it must be an
    involution together with entrywise conjugation (C conj(C) = id).
    """
    plain = Poly(x.dim, {m: c.conjugate() for m, c in x.terms.items()})
    if conj_basis is None:
        return plain
    c = np.asarray(conj_basis, dtype=complex)
    if c.shape != (x.dim, x.dim):
        raise DimensionMismatch(
            f"conjugation matrix has shape {c.shape}, expected ({x.dim}, {x.dim})")
    if not np.allclose(c @ np.conj(c), np.eye(x.dim), atol=1e-10):
        raise InputError("conjugation matrix is not an involution")
    return substitute(plain, c)


def directional_derivative(x: Poly, rho: Sequence[complex]) -> Poly:
    """Derivation along the functional with coordinates rho:

        D_rho E_m = sum_i m_i rho_i E_{m - delta_i}.
    """
    rho = [complex(v) for v in rho]
    if len(rho) != x.dim:
        raise DimensionMismatch(
            f"functional has length {len(rho)}, expected {x.dim}")
    out: dict[tuple[int, ...], complex] = {}
    for m, c in x.terms.items():
        for i, (mi, ri) in enumerate(zip(m, rho)):
            if mi == 0 or ri == 0:
                continue
            k = m[:i] + (mi - 1,) + m[i + 1:]
            out[k] = out.get(k, 0j) + c * mi * ri
    return Poly(x.dim, out)


def translate(x: Poly, rho: Sequence[complex]) -> Poly:
    """Translation sum_t D_rho^t / t! applied to x.

    Finite sum: D_rho lowers degree, so t stops at the top degree of x.
    """
    rho = [complex(v) for v in rho]
    if len(rho) != x.dim:
        raise DimensionMismatch(
            f"functional has length {len(rho)}, expected {x.dim}")
    total = x
    term = x
    t = 1
    while term.top_degree > 0:
        term = directional_derivative(term, rho).scale(1.0 / t)
        total = total + term
        t += 1
    return total


def evaluate(x: Poly, rho: Sequence[complex]) -> complex:
    """Character value: E_m -> prod_i rho_i^{m_i} extended linearly."""
    rho = [complex(v) for v in rho]
    if len(rho) != x.dim:
        raise DimensionMismatch(
            f"point has length {len(rho)}, expected {x.dim}")
    total = 0j
    for m, c in x.terms.items():
        v = c
        for mi, ri in zip(m, rho):
            if mi:
                v *= ri ** mi
        total += v
    return total


def substitute(x: Poly, mat: np.ndarray) -> Poly:
    """Algebra homomorphism induced by a linear map on the degree-1 part.

    mat has shape (d_out, d_in) with d_in = x.dim; the basis vector e_i is
    sent to sum_j mat[j, i] f_j.  Unital, multiplicative, linear.
    """
    mat = np.asarray(mat, dtype=complex)
    if mat.ndim != 2 or mat.shape[1] != x.dim:
        raise DimensionMismatch(
            f"substitution matrix shape {mat.shape} does not match dim {x.dim}")
    d_out = int(mat.shape[0])
    if d_out < 1:
        raise InputError("substitution target must have dimension >= 1")
    images = [Poly(d_out, {}) for _ in range(x.dim)]
    for i in range(x.dim):
        col = {}
        for j in range(d_out):
            if mat[j, i] != 0:
                k = [0] * d_out
                k[j] = 1
                col[tuple(k)] = mat[j, i]
        images[i] = Poly(d_out, col)
    # cache powers of each image as needed
    powers: list[dict[int, Poly]] = [dict() for _ in range(x.dim)]

    def img_power(i: int, n: int) -> Poly:
        if n == 0:
            return Poly.unit(d_out)
        got = powers[i].get(n)
        if got is None:
            got = vee(img_power(i, n - 1), images[i])
            powers[i][n] = got
        return got

    out = Poly.zero(d_out)
    for m, c in x.terms.items():
        piece = Poly.unit(d_out).scale(c)
        for i, mi in enumerate(m):
            if mi:
                piece = vee(piece, img_power(i, mi))
        out = out + piece
    return out


# -- raw (non-symmetric) tensors ---------------------------------------


class RawTensor:
    """Finite sum of simple tensors  c * x_1 (x) ... (x) x_k, x_j in C^d.

    Only what the inner-product cross checks need: storage, tensor
    concatenation, and symmetrization into the polynomial model.  An empty
    factor list encodes a scalar summand of degree 0.
    """

    __slots__ = ("dim", "summands")

    def __init__(self, dim: int, summands: Iterable | None = None):
        dim = int(dim)
        if dim < 1:
            raise InputError(f"dimension must be >= 1, got {dim}")
        object.__setattr__(self, "dim", dim)
        clean = []
        for coeff, factors in (summands or []):
            fs = []
            for v in factors:
                v = np.asarray(v, dtype=complex).reshape(-1)
                if v.shape != (dim,):
                    raise DimensionMismatch(
                        f"tensor factor has length {v.shape[0]}, expected {dim}")
                fs.append(v)
            c = complex(coeff)
            if c != 0:
                clean.append((c, tuple(fs)))
        object.__setattr__(self, "summands", tuple(clean))

    def __setattr__(self, *a):
        raise AttributeError("RawTensor is immutable")

    @classmethod
    def simple(cls, *factors, coeff=1.0, dim=None):
        factors = [np.asarray(f, dtype=complex) for f in factors]
        if dim is None:
            if not factors:
                raise InputError("scalar summand needs an explicit dim")
            dim = factors[0].shape[0]
        return cls(dim, [(coeff, factors)])

    def tensor(self, other: "RawTensor") -> "RawTensor":
        if self.dim != other.dim:
            raise DimensionMismatch(
                f"operands have dimensions {self.dim} and {other.dim}")
        out = []
        for a, fs in self.summands:
            for b, gs in other.summands:
                out.append((a * b, list(fs) + list(gs)))
        return RawTensor(self.dim, out)

    def __add__(self, other: "RawTensor") -> "RawTensor":
        if self.dim != other.dim:
            raise DimensionMismatch(
                f"operands have dimensions {self.dim} and {other.dim}")
        return RawTensor(self.dim, list(self.summands) + list(other.summands))

    def __repr__(self):
        return f"RawTensor(dim={self.dim}, nsummands={len(self.summands)})"


def symmetrize(t: RawTensor) -> Poly:
    """Image of a raw tensor under the symmetrization projector, expressed
    in the polynomial model.

    For a simple tensor x_1 (x) ... (x) x_k the symmetrization equals the
    symmetric product x_1 v ... v x_k, i.e. the plain product of the
    degree-1 polynomials.
    """
    out = Poly.zero(t.dim)
    for c, factors in t.summands:
        piece = Poly.unit(t.dim).scale(c)
        for v in factors:
            piece = vee(piece, Poly.from_vector(v))
        out = out + piece
    return out
