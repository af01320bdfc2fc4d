"""Deformed products on the symmetric algebra driven by a bilinear form.

The product is a finite sum of iterated contractions.  With P the
contraction operator on pairs,

    P(E_m (x) E_n) = sum_{i,j} L_ij m_i n_j  E_{m - delta_i} (x) E_{n - delta_j},

the deformed product is X * Y = sum_t (1/t!) mu(P^t (X (x) Y)), where mu is
the symmetric product of the two legs.  The sum stops at min(deg X, deg Y),
so everything here is exact polynomial arithmetic.

Besides the product itself this module carries the quantitative bounds the
product satisfies (contraction estimate, product chains, dependence on the
driving form) as executable verifiers that sample random inputs and compare
observed seminorms against the proved bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import serialize
from .errors import DimensionMismatch, InputError
from .forms import (BilForm, HermForm, in_PVLambda, seminorm,
                    frame_coefficients)
from .polyalg import Poly, component_of_degree, directional_derivative, vee
from .report import Report, parallel_map
from .sampling import (random_bilform, random_homogeneous, random_poly,
                       random_psd, rng_for, scale_into_membership)


@dataclass(frozen=True)
class PairTensor:
    """One summand X (x) Y of an element of the tensor square."""

    left: Poly
    right: Poly

    def __post_init__(self):
        if self.left.dim != self.right.dim:
            raise DimensionMismatch(
                f"pair legs have dimensions {self.left.dim} and {self.right.dim}")


def pair_terms(pairs) -> dict:
    """Canonical dict form {(m, n): coeff} of a list of PairTensors.

    This is the representation nontrivial identities are compared in."""
    out: dict[tuple, complex] = {}
    for p in pairs:
        for m, a in p.left.terms.items():
            for n, b in p.right.terms.items():
                key = (m, n)
                out[key] = out.get(key, 0j) + a * b
    return {k: v for k, v in out.items() if v != 0}


def _pairs_from_dict(d: dict, dim: int) -> list[PairTensor]:
    out = []
    for (m, n), c in sorted(d.items()):
        out.append(PairTensor(Poly(dim, {m: c}), Poly(dim, {n: 1.0})))
    return out


def _contract_once(terms: dict, entries) -> dict:
    """One application of the contraction to a {(m, n): c} dict.

    entries is the list of nonzero (i, j, L_ij)."""
    out: dict[tuple, complex] = {}
    for (m, n), c in terms.items():
        for i, j, lij in entries:
            mi = m[i]
            nj = n[j]
            if mi == 0 or nj == 0:
                continue
            key = (m[:i] + (mi - 1,) + m[i + 1:],
                   n[:j] + (nj - 1,) + n[j + 1:])
            out[key] = out.get(key, 0j) + c * lij * mi * nj
    return {k: v for k, v in out.items() if v != 0}


def _nonzero_entries(lam: BilForm):
    mat = lam.matrix
    nz = np.argwhere(mat != 0)
    return [(int(i), int(j), complex(mat[i, j])) for i, j in nz]


def p_lambda(pairs, lam: BilForm) -> list[PairTensor]:
    """The contraction operator applied once to a sum of pair tensors."""
    if pairs:
        dim = pairs[0].left.dim
        if dim != lam.dim:
            raise DimensionMismatch(
                f"pairs have dim {dim}, form has dim {lam.dim}")
    terms = pair_terms(pairs)
    return _pairs_from_dict(_contract_once(terms, _nonzero_entries(lam)),
                            lam.dim)


def star_terms(x: Poly, y: Poly, lam: BilForm) -> list[Poly]:
    """The contraction-order pieces of the deformed product:

    entry t is (1/t!) mu(P^t (x (x) y)), so the product is their sum and
    the product for a rescaled form z*L is sum_t z^t * entry_t."""
    x._check_dim(y)
    if x.dim != lam.dim:
        raise DimensionMismatch(
            f"operands have dim {x.dim}, form has dim {lam.dim}")
    entries = _nonzero_entries(lam)
    cur: dict[tuple, complex] = {}
    for m, a in x.terms.items():
        for n, b in y.terms.items():
            cur[(m, n)] = cur.get((m, n), 0j) + a * b
    out: list[Poly] = []
    t = 0
    fact = 1.0
    while cur:
        merged: dict[tuple, complex] = {}
        for (m, n), c in cur.items():
            k = tuple(mi + ni for mi, ni in zip(m, n))
            merged[k] = merged.get(k, 0j) + c / fact
        out.append(Poly(x.dim, merged))
        t += 1
        fact *= t
        cur = _contract_once(cur, entries)
    return out or [Poly.zero(x.dim)]


def star(x: Poly, y: Poly, lam: BilForm) -> Poly:
    """Deformed product X * Y for the bilinear form lam."""
    total = Poly.zero(x.dim)
    for piece in star_terms(x, y, lam):
        total = total + piece
    return total


def star_chain(factors, lam: BilForm) -> Poly:
    """Left-to-right product of a list of elements (the product is
    associative, so the grouping does not matter)."""
    factors = list(factors)
    if not factors:
        raise InputError("empty product chain")
    out = factors[0]
    for f in factors[1:]:
        out = star(out, f, lam)
    return out


def star_truncated(x: Poly, y: Poly, lam: BilForm, gamma: HermForm,
                   tol: float = 0.0, *, tail_x: float | None = None,
                   tail_y: float | None = None,
                   big_r: float = 1.0) -> tuple[Poly, float]:
    """Product of truncated inputs together with an a-priori error bound.

    The caller declares how much was cut off: tail_x / tail_y (defaulting
    to tol) bound the seminorms, at gamma scaled by 8*big_r, of the parts
    of the true inputs that x and y are missing.  The returned bound

        4R/(2R-1) * (tail_x * ||y|| + ||x|| * tail_y + tail_x * tail_y)

    (norms at 8R*gamma) then dominates the gamma-seminorm distance between
    the returned product and the product of the untruncated inputs.  The
    tail_x * tail_y term appears because only truncated-input seminorms
    are available here.  Requires gamma to dominate the driving form and
    big_r >= 1 (the product itself is taken at scale z = 1).
    """
    if not in_PVLambda(gamma, lam):
        raise InputError(
            "truncation bound needs gamma to dominate the driving form "
            "(|Lambda(v, w)| <= ||v||_gamma ||w||_gamma fails)")
    big_r = float(big_r)
    if big_r < 1.0:
        raise InputError(f"big_r must be >= 1, got {big_r}")
    tx = float(tol if tail_x is None else tail_x)
    ty = float(tol if tail_y is None else tail_y)
    if tx < 0 or ty < 0:
        raise InputError("tail seminorm bounds must be nonnegative")
    product = star(x, y, lam)
    scaled = gamma.scaled(8.0 * big_r)
    nx = seminorm(x, scaled)
    ny = seminorm(y, scaled)
    front = 4.0 * big_r / (2.0 * big_r - 1.0)
    bound = front * (tx * ny + nx * ty + tx * ty)
    return product, float(bound)


# -- sums of squares ------------------------------------------------------


def _factor_lists(x: Poly):
    """Each monomial as (coeff-absorbed) list of basis coordinate vectors."""
    out = []
    for m, c in x.terms.items():
        factors = []
        for i, mi in enumerate(m):
            for _ in range(mi):
                v = np.zeros(x.dim, dtype=complex)
                v[i] = 1.0
                factors.append(v)
        if factors:
            factors[0] = factors[0] * c
            out.append(factors)
        # degree-0 summands have no factor to contract and drop out
    return out


def sum_of_squares_decomposition(x: Poly, lam: BilForm, t: int) -> list[Poly]:
    """Elements Y_i with  P^t (x* (x) x) = sum_i Y_i* (x) Y_i.

    Applying mu and the scalar extraction turns this into the positivity
    statements the deformed product satisfies.  Requires the driving form
    to pair conjugates positively (its matrix must be PSD Hermitian);
    t = 0 returns [x] unchanged.
    """
    if t < 0:
        raise InputError("contraction order must be >= 0")
    if x.dim != lam.dim:
        raise DimensionMismatch(
            f"element has dim {x.dim}, form has dim {lam.dim}")
    if t == 0:
        return [x]
    if not lam.is_hermitian():
        raise InputError(
            "sum-of-squares step needs a PSD Hermitian driving form")
    lmat = (lam.matrix + lam.matrix.conj().T) / 2.0
    w = np.linalg.eigvalsh(lmat)
    if w.size and w[0] < -1e-12 * max(1.0, float(np.max(np.abs(w)))):
        raise InputError(
            f"sum-of-squares step needs a PSD driving form: eigenvalue {w[0]:.6e}")

    lists = _factor_lists(x)
    slots = [(j, l) for j, fs in enumerate(lists) for l in range(len(fs))]
    if not slots:
        return []
    n = len(slots)
    gram = np.zeros((n, n), dtype=complex)
    for a, (ja, la) in enumerate(slots):
        va = lists[ja][la]
        for b, (jb, lb) in enumerate(slots):
            vb = lists[jb][lb]
            gram[a, b] = np.conj(va) @ lmat @ vb
    gw, gv = np.linalg.eigh((gram + gram.conj().T) / 2.0)
    gw = np.clip(gw, 0.0, None)
    root = (gv * np.sqrt(gw)) @ gv.conj().T  # Hermitian square root

    pieces: list[Poly] = []
    for i in range(n):
        acc = Poly.zero(x.dim)
        for b, (jb, lb) in enumerate(slots):
            coeff = root[i, b]
            if coeff == 0:
                continue
            rest = Poly.unit(x.dim)
            for l, v in enumerate(lists[jb]):
                if l != lb:
                    rest = vee(rest, Poly.from_vector(v))
            acc = acc + rest.scale(coeff)
        if not acc.is_zero:
            pieces.append(acc)
    if t == 1:
        return pieces
    out: list[Poly] = []
    for p in pieces:
        out.extend(sum_of_squares_decomposition(p, lam, t - 1))
    return out


# -- quantitative verifiers ----------------------------------------------


def contraction_norm_split(x: Poly, y: Poly, lam: BilForm,
                           alpha: HermForm, beta: HermForm) -> float:
    """Upper evaluation of the projective cross seminorm of P(x (x) y).

    Rewrites both legs in orthonormal frames, diagonalizes the driving
    form across the frames by SVD, and sums sigma_r ||D_r x|| ||D_r y||.
    This is a valid upper bound for the projective seminorm and is the
    quantity the sqrt(k l) estimate actually dominates.
    """
    xf = frame_coefficients(x, alpha)
    yf = frame_coefficients(y, beta)
    fa = alpha.frame()
    fb = beta.frame()
    if fa.rank == 0 or fb.rank == 0:
        return 0.0
    omega = fa.change @ lam.matrix @ fb.change.T
    u, sig, vh = np.linalg.svd(omega)
    ia = HermForm.identity(fa.rank)
    ib = HermForm.identity(fb.rank)
    total = 0.0
    for r, s in enumerate(sig):
        if s <= 0:
            continue
        # Omega = sum_r sigma_r u_r v_r^T with u_r = U[:, r], v_r = Vh[r, :]
        dx = directional_derivative(xf, u[:, r])
        dy = directional_derivative(yf, vh[r, :])
        total += float(s) * seminorm(dx, ia) * seminorm(dy, ib)
    return total


_PLAMBDA_INEQ = ("sum_r sigma_r ||D_r X|| ||D_r Y||  <=  "
                 "sqrt(k*l) * ||X||_alpha * ||Y||_beta")


def _plambda_sample(args):
    seed, idx, d, maxdeg, tol = args
    rng = rng_for(seed, idx)
    k = int(rng.integers(1, maxdeg + 1))
    l = int(rng.integers(1, maxdeg + 1))
    x = random_homogeneous(rng, d, k)
    y = random_homogeneous(rng, d, l)
    alpha = random_psd(rng, d, min_eig=0.1)
    beta = random_psd(rng, d, min_eig=0.1)
    lam = scale_into_membership(random_bilform(rng, d), alpha, beta)
    observed = contraction_norm_split(x, y, lam, alpha, beta)
    bound = math.sqrt(k * l) * seminorm(x, alpha) * seminorm(y, beta)
    if bound <= 0:
        ratio = 0.0 if observed <= 1e-12 else math.inf
    else:
        ratio = observed / bound
    ok = ratio <= 1.0 + tol
    witness = None
    if not ok:
        witness = {
            "sample": idx,
            "x": serialize.poly_to_json(x),
            "y": serialize.poly_to_json(y),
            "alpha": serialize.matrix_to_json(alpha.matrix),
            "beta": serialize.matrix_to_json(beta.matrix),
            "lam": serialize.matrix_to_json(lam.matrix),
        }
    return (str(idx), k, l, observed, bound, ratio), ok, ratio, witness


def verify_plambda_bound(samples: int = 500, d: int = 2, maxdeg: int = 4,
                         seed: int = 0, tol: float = 1e-9) -> Report:
    """Contraction estimate: the split seminorm of P(X (x) Y) against
    sqrt(k*l) times the seminorm product, on random admissible data."""
    rep = Report("plambda", _PLAMBDA_INEQ)
    results = parallel_map(_plambda_sample,
                           [(seed, i, d, maxdeg, tol) for i in range(samples)])
    for row, ok, ratio, witness in results:
        rep.record(row, ok=ok, ratio=ratio)
        if witness is not None and rep.witness is None:
            rep.witness = witness
    return rep


_CHAIN_INEQ = ("||<X_1 * ... * X_n>_m||_alpha <= ((k n)!/(k!)^n)^(1/2) "
               "(2 e^2)^(k n) prod ||X_i||_alpha  (rows 'Nc'); full norm "
               "with (2 e^3)^(k n) (rows 'N')")


def _chain_sample(args):
    seed, idx, k, n, d, tol = args
    rng = rng_for(seed, idx)
    factors = []
    norms = []
    alpha = random_psd(rng, d, min_eig=0.1)
    lam = scale_into_membership(random_bilform(rng, d), alpha)
    for _ in range(n):
        f = random_poly(rng, d, k)
        while f.is_zero:
            f = random_poly(rng, d, k)
        factors.append(f)
        norms.append(seminorm(f, alpha))
    chain = star_chain(factors, lam)
    kn = k * n
    pref = math.sqrt(math.factorial(kn) / math.factorial(k) ** n)
    prod_norms = math.prod(norms)

    full_obs = seminorm(chain, alpha)
    full_bound = pref * (2.0 * math.e ** 3) ** kn * prod_norms
    comp_bound = pref * (2.0 * math.e ** 2) ** kn * prod_norms
    worst_obs = 0.0
    for m in range(kn + 1):
        worst_obs = max(worst_obs, seminorm(component_of_degree(chain, m), alpha))

    def _ratio(obs, bnd):
        if bnd <= 0:
            return 0.0 if obs <= 1e-12 else math.inf
        return obs / bnd

    r_full = _ratio(full_obs, full_bound)
    r_comp = _ratio(worst_obs, comp_bound)
    rows = [((str(idx), k, n, full_obs, full_bound, r_full),
             r_full <= 1.0 + tol, r_full),
            ((f"{idx}c", k, n, worst_obs, comp_bound, r_comp),
             r_comp <= 1.0 + tol, r_comp)]
    witness = None
    if not all(ok for _, ok, _ in rows):
        witness = {"sample": idx,
                   "factors": [serialize.poly_to_json(f) for f in factors],
                   "alpha": serialize.matrix_to_json(alpha.matrix),
                   "lam": serialize.matrix_to_json(lam.matrix)}
    return rows, witness


def verify_product_chain_bound(k: int = 2, n: int = 3, d: int = 2,
                               seed: int = 0, samples: int = 100,
                               tol: float = 1e-9) -> Report:
    """Norm growth of n-fold products of degree <= k elements."""
    if k < 1 or n < 1:
        raise InputError("chain bound needs k >= 1 and n >= 1")
    rep = Report("chain", _CHAIN_INEQ)
    results = parallel_map(_chain_sample,
                           [(seed, i, k, n, d, tol) for i in range(samples)])
    for rows, witness in results:
        for row, ok, ratio in rows:
            rep.record(row, ok=ok, ratio=ratio)
        if witness is not None and rep.witness is None:
            rep.witness = witness
    return rep


_STARBOUND_INEQ = ("||X *_{zL} Y||_gamma <= 4R/(2R-1) * ||X||_{8R gamma} "
                   "* ||Y||_{8R gamma}  for |z| <= R")


def _starbound_sample(args):
    seed, idx, d, maxdeg, tol = args
    rng = rng_for(seed, idx)
    x = random_poly(rng, d, maxdeg)
    y = random_poly(rng, d, maxdeg)
    gamma = random_psd(rng, d, min_eig=0.1)
    lam = scale_into_membership(random_bilform(rng, d), gamma)
    big_r = (1.0, 1.25, 2.0, 4.0)[idx % 4]
    z = big_r * math.sqrt(rng.uniform(0.0, 1.0)) * np.exp(2j * math.pi * rng.uniform())
    observed = seminorm(star(x, y, lam.scaled(z)), gamma)
    scaled = gamma.scaled(8.0 * big_r)
    bound = (4.0 * big_r / (2.0 * big_r - 1.0)
             * seminorm(x, scaled) * seminorm(y, scaled))
    if bound <= 0:
        ratio = 0.0 if observed <= 1e-12 else math.inf
    else:
        ratio = observed / bound
    ok = ratio <= 1.0 + tol
    witness = None
    if not ok:
        witness = {"sample": idx, "big_r": big_r,
                   "z": [z.real, z.imag],
                   "x": serialize.poly_to_json(x),
                   "y": serialize.poly_to_json(y),
                   "gamma": serialize.matrix_to_json(gamma.matrix),
                   "lam": serialize.matrix_to_json(lam.matrix)}
    return (str(idx), x.top_degree, y.top_degree, observed, bound, ratio), \
        ok, ratio, witness


def verify_star_norm_bound(samples: int = 500, d: int = 2, maxdeg: int = 4,
                           seed: int = 0, tol: float = 1e-9) -> Report:
    """Continuity estimate for the product at rescaled driving forms."""
    rep = Report("starbound", _STARBOUND_INEQ)
    results = parallel_map(_starbound_sample,
                           [(seed, i, d, maxdeg, tol) for i in range(samples)])
    for row, ok, ratio, witness in results:
        rep.record(row, ok=ok, ratio=ratio)
        if witness is not None and rep.witness is None:
            rep.witness = witness
    return rep


_PERTURB_INEQ = ("||X *' Y - X * Y||_gamma <= 8/(2 rho - 1) * "
                 "||X||_{32 gamma} * ||Y||_{32 gamma}  at the largest "
                 "admissible rho with rho*(L' - L) dominated by gamma")


def largest_admissible_rho(gamma: HermForm, diff: BilForm,
                           rel: float = 1e-6, cap: float = 1e12) -> float:
    """Largest rho with rho*diff dominated by gamma, by bisection."""
    lo = 0.5 * (1.0 + 1e-9)
    if not in_PVLambda(gamma, diff.scaled(lo)):
        raise InputError(
            "no admissible rho > 1/2: the perturbation is too large "
            "relative to gamma")
    hi = max(1.0, 2.0 * lo)
    while in_PVLambda(gamma, diff.scaled(hi)):
        hi *= 2.0
        if hi >= cap:
            return cap
    lo = max(lo, hi / 2.0)
    while hi - lo > rel * lo:
        mid = 0.5 * (lo + hi)
        if in_PVLambda(gamma, diff.scaled(mid)):
            lo = mid
        else:
            hi = mid
    return lo


def lambda_perturbation_check(x: Poly, y: Poly, lam: BilForm,
                              lam2: BilForm, gamma: HermForm,
                              tol: float = 1e-9) -> Report:
    """Compare the product difference under a perturbed driving form
    against the continuity bound."""
    if not in_PVLambda(gamma, lam):
        raise InputError(
            "perturbation check needs gamma to dominate the unperturbed form")
    rep = Report("perturbation", _PERTURB_INEQ)
    diff = lam2 - lam
    observed = seminorm(star(x, y, lam2) - star(x, y, lam), gamma)
    scale = max(lam.max_abs(), lam2.max_abs(), 1.0)
    if diff.max_abs() <= 1e-15 * scale:
        rep.record(("0", x.top_degree, y.top_degree, observed, 0.0, 0.0),
                   ok=observed <= 1e-12, ratio=0.0)
        rep.witness = {"rho": math.inf}
        return rep
    rho = largest_admissible_rho(gamma, diff)
    scaled = gamma.scaled(32.0)
    bound = (8.0 / (2.0 * rho - 1.0)) * seminorm(x, scaled) * seminorm(y, scaled)
    if bound <= 0:
        ratio = 0.0 if observed <= 1e-12 else math.inf
    else:
        ratio = observed / bound
    rep.record(("0", x.top_degree, y.top_degree, observed, bound, ratio),
               ok=ratio <= 1.0 + tol, ratio=ratio)
    rep.witness = {"rho": rho}
    return rep


def _perturbation_sample(args):
    seed, idx, d, maxdeg, tol = args
    rng = rng_for(seed, idx)
    x = random_poly(rng, d, maxdeg)
    y = random_poly(rng, d, maxdeg)
    gamma = random_psd(rng, d, min_eig=0.1)
    lam = scale_into_membership(random_bilform(rng, d), gamma)
    # perturbation small enough that some rho > 1/2 stays admissible
    margin = rng.uniform(0.1, 0.95)
    diff = scale_into_membership(random_bilform(rng, d), gamma,
                                 margin=1.8 * margin)
    sub = lambda_perturbation_check(x, y, lam, lam + diff, gamma, tol=tol)
    row = sub.rows[0]
    return (str(idx),) + row[1:], sub.passed, row[-1], sub.witness


def verify_perturbation_bound(samples: int = 200, d: int = 2, maxdeg: int = 3,
                              seed: int = 0, tol: float = 1e-9) -> Report:
    """Continuity of the product in the driving form, sampled."""
    rep = Report("perturbation", _PERTURB_INEQ)
    results = parallel_map(_perturbation_sample,
                           [(seed, i, d, maxdeg, tol) for i in range(samples)])
    for row, ok, ratio, _witness in results:
        rep.record(row, ok=ok, ratio=ratio)
    return rep


_BINOMIS_INEQ = ("binom(m, l) * binom(m - l + t, t) <= binom(l + t, t) * "
                 "binom(k (n + 1), k)  for m <= k n, t <= k, l <= min(m, k - t)")


def verify_binomial_lemma(kmax: int = 8, nmax: int = 8) -> Report:
    """Exhaustive check of the combinatorial lemma behind the product
    chain estimate, in exact integer arithmetic."""
    rep = Report("binomis", _BINOMIS_INEQ)
    for k in range(kmax + 1):
        for n in range(nmax + 1):
            rhs_cap = math.comb(k * (n + 1), k)
            worst = 0.0
            count = 0
            bad = 0
            for m in range(k * n + 1):
                for t in range(k + 1):
                    for l in range(min(m, k - t) + 1):
                        lhs = math.comb(m, l) * math.comb(m - l + t, t)
                        rhs = math.comb(l + t, t) * rhs_cap
                        count += 1
                        if lhs > rhs:
                            bad += 1
                        worst = max(worst, lhs / rhs)
            rep.rows.append((f"k{k}n{n}", k, n, float(count), 1.0, worst))
            rep.checks += count
            rep.failures += bad
            if rep.max_ratio is None or worst > rep.max_ratio:
                rep.max_ratio = worst
    return rep
