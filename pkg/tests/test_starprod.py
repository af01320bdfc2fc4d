"""Deformed product: contraction operator, star product, norm estimates.

The star product values below were expanded by hand from the contraction
recursion before being run, and the keystone identity ties the product back
to the independently tested inner product.
"""

import math

import numpy as np
import pytest

from symstar.errors import InputError
from symstar.forms import BilForm, HermForm, extended_inner_product, lambda_of_form, seminorm
from symstar.polyalg import Poly, allclose, involution, vee
from symstar.sampling import (
    random_bilform,
    random_poly,
    random_psd,
    rng_for,
    scale_into_membership,
)
from symstar.starprod import (
    PairTensor,
    lambda_perturbation_check,
    largest_admissible_rho,
    p_lambda,
    pair_terms,
    star,
    star_chain,
    star_terms,
    star_truncated,
    sum_of_squares_decomposition,
    verify_binomial_lemma,
)
from tests.conftest import assert_poly_equal


def E(m, c=1.0):
    return Poly.monomial(tuple(m), c)


# ---------------------------------------------------------------------------
# single contraction step
# ---------------------------------------------------------------------------

def test_contraction_frozen_values():
    c = 0.7
    lam = BilForm([[c]])
    got = pair_terms(p_lambda([PairTensor(E((1,)), E((1,)))], lam))
    assert got == pytest.approx({((0,), (0,)): c})

    got = pair_terms(p_lambda([PairTensor(E((2,)), E((1,)))], lam))
    assert got == pytest.approx({((1,), (0,)): 2 * c})

    # scalars on either side are annihilated
    assert p_lambda([PairTensor(Poly.unit(1), E((3,)))], lam) == []
    assert p_lambda([PairTensor(E((3,)), Poly.unit(1))], lam) == []


def test_contraction_off_diagonal():
    lam = BilForm([[0.0, 1.0], [0.0, 0.0]])  # only L_12 nonzero
    got = pair_terms(p_lambda([PairTensor(E((1, 0)), E((0, 1)))], lam))
    assert got == pytest.approx({((0, 0), (0, 0)): 1.0})
    assert p_lambda([PairTensor(E((0, 1)), E((1, 0)))], lam) == []


def test_contractions_with_different_forms_commute(rng):
    # P_A P_B = P_B P_A on pair tensors
    for _ in range(10):
        d = 2
        a = BilForm(rng.standard_normal((d, d)))
        b = BilForm(rng.standard_normal((d, d)))
        x = random_poly(rng, d, 3)
        y = random_poly(rng, d, 3)
        start = [PairTensor(x, y)]
        ab = pair_terms(p_lambda(p_lambda(start, a), b))
        ba = pair_terms(p_lambda(p_lambda(start, b), a))
        keys = set(ab) | set(ba)
        for k in keys:
            assert ab.get(k, 0j) == pytest.approx(ba.get(k, 0j), abs=1e-9)


# ---------------------------------------------------------------------------
# star product: frozen expansions
# ---------------------------------------------------------------------------

def test_star_with_zero_form_is_vee(rng):
    lam = BilForm(np.zeros((2, 2)))
    for _ in range(5):
        x = random_poly(rng, 2, 3)
        y = random_poly(rng, 2, 3)
        assert allclose(star(x, y, lam), vee(x, y), rel=1e-12)


def test_star_unit():
    lam = BilForm([[0.9]])
    x = E((3,), 2.0) + E((1,), 1j)
    assert_poly_equal(star(x, Poly.unit(1), lam), x)
    assert_poly_equal(star(Poly.unit(1), x, lam), x)


def test_star_degree_one_frozen():
    c = 0.7
    lam = BilForm([[c]])
    # E1 * E1 = E2 + c E0
    assert_poly_equal(star(E((1,)), E((1,)), lam), E((2,)) + E((0,), c))


def test_star_degree_two_frozen():
    c = 0.7
    lam = BilForm([[c]])
    # E2 * E2 = E4 + 4c E2 + 2c^2 E0
    want = E((4,)) + E((2,), 4 * c) + E((0,), 2 * c * c)
    assert_poly_equal(star(E((2,)), E((2,)), lam), want)


def test_star_canonical_commutator():
    c = 0.25
    lam = BilForm([[0.0, c], [-c, 0.0]])
    e1, e2 = E((1, 0)), E((0, 1))
    comm = star(e1, e2, lam) - star(e2, e1, lam)
    assert_poly_equal(comm, Poly.unit(2) * (2 * c))


def test_star_terms_partition_by_contraction_order():
    c = 0.7
    lam = BilForm([[c]])
    terms = star_terms(E((2,)), E((2,)), lam)
    assert len(terms) == 3
    assert_poly_equal(terms[0], E((4,)))
    assert_poly_equal(terms[1], E((2,), 4 * c))
    assert_poly_equal(terms[2], E((0,), 2 * c * c))


def test_star_scaled_form_interpolation(rng):
    # star with z L equals sum_t z^t (t-th term of star with L)
    lam = BilForm(rng.standard_normal((2, 2)))
    x = random_poly(rng, 2, 3)
    y = random_poly(rng, 2, 3)
    terms = star_terms(x, y, lam)
    for z in [0.0, 1.0, -0.5, 0.3 + 0.8j]:
        want = Poly.zero(2)
        for t, p in enumerate(terms):
            want = want + p * (z ** t)
        assert allclose(star(x, y, lam.scaled(z)), want, rel=1e-9)


def test_star_interpolates_to_fresh_point(rng):
    # coefficients of z -> x *_{zL} y are polynomials in z of degree <= t_max;
    # Lagrange interpolation through t_max + 1 nodes reproduces a fresh node
    lam = BilForm(rng.standard_normal((2, 2)))
    x = random_poly(rng, 2, 3)
    y = random_poly(rng, 2, 3)
    tmax = len(star_terms(x, y, lam)) - 1
    nodes = np.linspace(0.3, 1.7, tmax + 1)
    probe = (1, 0)  # watch one coefficient
    vals = [star(x, y, lam.scaled(z)).coefficient(probe) for z in nodes]
    z0 = 2.31
    interp = 0j
    for i, zi in enumerate(nodes):
        w = 1.0
        for j, zj in enumerate(nodes):
            if j != i:
                w *= (z0 - zj) / (zi - zj)
        interp += w * vals[i]
    direct = star(x, y, lam.scaled(z0)).coefficient(probe)
    assert interp == pytest.approx(direct, rel=1e-8, abs=1e-10)


# ---------------------------------------------------------------------------
# algebra laws
# ---------------------------------------------------------------------------

def test_star_associative(rng):
    for trial in range(25):
        d = int(rng.integers(1, 3))
        lam = BilForm(rng.standard_normal((d, d))
                      + 1j * rng.standard_normal((d, d)))
        x = random_poly(rng, d, 3)
        y = random_poly(rng, d, 3)
        z = random_poly(rng, d, 3)
        lhs = star(star(x, y, lam), z, lam)
        rhs = star(x, star(y, z, lam), lam)
        assert allclose(lhs, rhs, rel=1e-9), f"trial {trial}"


def test_star_involution_law(rng):
    # (X *_L Y)^* = Y^* *_{L^*} X^*
    for _ in range(15):
        d = int(rng.integers(1, 3))
        lam = BilForm(rng.standard_normal((d, d))
                      + 1j * rng.standard_normal((d, d)))
        x = random_poly(rng, d, 3)
        y = random_poly(rng, d, 3)
        lhs = involution(star(x, y, lam))
        rhs = star(involution(y), involution(x), lam.star())
        assert allclose(lhs, rhs, rel=1e-9)


def test_star_distributes(rng):
    lam = BilForm(rng.standard_normal((2, 2)))
    x, y, z = (random_poly(rng, 2, 3) for _ in range(3))
    assert allclose(star(x, y + z, lam), star(x, y, lam) + star(x, z, lam),
                    rel=1e-10)


def test_star_chain_matches_iterated(rng):
    lam = BilForm(rng.standard_normal((2, 2)))
    xs = [random_poly(rng, 2, 2) for _ in range(4)]
    it = xs[0]
    for f in xs[1:]:
        it = star(it, f, lam)
    assert allclose(star_chain(xs, lam), it, rel=1e-9)
    with pytest.raises(InputError, match="empty product chain"):
        star_chain([], lam)


# ---------------------------------------------------------------------------
# keystone: vacuum value of X^* * Y recovers the inner product
# ---------------------------------------------------------------------------

def test_vacuum_pairing_recovers_inner_product(rng):
    for _ in range(25):
        d = int(rng.integers(1, 4))
        a = random_psd(rng, d, min_eig=0.05)
        lam = lambda_of_form(a)
        x = random_poly(rng, d, 4)
        y = random_poly(rng, d, 4)
        got = star(involution(x), y, lam).scalar_part()
        want = extended_inner_product(x, y, a)
        assert got == pytest.approx(want, rel=1e-9, abs=1e-12)


def test_vacuum_pairing_monomials():
    a = HermForm.identity(1)
    lam = lambda_of_form(a)
    for n in range(5):
        got = star(E((n,)), E((n,)), lam).scalar_part()
        assert got == pytest.approx(math.factorial(n))


# ---------------------------------------------------------------------------
# sum of squares decomposition of P^t(x* (x) x)
# ---------------------------------------------------------------------------

def test_sos_no_contraction_returns_element():
    out = sum_of_squares_decomposition(E((2,)), BilForm([[1.0]]), 0)
    assert len(out) == 1
    assert_poly_equal(out[0], E((2,)))


def test_sos_single_variable():
    out = sum_of_squares_decomposition(E((1,)), BilForm([[1.0]]), 1)
    assert len(out) == 1
    assert_poly_equal(out[0], Poly.unit(1))


def test_sos_expansion_matches_contraction(rng):
    # P^t(x* (x) x) = sum_i y_i* (x) y_i as pair tensors
    for _ in range(8):
        d = int(rng.integers(1, 3))
        lam = BilForm(random_psd(rng, d, min_eig=0.05).matrix)
        x = random_poly(rng, d, 3)
        t = int(rng.integers(1, 3))
        ys = sum_of_squares_decomposition(x, lam, t)
        lhs = [PairTensor(involution(x), x)]
        for _ in range(t):
            lhs = p_lambda(lhs, lam)
        want = pair_terms(lhs)
        got = pair_terms([PairTensor(involution(y), y) for y in ys])
        keys = set(want) | set(got)
        scale = max((abs(v) for v in want.values()), default=1.0)
        for k in keys:
            assert got.get(k, 0j) == pytest.approx(want.get(k, 0j),
                                                   abs=1e-9 * max(1.0, scale))


def test_sos_needs_psd_form():
    with pytest.raises(InputError, match="sum-of-squares"):
        sum_of_squares_decomposition(E((1,)), BilForm([[-1.0]]), 1)


# ---------------------------------------------------------------------------
# truncated product with certified tail bound
# ---------------------------------------------------------------------------

def test_truncated_exact_when_tails_vanish():
    lam = BilForm([[0.4]])
    gamma = HermForm.identity(1)
    x, y = E((2,)) + E((0,), 0.5), E((1,))
    got, bound = star_truncated(x, y, lam, gamma, tail_x=0.0, tail_y=0.0)
    assert bound == 0.0
    assert allclose(got, star(x, y, lam), rel=1e-12)


def test_truncated_bound_formula():
    lam = BilForm([[0.4]])
    gamma = HermForm.identity(1)
    x, y = E((1,)), E((1,))
    tx, ty = 0.25, 0.5
    got, bound = star_truncated(x, y, lam, gamma, tail_x=tx, tail_y=ty, big_r=1.0)
    # R = 1: coefficient 4R/(2R-1) = 4, norms at 8 gamma
    nx = seminorm(x, HermForm(8 * gamma.matrix, check=False))
    ny = seminorm(y, HermForm(8 * gamma.matrix, check=False))
    assert bound == pytest.approx(4.0 * (tx * ny + nx * ty + tx * ty))


def test_truncated_requires_membership():
    gamma = HermForm.identity(1)
    with pytest.raises(InputError):
        star_truncated(E((1,)), E((1,)), BilForm([[2.0]]), gamma,
                       tail_x=0.1, tail_y=0.1)
    with pytest.raises(InputError):
        star_truncated(E((1,)), E((1,)), BilForm([[0.5]]), gamma,
                       tail_x=0.1, tail_y=0.1, big_r=0.5)


def test_truncated_bound_covers_actual_tail(rng):
    # drop terms from exact factors, check the discarded part of the product
    # stays within the certified bound
    gamma = HermForm.identity(2)
    for _ in range(10):
        lam = scale_into_membership(random_bilform(rng, 2), gamma, margin=0.8)
        x_full = random_poly(rng, 2, 4)
        y_full = random_poly(rng, 2, 4)
        from symstar.polyalg import truncate_degree
        x_cut = truncate_degree(x_full, 2)
        y_cut = truncate_degree(y_full, 2)
        big = HermForm(8 * gamma.matrix, check=False)
        tx = seminorm(x_full - x_cut, big)
        ty = seminorm(y_full - y_cut, big)
        got, bound = star_truncated(x_cut, y_cut, lam, gamma,
                                    tail_x=tx, tail_y=ty)
        err = seminorm(star(x_full, y_full, lam) - got, gamma)
        assert err <= bound * (1 + 1e-9) + 1e-12


# ---------------------------------------------------------------------------
# perturbation of the driving form
# ---------------------------------------------------------------------------

def test_largest_admissible_rho_closed_form():
    gamma = HermForm.identity(1)
    eps = 0.01
    rho = largest_admissible_rho(gamma, BilForm([[eps]]))
    assert rho == pytest.approx(1.0 / eps, rel=1e-5)


def test_largest_admissible_rho_rejects_big_difference():
    gamma = HermForm.identity(1)
    with pytest.raises(InputError, match="no admissible rho"):
        largest_admissible_rho(gamma, BilForm([[3.0]]))


def test_perturbation_equal_forms(rng):
    gamma = HermForm.identity(2)
    lam = scale_into_membership(random_bilform(rng, 2), gamma, margin=0.5)
    x = random_poly(rng, 2, 3)
    y = random_poly(rng, 2, 3)
    rep = lambda_perturbation_check(x, y, lam, lam, gamma)
    assert rep.passed
    assert rep.witness["rho"] == math.inf


def test_perturbation_bound_holds(rng):
    gamma = HermForm.identity(2)
    for _ in range(10):
        lam = scale_into_membership(random_bilform(rng, 2), gamma, margin=0.45)
        lam2 = lam + scale_into_membership(random_bilform(rng, 2), gamma,
                                           margin=0.05)
        x = random_poly(rng, 2, 3)
        y = random_poly(rng, 2, 3)
        rep = lambda_perturbation_check(x, y, lam, lam2, gamma)
        assert rep.passed, rep.to_csv()


# ---------------------------------------------------------------------------
# pairing estimate is tight in the rank-one case
# ---------------------------------------------------------------------------

def test_contraction_norm_split_tight():
    from symstar.starprod import contraction_norm_split
    a = HermForm.identity(1)
    got = contraction_norm_split(E((1,)), E((1,)), BilForm([[1.0]]), a, a)
    assert got == pytest.approx(1.0)


def test_binomial_lemma_exhaustive_count():
    rep = verify_binomial_lemma(kmax=4, nmax=4)
    assert rep.passed
    # independent count of the (k, n, m, t, l) grid
    want = 0
    for k in range(5):
        for n in range(5):
            for m in range(k * n + 1):
                for t in range(k + 1):
                    want += min(m, k - t) + 1
    assert rep.checks == want
