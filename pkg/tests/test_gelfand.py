"""Jets at a point, reconstruction, and the evaluation brackets.

Jet coefficients are pinned against central finite differences of the
polynomial's value function, which never touches the frame machinery.
"""

import itertools
import math

import numpy as np
import pytest

from symstar.errors import InputError
from symstar.forms import HermForm, extended_inner_product, seminorm
from symstar.gelfand import (
    TRANSLATION_CONST,
    functional_dominated,
    jet_of,
    pointwise_bracket,
    reconstruct,
    star_bracket,
    translated_bracket,
    verify_derivative_estimates,
    verify_derivatives_suite,
)
from symstar.polyalg import Poly, allclose, evaluate, translate, vee
from symstar.sampling import random_poly, random_psd, rng_for
from tests.conftest import assert_poly_equal, random_nondegenerate_psd


def E(m, c=1.0):
    return Poly.monomial(tuple(m), c)


# ---------------------------------------------------------------------------
# jet values
# ---------------------------------------------------------------------------

def test_jet_frozen_examples():
    a = HermForm.identity(1)
    j = jet_of(E((1,)), a, (0.0,))
    assert j.coefficients.get((1,)) == pytest.approx(1.0)
    assert j.coefficients.get((0,), 0.0) == pytest.approx(0.0)

    j0 = jet_of(Poly.unit(1), a, (0.0,))
    assert j0.coefficients.get((0,)) == pytest.approx(1.0)


def test_jet_scalar_entry_is_evaluation(rng):
    a = random_nondegenerate_psd(rng, 2)
    for _ in range(5):
        x = random_poly(rng, 2, 4)
        rho = tuple(rng.standard_normal(2))
        j = jet_of(x, a, rho)
        want = evaluate(x, rho)
        assert j.coefficients.get((0, 0), 0j) == pytest.approx(want, abs=1e-10)


def test_jet_scaled_weight():
    # alpha = [[4]]: frame vector e1/2, so E_(2) has jet entry 4 at (2,)
    j = jet_of(E((2,)), HermForm([[4.0]]), (0.0,))
    assert j.coefficients.get((2,)) == pytest.approx(4.0)


def finite_difference_jet(x, alpha, rho, m, h=1e-5):
    """Mixed central difference of the value function along frame directions,
    divided by |m|!."""
    s = alpha.frame().coord_map
    dirs = [s[p, :] for p in range(s.shape[0])]
    rho = np.asarray(rho, dtype=complex)

    def f(steps):
        sigma = rho + sum(t * v for t, v in zip(steps, dirs))
        return evaluate(x, sigma)

    k = sum(m)
    if k == 0:
        return f([0.0] * len(dirs))
    # expand the mixed partial as a tensor of first/second differences
    idx = [p for p, mp in enumerate(m) for _ in range(mp)]
    total = 0j
    for signs in itertools.product((1, -1), repeat=k):
        steps = [0.0] * len(dirs)
        for s_, p in zip(signs, idx):
            steps[p] += s_ * h
        total += math.prod(signs) * f(steps)
    return total / (2 * h) ** k / math.factorial(k)


def test_jet_matches_finite_differences(rng):
    for _ in range(8):
        d = int(rng.integers(1, 3))
        a = random_nondegenerate_psd(rng, d)
        x = random_poly(rng, d, 3, complex_coeffs=False)
        rho = tuple(rng.standard_normal(d) * 0.5)
        j = jet_of(x, a, rho)
        for m, c in j.coefficients.items():
            if sum(m) > 2:
                continue
            fd = finite_difference_jet(x, a, rho, m)
            assert c == pytest.approx(fd, rel=1e-5, abs=1e-6), (m, c, fd)


def test_jet_maxdeg_truncates():
    a = HermForm.identity(1)
    x = E((3,)) + E((1,))
    j = jet_of(x, a, (0.0,), maxdeg=1)
    assert j.maxdeg == 1
    assert all(sum(m) <= 1 for m in j.coefficients)


# ---------------------------------------------------------------------------
# reconstruction
# ---------------------------------------------------------------------------

def test_reconstruct_round_trip(rng):
    for _ in range(10):
        d = int(rng.integers(1, 4))
        a = random_nondegenerate_psd(rng, d)
        x = random_poly(rng, d, 4)
        rec, complete = reconstruct(jet_of(x, a, (0.0,) * d))
        assert complete
        assert allclose(rec, x, rel=1e-9)


def test_reconstruct_requires_base_point():
    a = HermForm.identity(1)
    j = jet_of(E((2,)), a, (0.5,))
    with pytest.raises(InputError, match="base point"):
        reconstruct(j)


def test_reconstruct_degenerate_weight_partial():
    a = HermForm([[1.0, 0.0], [0.0, 0.0]])
    x = E((1, 0)) + E((0, 1))
    rec, complete = reconstruct(jet_of(x, a, (0.0, 0.0)))
    assert not complete
    assert_poly_equal(rec, E((1, 0)))


# ---------------------------------------------------------------------------
# brackets
# ---------------------------------------------------------------------------

def test_bracket_at_origin_is_inner_product(rng):
    for _ in range(10):
        d = int(rng.integers(1, 3))
        a = random_nondegenerate_psd(rng, d)
        x = random_poly(rng, d, 3)
        y = random_poly(rng, d, 3)
        got = pointwise_bracket(x, y, a, (0.0,) * d)
        want = extended_inner_product(x, y, a)
        assert got == pytest.approx(want, rel=1e-9, abs=1e-12)


def test_bracket_with_scalar_left(rng):
    a = random_nondegenerate_psd(rng, 2)
    y = random_poly(rng, 2, 3)
    rho = (0.3, -0.7)
    got = pointwise_bracket(Poly.unit(2), y, a, rho)
    assert got == pytest.approx(evaluate(y, rho), rel=1e-9)


def test_bracket_three_routes_agree(rng):
    for _ in range(12):
        d = int(rng.integers(1, 3))
        a = random_nondegenerate_psd(rng, d)
        x = random_poly(rng, d, 3)
        y = random_poly(rng, d, 3)
        rho = tuple(rng.standard_normal(d))
        v1 = pointwise_bracket(x, y, a, rho)
        v2 = translated_bracket(x, y, a, rho)
        v3 = star_bracket(x, y, a, rho)
        scale = max(1.0, abs(v1))
        assert abs(v1 - v2) <= 1e-8 * scale
        assert abs(v1 - v3) <= 1e-8 * scale


def test_bracket_invariant_under_frame_rotation(rng):
    # recompute the bracket with a rotated orthonormal frame by hand; the
    # value must not move
    from symstar.forms import weighted_dot
    from symstar.polyalg import substitute
    for _ in range(8):
        d = int(rng.integers(1, 4))
        a = random_nondegenerate_psd(rng, d)
        x = random_poly(rng, d, 3)
        y = random_poly(rng, d, 3)
        rho = tuple(rng.standard_normal(d) * 0.5)
        q, r = np.linalg.qr(rng.standard_normal((d, d)))
        q = q @ np.diag(np.sign(np.diag(r)))
        smap = q @ a.frame().coord_map
        tx = substitute(translate(x, rho), smap)
        ty = substitute(translate(y, rho), smap)
        manual = weighted_dot(tx, ty)
        assert manual == pytest.approx(pointwise_bracket(x, y, a, rho),
                                       rel=1e-9, abs=1e-12)


# ---------------------------------------------------------------------------
# dominated functionals and the derivative/translation bounds
# ---------------------------------------------------------------------------

def test_functional_dominated():
    a = HermForm.identity(2)
    assert functional_dominated((0.5, 0.5), a)
    assert functional_dominated((1.0, 0.0), a)
    assert not functional_dominated((2.0, 0.0), a)
    # a bigger weight dominates more functionals
    assert functional_dominated((2.0, 0.0), HermForm(4 * np.eye(2), check=False))


def test_translation_constant_value():
    assert TRANSLATION_CONST == pytest.approx(2.0 / (math.sqrt(2.0) - 1.0))


def test_translation_bound_direct(rng):
    # ||translate(x, rho)||_alpha <= C ||x||_{2 alpha} for dominated rho
    a = HermForm.identity(2)
    big = a.scaled(2.0)
    for _ in range(10):
        x = random_poly(rng, 2, 5)
        rho = rng.standard_normal(2)
        rho = rho / np.linalg.norm(rho) * rng.uniform(0.0, 1.0)
        assert seminorm(translate(x, tuple(rho)), a) \
            <= TRANSLATION_CONST * seminorm(x, big) * (1 + 1e-9)


def test_derivative_estimates_pass():
    rep = verify_derivative_estimates((0.6, 0.3), HermForm.identity(2),
                                      samples=20, seed=3)
    assert rep.passed, rep.to_csv()


def test_derivative_estimates_need_domination():
    with pytest.raises(InputError, match="dominated"):
        verify_derivative_estimates((2.0, 0.0), HermForm.identity(2))


def test_derivatives_suite_small():
    rep = verify_derivatives_suite(samples=20, d=2, maxdeg=5, seed=4)
    assert rep.passed, rep.to_csv()
    # rows cover both the iterated derivative and the translation bound
    kinds = {row[1] for row in rep.rows}
    assert -1 in kinds and 0 in kinds


# ---------------------------------------------------------------------------
# separation of points
# ---------------------------------------------------------------------------

def test_jets_separate_elements(rng):
    a = HermForm.identity(3)
    for _ in range(10):
        x = random_poly(rng, 3, 4)
        if x.is_zero:
            continue
        j = jet_of(x, a, (0.0, 0.0, 0.0))
        assert any(abs(c) > 1e-12 for c in j.coefficients.values())
