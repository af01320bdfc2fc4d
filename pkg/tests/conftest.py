import numpy as np
import pytest

from symstar.forms import HermForm
from symstar.polyalg import Poly, allclose


def assert_poly_equal(got: Poly, want: Poly, rel: float = 1e-10, msg: str = ""):
    assert allclose(got, want, rel=rel), \
        f"{msg or 'polynomials differ'}: got {got}, want {want}"


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_nondegenerate_psd(rng, d: int) -> HermForm:
    b = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return HermForm(b.conj().T @ b / d + 0.2 * np.eye(d), check=False)
