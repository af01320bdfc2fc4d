"""Symmetric tensor algebras with deformed products and their states."""

from .errors import DimensionMismatch, InputError, PositivityError
from .forms import (BilForm, HermForm, OrthoFrame, extended_inner_product,
                    frame_coefficients, hilbert_schmidt_check, in_PVLambda,
                    seminorm, weighted_dot)
from .gelfand import Jet, jet_of, pointwise_bracket, reconstruct
from .polyalg import Poly, RawTensor, symmetrize, translate, vee
from .starprod import (star, star_terms, star_truncated,
                       sum_of_squares_decomposition)
from .states import (GnsRep, StateDesc, analytic_vector_series, gns_build,
                     gns_matrix, gns_vector, gram_matrix, positivity_check,
                     star_exponential_vector)
from .verify import SUITES, run_suite

__version__ = "0.1.0"

__all__ = [
    "BilForm", "DimensionMismatch", "GnsRep", "HermForm", "InputError",
    "Jet", "OrthoFrame", "Poly", "PositivityError", "RawTensor", "SUITES",
    "StateDesc", "analytic_vector_series", "extended_inner_product",
    "frame_coefficients", "gns_build", "gns_matrix", "gns_vector",
    "gram_matrix", "hilbert_schmidt_check", "in_PVLambda", "jet_of",
    "pointwise_bracket", "positivity_check", "reconstruct", "run_suite",
    "seminorm", "star", "star_exponential_vector", "star_terms",
    "star_truncated", "sum_of_squares_decomposition", "symmetrize",
    "translate", "vee", "weighted_dot",
]
