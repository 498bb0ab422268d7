"""Exact exponential-polynomial algebra and checkers for functional equations
whose solutions are polynomials."""

from .bivar import (
    BiExpPolynomial,
    block_difference,
    compose_linear,
    reduction_cascade,
    separable_rank,
    separated_membership,
    tensor,
)
from .errors import HypothesisError, SoundnessViolation
from .exppoly import ExpPolynomial, Frequency, Polynomial, classify, evaluate, normal_form, render
from .linalg import RationalMatrix
from .operators import (
    UnivariatePoly,
    apply_q_of_translation,
    difference_pow,
    dilate,
    translate,
    translate_span,
    translation_min_poly,
)
from .scalar import ExpCoeff, GaussianRational, NonExactError

__version__ = "0.1.0"

__all__ = [
    "BiExpPolynomial", "ExpCoeff", "ExpPolynomial", "Frequency", "GaussianRational",
    "HypothesisError", "NonExactError", "Polynomial", "RationalMatrix", "SoundnessViolation",
    "UnivariatePoly", "apply_q_of_translation", "block_difference", "classify", "compose_linear",
    "difference_pow", "dilate", "evaluate", "normal_form", "reduction_cascade", "render",
    "separable_rank", "separated_membership", "tensor", "translate", "translate_span",
    "translation_min_poly",
]
