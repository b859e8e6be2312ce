"""Certified bounds for products of differences of conjugates of algebraic numbers."""

from .bounds import (
    KappaParams,
    cubic_chain_check,
    effective_exponents,
    kappa_from_theta,
    kappa_upper_ineffective,
    lemma33_quantities,
    verify_lemma33,
)
from .embeddings import AlgebraicNumber, EmbeddingSet, SigmaSet, compute_embeddings, refine, track_root
from .intervals import CBox, Interval, Verdict, working_precision
from .lattice import ConvexBodyS, adapted_basis, gauge, lemma21_matrix
from .measures import disc_product_identity, mahler_measure, separation_product, verify_trivial_chain
from .moebius import UnimodularMatrix, apply, mahler_via_forms, reduce_class
from .polynomial import IntPolynomial, discriminant, normalize, transform_poly, try_certify_irreducible
from .witnesses import estimate_kappa, family_ad, family_aq, fit_exponent

__version__ = "0.1.0"

__all__ = [
    "AlgebraicNumber", "CBox", "ConvexBodyS", "EmbeddingSet", "IntPolynomial", "Interval", "KappaParams",
    "SigmaSet", "UnimodularMatrix", "Verdict", "adapted_basis", "apply", "compute_embeddings",
    "cubic_chain_check", "disc_product_identity", "discriminant", "effective_exponents", "estimate_kappa",
    "family_ad", "family_aq", "fit_exponent", "gauge", "kappa_from_theta", "kappa_upper_ineffective",
    "lemma21_matrix", "lemma33_quantities", "mahler_measure", "mahler_via_forms", "normalize",
    "reduce_class", "refine", "separation_product", "track_root", "transform_poly",
    "try_certify_irreducible", "verify_lemma33", "verify_trivial_chain", "working_precision",
]
