"""Mahler measure, separation products over a label set, and the elementary
lower bound chain relating them to the discriminant."""

from __future__ import annotations

from .embeddings import EmbeddingSet, SigmaSet
from .intervals import Interval, interval_product, working_precision
from .polynomial import discriminant
from .reports import ChainReport, claim_eq, claim_ge, with_refinement

CertifiedValue = Interval


class InconsistencyError(AssertionError):
    """Exact and certified-numeric routes disagree: a bug, never a precision issue."""


def _max1(box):
    return abs(box).max(1)


def mahler_measure(embset: EmbeddingSet) -> CertifiedValue:
    """Enclosure of a0 * prod max(1, |x_i|)."""
    with working_precision(embset.working_bits):
        return Interval.exact(embset.poly.lead) * interval_product(_max1(b) for b in embset.boxes())


def pair_distance(embset: EmbeddingSet, i: int, j: int) -> CertifiedValue:
    if i == j:
        raise ValueError("pair distance needs two different labels")
    with working_precision(embset.working_bits):
        return abs(embset.conjugate(i) - embset.conjugate(j))


def separation_product(embset: EmbeddingSet, sigma: SigmaSet) -> CertifiedValue:
    """Enclosure of the product of |x_i - x_j| over all 2-element subsets of sigma."""
    sigma.check(embset.r)
    with working_precision(embset.working_bits):
        boxes = embset.boxes()
        return interval_product(abs(boxes[i - 1] - boxes[j - 1]) for i, j in sigma.pairs())


def _normalized_pair_product(embset):
    """prod_{i<j} |x_i - x_j| / (2 max(1,|x_i|) max(1,|x_j|))."""
    boxes = embset.boxes()
    m1 = [_max1(b) for b in boxes]
    r = embset.r
    out = Interval.exact(1)
    for i in range(r):
        for j in range(i + 1, r):
            out = out * (abs(boxes[i] - boxes[j]) / (m1[i] * m1[j] * 2))
    return out


def _trivial_chain(embset, sigma, D):
    r = embset.r
    S = separation_product(embset, sigma)
    M = mahler_measure(embset)
    with working_precision(embset.working_bits):
        P = _normalized_pair_product(embset)
        scale = Interval.exact(2) ** (-r * (r - 1))
        # squared forms keep |D|^(1/2) out of the comparison
        disc_side_sq = scale * abs(D) * M ** (2 - 2 * r)
        floor_sq = scale * M ** (2 - 2 * r)
        links = [
            claim_ge("S >= prod |x_i - x_j| / (2 max(1,|x_i|) max(1,|x_j|))", S, P),
            claim_eq("(normalized pair product)^2 = 2^(-r(r-1)) |D| M^(2-2r)", P ** 2, disc_side_sq),
            claim_ge("|D| >= 1", Interval.exact(abs(D)), 1),
            claim_ge("S^2 >= 2^(-r(r-1)) |D| M^(2-2r)", S ** 2, disc_side_sq),
            claim_ge("S^2 >= 2^(-r(r-1)) M^(2-2r)", S ** 2, floor_sq),
        ]
    return ChainReport(
        "separation product over sigma dominates 2^(-r(r-1)/2) |D|^(1/2) M^(1-r)",
        links,
        embset.precision_bits,
        info={"sigma": list(sigma.indices), "D": D, "r": r},
    )


def verify_trivial_chain(embset: EmbeddingSet, sigma: SigmaSet, D: int = None, max_bits: int = 4096) -> ChainReport:
    """Certify each link of the elementary lower bound for the separation product.

    Indeterminate links trigger refinement up to ``max_bits`` before being
    reported as indeterminate.
    """
    sigma.check(embset.r)
    if D is None:
        D = discriminant(embset.poly)
    report, _ = with_refinement(embset, lambda e: _trivial_chain(e, sigma, D), max_bits)
    return report


def disc_product_identity(embset: EmbeddingSet, D: int = None):
    """Check that a0^(2r-2) prod_{i<j} |x_i - x_j|^2 encloses the exact |D|."""
    if D is None:
        D = discriminant(embset.poly)
    r = embset.r
    with working_precision(embset.working_bits):
        prod = separation_product(embset, SigmaSet.full(r)) ** 2
        lhs = Interval.exact(embset.poly.lead) ** (2 * r - 2) * prod
    report = claim_eq("a0^(2r-2) prod_{i<j} |x_i - x_j|^2 = |D|", lhs, Interval.exact(abs(D)))
    if not lhs.contains(abs(D)):
        raise InconsistencyError(f"certified product {lhs!r} excludes |D| = {abs(D)} for {embset.poly}")
    return report
