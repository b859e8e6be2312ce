"""Extremal witness families and exponent fitting.

Two constructions push the separation product down against the Mahler
measure inside one equivalence class:

* ``family_ad``: x -> 1/(x + d) for a growing integer d;
* ``family_aq``: the adapted-basis matrix of the body S(Q) for a growing Q.

Sigma always names labels of the *seed* conjugates.  The Möbius map carries
each seed enclosure to an enclosure of the transformed number, and the
separation product is taken over the images.
"""

from __future__ import annotations

import csv
import functools
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from .embeddings import LABEL_CONVENTION, AlgebraicNumber, PrecisionExhausted, SigmaSet, compute_embeddings, embeddings_via_moebius
from .intervals import Interval, Verdict, working_precision
from .lattice import lemma21_matrix
from .measures import mahler_measure, pair_distance, separation_product
from .moebius import UnimodularMatrix, mahler_via_forms
from .polynomial import IntPolynomial, try_certify_irreducible
from .reports import ClaimReport, claim_eq, claim_le

log = logging.getLogger(__name__)

CSV_COLUMNS = ["construction", "param", "logM_lo", "logM_hi", "logS_lo", "logS_hi", "sigma", "verdicts"]


@dataclass
class WitnessRecord:
    construction: str
    parameter: object
    matrix: UnimodularMatrix
    M: Interval
    S_sigma: Interval
    sigma: SigmaSet
    seed_poly: IntPolynomial
    target_poly: IntPolynomial
    precision_bits: int
    verdicts: Dict[str, str] = field(default_factory=dict)
    claims: List[ClaimReport] = field(default_factory=list)

    def csv_row(self):
        mlo, mhi = self.M.log_bounds()
        slo, shi = self.S_sigma.log_bounds()
        verdicts = ";".join(f"{k}={v}" for k, v in sorted(self.verdicts.items()))
        return [self.construction, str(self.parameter), repr(mlo), repr(mhi), repr(slo), repr(shi),
                str(self.sigma), verdicts]

    def to_json(self):
        return {
            "construction": self.construction,
            "param": str(self.parameter),
            "matrix": self.matrix.to_json(),
            "seed_poly": list(self.seed_poly.coeffs),
            "target_poly": list(self.target_poly.coeffs),
            "sigma": list(self.sigma.indices),
            "label_convention": LABEL_CONVENTION,
            "precision_bits": self.precision_bits,
            "M": self.M.to_json(),
            "S_sigma": self.S_sigma.to_json(),
            "verdicts": dict(sorted(self.verdicts.items())),
            "claims": [c.to_json() for c in self.claims],
        }


class WitnessBatch(list):
    """Records of one family run, plus the parameters that were skipped or rejected."""

    def __init__(self, records=(), skipped=None):
        super().__init__(records)
        self.skipped = list(skipped or [])


def records_to_csv(records: Iterable[WitnessRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow(rec.csv_row())
    return buf.getvalue()


def as_fraction(x) -> Fraction:
    """Exact rational from an int, Fraction, decimal string or float (via its shortest repr)."""
    return Fraction(str(x)) if isinstance(x, float) else Fraction(x)


def _transformed(seed: AlgebraicNumber, m: UnimodularMatrix, sigma: SigmaSet):
    target, perm = embeddings_via_moebius(seed.embset, m)
    return target, sigma.map(perm)


def witness_record(seed: AlgebraicNumber, m: UnimodularMatrix, sigma: SigmaSet,
                   construction="custom", parameter=None) -> WitnessRecord:
    """Certified (M, S_sigma) for the number m(seed); reproducible from its inputs alone."""
    sigma.check(seed.degree)
    target, tsigma = _transformed(seed, m, sigma)
    return WitnessRecord(
        construction, parameter, m, mahler_measure(target), separation_product(target, tsigma), sigma,
        seed.poly, target.poly, seed.embset.precision_bits,
    )


def reproduce(record: WitnessRecord) -> WitnessRecord:
    """Recompute M and S from the recorded inputs; family-specific verdicts are not re-run."""
    seed = AlgebraicNumber(compute_embeddings(record.seed_poly, record.precision_bits))
    return witness_record(seed, record.matrix, record.sigma, record.construction, record.parameter)


def _map(fn, items, jobs):
    """Order-preserving map, across processes when jobs > 1; records do not depend on jobs."""
    items = list(items)
    if jobs is None or jobs <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _ad_point(seed, sigma, d):
    m = UnimodularMatrix(0, 1, 1, d)
    try:
        rec = witness_record(seed, m, sigma, "family-ad", d)
    except PrecisionExhausted as exc:
        return d, str(exc)
    with working_precision(seed.embset.working_bits):
        forms = mahler_via_forms(seed.embset, m)
    rec.verdicts["mahler_two_routes"] = rec.M.consistent_with(forms).value
    return rec


def family_ad(seed: AlgebraicNumber, d_values: Sequence[int], sigma: SigmaSet, jobs: int = 1) -> WitnessBatch:
    """Records for x_d = 1/(x + d) over the given nonzero integers d."""
    if seed.degree < 3:
        raise ValueError("the witness families need a seed of degree >= 3")
    sigma.check(seed.degree)
    ds = [int(d) for d in d_values]
    if 0 in ds:
        raise ValueError("d must be nonzero")
    batch = WitnessBatch()
    for out in _map(functools.partial(_ad_point, seed, sigma), ds, jobs):
        if isinstance(out, WitnessRecord):
            batch.append(out)
        else:
            log.warning("family-ad: skipping d=%d (%s)", *out)
            batch.skipped.append(out)
    return batch


def _aq_chain(seed: AlgebraicNumber, m: UnimodularMatrix, real_label: int, delta: Fraction, Q: Fraction, rec):
    """Explicit-constant version of the upper bounds behind the Q-family.

    C = prod_{i<j, i,j != real} |x_i - x_j| and the certified window
    |x_i c + d| >= Q^(1-delta) give S <= C Q^(-(r-1)(r-2)(1-delta)); the windows
    also bracket M through the forms product.
    """
    emb = seed.embset
    r = emb.r
    others = [k for k in emb.labels if k != real_label]
    with working_precision(emb.working_bits):
        C = Interval.exact(1)
        prod = Interval.exact(1)
        for x, i in enumerate(others):
            for j in others[x + 1:]:
                dist = pair_distance(emb, i, j)
                C = C * dist
                den = abs(emb.conjugate(i) * m.c + m.d) * abs(emb.conjugate(j) * m.c + m.d)
                prod = prod * (dist / den)
        Qi = Interval.exact(Q)
        expo = -(r - 1) * (r - 2) * (1 - delta)
        a0 = emb.poly.lead
        m_lo = Qi ** (-1 - delta) * Qi ** ((r - 1) * (1 - delta)) * a0
        m_hi = Qi ** (-1 + delta) * Qi ** ((r - 1) * (1 + delta)) * a0
        claims = [
            claim_eq("S over sigma = prod |x_i - x_j| / (|x_i c + d| |x_j c + d|)", rec.S_sigma, prod),
            claim_le("S over sigma <= C Q^(-(r-1)(r-2)(1-delta))", rec.S_sigma, C * Qi ** expo),
            ClaimReport("M >= a0 Q^(-1-delta) Q^((r-1)(1-delta))", rec.M, m_lo, ">=", rec.M.ge(m_lo)),
            claim_le("M <= a0 Q^(-1+delta) Q^((r-1)(1+delta))", rec.M, m_hi),
        ]
    return claims, C


def family_aq(seed: AlgebraicNumber, real_label: int, q_ladder: Sequence, delta,
              sigma: Optional[SigmaSet] = None, jobs: int = 1) -> WitnessBatch:
    """Records for the adapted-basis numbers at every ladder point that passes the window check.

    Ladder points whose matrix fails the window inequalities are listed in
    ``batch.skipped`` with the failing claims and excluded from the records.
    """
    emb = seed.embset
    r = emb.r
    if r < 3:
        raise ValueError("the witness families need a seed of degree >= 3")
    if not emb.is_real(real_label):
        raise ValueError(f"label {real_label} is not a real conjugate; this family omits a real label")
    expected = SigmaSet(tuple(k for k in emb.labels if k != real_label))
    if sigma is None:
        sigma = expected
    if sigma != expected:
        raise ValueError(f"this family needs sigma = all labels except {real_label}, got {sigma}")
    delta = as_fraction(delta)
    batch = WitnessBatch()
    point = functools.partial(_aq_point, seed, real_label, delta, sigma)
    for out in _map(point, [Fraction(Q) for Q in q_ladder], jobs):
        if isinstance(out, WitnessRecord):
            batch.append(out)
        else:
            batch.skipped.append(out)
    return batch


def _aq_point(seed, real_label, delta, sigma, Q):
    m, report = lemma21_matrix(seed.embset, real_label, Q, delta)
    if report.verdict is not Verdict.HOLDS:
        return Q, report.failed()
    try:
        rec = witness_record(seed, m, sigma, "family-aq", Q)
    except PrecisionExhausted as exc:
        return Q, [str(exc)]
    rec.verdicts["window"] = report.verdict.value
    rec.verdicts["minimal_certified"] = str(report.basis.minimal_certified).lower()
    claims, _ = _aq_chain(seed, m, real_label, delta, Q, rec)
    rec.claims.extend(claims)
    rec.verdicts["explicit_chain"] = Verdict.combine(c.verdict for c in claims).value
    return rec


def dominated_by_power(rec: WitnessRecord, r: int, delta_prime) -> ClaimReport:
    """S over sigma <= M^(1 - r + delta')."""
    e = 1 - r + as_fraction(delta_prime)
    rhs = rec.M ** e
    return claim_le(f"S over sigma <= M^({e})", rec.S_sigma, rhs)


@dataclass
class ExponentFit:
    slope: float
    intercept: float
    residual_max: float
    points: int
    max_rel_width: float
    certified: bool

    def to_json(self):
        return dict(slope=self.slope, intercept=self.intercept, residual_max=self.residual_max,
                    points=self.points, max_rel_width=self.max_rel_width, certified=self.certified)


def fit_loglog(xs: Sequence[float], ys: Sequence[float], widths: Sequence[float] = ()) -> ExponentFit:
    """Least-squares line through (log x, log y) pairs given already in log form."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) < 3:
        raise ValueError("an exponent fit needs at least 3 points")
    if np.ptp(xs) == 0:
        raise ValueError("all abscissae are equal; the fit is degenerate")
    A = np.vstack([xs, np.ones_like(xs)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, ys, rcond=None)
    resid = float(np.max(np.abs(A @ np.array([slope, intercept]) - ys)))
    worst = max(widths) if len(widths) else 0.0
    return ExponentFit(float(slope), float(intercept), resid, len(xs), worst, worst <= 0.01)


def fit_exponent(records: Sequence[WitnessRecord]) -> ExponentFit:
    """Slope of log S against log M, so that S ~ C M^slope.

    Midpoints are fitted; the fit is flagged uncertified when some enclosure
    is wider than 1% of its value.
    """
    if len(records) < 3:
        raise ValueError("an exponent fit needs at least 3 records")
    xs = [rec.M.log_mid() for rec in records]
    ys = [rec.S_sigma.log_mid() for rec in records]
    widths = [max(rec.M.relative_width(), rec.S_sigma.relative_width()) for rec in records]
    return fit_loglog(xs, ys, widths)


def growth_exponent(records: Sequence[WitnessRecord]) -> ExponentFit:
    """Slope of log M against log(parameter): the growth rate of M along a family."""
    xs = [math.log(abs(Fraction(rec.parameter))) for rec in records]
    ys = [rec.M.log_mid() for rec in records]
    widths = [rec.M.relative_width() for rec in records]
    return fit_loglog(xs, ys, widths)


def default_d_ladder():
    return [2 ** k for k in range(1, 15)]


def default_q_ladder():
    return [Fraction(10) ** k for k in range(2, 9)]


def estimate_kappa(seed_poly: IntPolynomial, sigma: SigmaSet, strategy: str = "auto", budget=None,
                   precision_bits: int = 128) -> dict:
    """Empirical lower-bound trend for kappa(sigma) from the applicable witness families.

    ``strategy`` is one of "auto", "family-ad", "family-aq", "none".  ``budget``
    may carry ``d_ladder``, ``q_ladder`` and ``delta``.  The theoretical values
    come from :func:`conjsep.bounds.theoretical_kappa`.  kappa is only defined for
    irreducible seeds; when irreducibility is not certified the estimate still
    runs but ``irreducibility`` says so and the note flags it.
    """
    from .bounds import theoretical_kappa

    budget = dict(budget or {})
    seed = AlgebraicNumber(compute_embeddings(seed_poly, precision_bits))
    emb = seed.embset
    sigma.check(emb.r)
    theory = theoretical_kappa(emb, sigma)
    omitted = [k for k in emb.labels if k not in sigma.indices]
    mixed_cubic = (emb.r == 3 and len(sigma) == 2
                   and sorted(emb.is_real(k) for k in sigma.indices) == [False, True])
    families = []
    if strategy in ("auto", "family-ad") and (len(sigma) == emb.r or mixed_cubic):
        families.append("family-ad")
    if strategy in ("auto", "family-aq") and len(omitted) == 1 and emb.is_real(omitted[0]):
        families.append("family-aq")
    fits = {}
    for fam in families:
        if fam == "family-ad":
            batch = family_ad(seed, budget.get("d_ladder", default_d_ladder()), sigma)
        else:
            batch = family_aq(seed, omitted[0], budget.get("q_ladder", default_q_ladder()),
                              budget.get("delta", Fraction(3, 10)), sigma)
        if len(batch) >= 3:
            fits[fam] = fit_exponent(batch)
        else:
            log.warning("%s produced only %d usable records", fam, len(batch))
    empirical = max((-f.slope for f in fits.values()), default=None)
    irred = try_certify_irreducible(seed_poly)
    notes = []
    if not families:
        notes.append("no witness family applies to this sigma; theoretical bounds only")
    if not irred.certified:
        notes.append("irreducibility not certified; kappa is undefined if the polynomial is reducible")
    return {
        "poly": list(seed_poly.coeffs),
        "sigma": list(sigma.indices),
        "label_convention": LABEL_CONVENTION,
        "signature": list(emb.signature),
        "irreducibility": irred.status,
        "families": families,
        "fits": {k: v.to_json() for k, v in fits.items()},
        "empirical_kappa": empirical,
        "theoretical": theory,
        "note": "; ".join(notes) or None,
    }
