"""Inequality engine for equivalent numbers and the closed-form exponents.

Given x* = (a x + b)/(c x + d) the engine certifies the relations between

    phi_i = max(|a x_i + b|, |c x_i + d|),
    f_i   = max(1, |x_i|) / phi_i,
    g_ij  = |x_i - x_j| / (max(1, |x_i|) max(1, |x_j|)),

and, under M(x*) <= M(x), the improved lower bound for the separation product
over sigma.  Exponent formulas are evaluated in exact rationals; the effective
ones, whose magnitudes overflow any float, are returned in log space.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import mpmath

from .embeddings import EmbeddingSet, SigmaSet, embeddings_via_moebius
from .intervals import Interval, Verdict, interval_product, working_precision
from .measures import mahler_measure, pair_distance, separation_product
from .moebius import _as_matrix
from .polynomial import discriminant, transform_poly
from .reports import ChainReport, ClaimReport, claim_eq, claim_ge, claim_le, with_refinement


class ShapeError(ValueError):
    """Sigma (or the degree) is outside the range where a bound applies."""


class HypothesisViolation(ValueError):
    """The transformed number has certified larger Mahler measure than the original."""


SHAPE_MESSAGE = ("the improved bound needs degree r >= 4 and either 2 <= |sigma| <= r-2 "
                 "or sigma = all labels except one complex label")


# -- per-pair quantities -------------------------------------------------------


@dataclass
class Lemma33Quantities:
    phi: List[Interval]
    f: List[Interval]
    g: Dict[Tuple[int, int], Interval]
    M: Interval
    M_star: Interval
    D: int
    r: int
    claims: List[ClaimReport] = field(default_factory=list)

    def G(self, i, j) -> Interval:
        return self.g[(min(i, j), max(i, j))]

    def F(self, i) -> Interval:
        return self.f[i - 1]

    @property
    def ratio(self) -> Interval:
        return self.M / self.M_star


def _sqrt_disc(D):
    return Interval.exact(abs(D)).sqrt()


def _tie_aware_order(q: Lemma33Quantities, i: int, j: int) -> Tuple[int, int]:
    """Return (small, large) by f; overlapping enclosures fall back to index order."""
    fi, fj = q.F(i), q.F(j)
    if fj.lt(fi) is Verdict.HOLDS:
        return j, i
    if fi.lt(fj) is Verdict.HOLDS:
        return i, j
    return (i, j) if i < j else (j, i)


def lemma33_quantities(embset: EmbeddingSet, m, D: Optional[int] = None) -> Lemma33Quantities:
    """phi, f, g for the pair (x, m x) with the identities and inequalities certified on the spot.

    M(x*) is taken from the embeddings of the transformed number, so the
    product identity for f compares two independent routes.
    """
    m = _as_matrix(m)
    if D is None:
        D = discriminant(embset.poly)
    r = embset.r
    target, _ = embeddings_via_moebius(embset, m)
    M = mahler_measure(embset)
    M_star = mahler_measure(target)
    sd = _sqrt_disc(D)
    with working_precision(max(embset.working_bits, target.working_bits)):
        boxes = embset.boxes()
        m1 = [abs(b).max(1) for b in boxes]
        phi = [abs(b * m.a + m.b).max(abs(b * m.c + m.d)) for b in boxes]
        f = [m1[k] / phi[k] for k in range(r)]
        g = {}
        for i in range(1, r + 1):
            for j in range(i + 1, r + 1):
                g[(i, j)] = pair_distance(embset, i, j) / (m1[i - 1] * m1[j - 1])
        q = Lemma33Quantities(phi, f, g, M, M_star, D, r)
        ratio = M / M_star
        claims = [
            claim_eq("prod f_i = M(x)/M(x*)", interval_product(f), ratio),
            claim_eq("prod_{i<j} g_ij = |D|^(1/2) / M(x)^(r-1)", interval_product(g.values()), sd / M ** (r - 1)),
            claim_eq("prod_{i<j} g_ij f_i f_j = |D|^(1/2) / M(x*)^(r-1)",
                     interval_product(g[(i, j)] * f[i - 1] * f[j - 1] for i, j in g), sd / M_star ** (r - 1)),
        ]
        for (i, j), gij in g.items():
            claims.append(claim_le(f"g_{i}{j} <= 2", gij, 2))
            claims.append(claim_le(f"g_{i}{j} f_{i} f_{j} <= 2", gij * f[i - 1] * f[j - 1], 2))
        root_ratio = ratio.root(r)
        for (i, j), gij in g.items():
            lo, hi = _tie_aware_order(q, i, j)
            claims.append(claim_le(f"g_{lo}{hi} f_{lo} (M(x)/M(x*))^(1/r) <= 4 [f_{lo} <= f_{hi}]",
                                   gij * f[lo - 1] * root_ratio, 4))
    q.claims = claims
    return q


# -- pair-set combinatorics ----------------------------------------------------


def pair_set_A(l: int) -> List[Tuple[int, int]]:
    """All (i, j) with 2 <= i < j <= min(2i - 1, l + 1)."""
    return [(i, j) for i in range(2, l + 2) for j in range(i + 1, min(2 * i - 1, l + 1) + 1)]


def pair_set_A_size(l: int) -> int:
    """Closed form: l^2/4 for even l, (l^2 - 1)/4 for odd l."""
    return l * l // 4


def check_pair_set(l: int) -> Dict[str, bool]:
    A = pair_set_A(l)
    partners = [frozenset((2 * i - j, i)) for i, j in A]
    return {
        "size_formula": len(A) == pair_set_A_size(l),
        "size_lower_bound": Fraction(len(A)) >= Fraction(2 * l * l, 9),
        "partner_sets_distinct": len(set(partners)) == len(partners),
        "partners_in_range": all(1 <= 2 * i - j < i < j <= l + 1 for i, j in A),
    }


# -- the improved separation bound ---------------------------------------------


def sigma_shape(embset: EmbeddingSet, sigma: SigmaSet) -> str:
    """'small' for 2 <= |sigma| <= r-2, 'omit-complex' for all-but-one-complex; else ShapeError."""
    r = embset.r
    s = len(sigma)
    if r < 4:
        raise ShapeError(f"{SHAPE_MESSAGE}; got degree {r}")
    if 2 <= s <= r - 2:
        return "small"
    omitted = [k for k in embset.labels if k not in sigma.indices]
    if s == r - 1 and not embset.is_real(omitted[0]):
        return "omit-complex"
    raise ShapeError(f"{SHAPE_MESSAGE}; got |sigma|={s}, r={r}"
                     + (f", omitted label {omitted[0]} is real" if s == r - 1 else ""))


def _hypothesis(q: Lemma33Quantities, exact_equal: bool) -> ClaimReport:
    if exact_equal:
        return ClaimReport("M(x*) <= M(x) (same polynomial)", q.M_star, q.M, "<=", Verdict.HOLDS)
    return claim_le("M(x*) <= M(x)", q.M_star, q.M)


def _lemma33_chain(embset, m, sigma, D, exact_equal):
    q = lemma33_quantities(embset, m, D)
    r = q.r
    s = len(sigma)
    shape = sigma_shape(embset, sigma)
    links = [_hypothesis(q, exact_equal)]
    if links[0].verdict is Verdict.FAILS:
        raise HypothesisViolation(
            f"M(x*) in [{q.M_star.lower_float()}, {q.M_star.upper_float()}] exceeds M(x) in "
            f"[{q.M.lower_float()}, {q.M.upper_float()}]")
    links.extend(q.claims)
    u = Fraction(4 * (r - s) ** 2, 9 * r)
    info = {"shape": shape, "u": str(u), "D": D, "sigma": list(sigma.indices)}
    with working_precision(max(embset.working_bits, 128)):
        sd = _sqrt_disc(D)
        ratio = q.ratio
        Mr = q.M ** (r - 1)
        Msr = q.M_star ** (r - 1)
        outside = [(i, j) for (i, j) in q.g if not (i in sigma.indices and j in sigma.indices)]
        inv_outside = interval_product(1 / q.g[p] for p in outside)
        S = separation_product(embset, sigma)
        inside = interval_product(q.g[p] for p in sigma.pairs())
        links.append(claim_ge("S over sigma >= prod over sigma of g_ij", S, inside))
        if shape == "small":
            l = r - s
            j0 = sigma.indices[0]
            chosen = [j0] + [k for k in embset.labels if k not in sigma.indices]
            # sort by f; midpoint order with index tiebreak (ties are measure-zero and harmless)
            chosen.sort(key=lambda k: (q.F(k).mid_float(), k))
            lab = {pos + 1: k for pos, k in enumerate(chosen)}
            A = pair_set_A(l)
            A_labels = [tuple(sorted((lab[i], lab[j]))) for i, j in A]
            B_count = len(outside) - len(A)
            info.update(l=l, A=[list(a) for a in A_labels], B_size=B_count,
                        A_checks=check_pair_set(l), sorted_labels=chosen)
            partner = interval_product(q.G(lab[2 * i - j], lab[i]) * q.F(lab[2 * i - j]) * q.F(lab[i])
                                       for i, j in A)
            links.append(claim_ge(
                "prod outside sigma g_ij^-1 >= 2^(-|B|-4|A|) (M/M*)^(2|A|/r) prod_A g f f",
                inv_outside,
                Interval.exact(2) ** (-B_count - 4 * len(A)) * ratio ** Fraction(2 * len(A), r) * partner))
            links.append(claim_ge("prod_A g f f >= 2^(|A| - r(r-1)/2) |D|^(1/2) / M*^(r-1)",
                                  partner, Interval.exact(2) ** (len(A) - r * (r - 1) // 2) * sd / Msr))
        else:
            i0 = next(k for k in embset.labels if k not in sigma.indices)
            i1 = embset.pairing[i0]
            g01 = q.G(i0, i1)
            gff = g01 * q.F(i0) * q.F(i1)
            info.update(omitted=i0, partner=i1)
            links.append(claim_ge("prod_{j != i0} g_{i0 j}^-1 >= 2^(2-r) g_{i0 i1}^-1",
                                  inv_outside, Interval.exact(2) ** (2 - r) / g01))
            links.append(claim_ge("g_{i0 i1}^-1 >= (1/16) (M/M*)^(2/r) g f_{i0} f_{i1}",
                                  1 / g01, gff * ratio ** Fraction(2, r) / 16))
            links.append(claim_ge("g f_{i0} f_{i1} >= 2^(1 - r(r-1)/2) |D|^(1/2) / M*^(r-1)",
                                  gff, Interval.exact(2) ** (1 - r * (r - 1) // 2) * sd / Msr))
        scale = Interval.exact(2) ** (-2 * r * r)
        improvement = sd / Msr * ratio ** u
        links.append(claim_ge("prod outside sigma g_ij^-1 >= 2^(-2r^2) |D|^(1/2) / M*^(r-1) (M/M*)^u",
                              inv_outside, scale * improvement))
        final_rhs = scale * sd / Mr * improvement.max(1)
        links.append(claim_ge("S over sigma >= 2^(-2r^2) |D|^(1/2) / M^(r-1) max(1, |D|^(1/2) / M*^(r-1) (M/M*)^u)",
                              S, final_rhs))
    return ChainReport("improved separation bound for sigma", links, embset.precision_bits, info)


def verify_lemma33(embset: EmbeddingSet, m, sigma: SigmaSet, D: Optional[int] = None,
                   max_bits: int = 2048) -> ChainReport:
    """Certify the improved lower bound for S over sigma and every intermediate step.

    Raises ShapeError for sigma outside the admissible shapes and
    HypothesisViolation when M(m x) > M(x) is certified.
    """
    m = _as_matrix(m)
    sigma.check(embset.r)
    sigma_shape(embset, sigma)
    if D is None:
        D = discriminant(embset.poly)
    exact_equal = transform_poly(embset.poly, m) == embset.poly
    report, _ = with_refinement(embset, lambda e: _lemma33_chain(e, m, sigma, D, exact_equal), max_bits)
    return report


# -- exponent formulas ---------------------------------------------------------


def kappa_upper_ineffective(r: int, sigma_size: int, omitted_complex: Optional[bool] = None) -> Fraction:
    """r - 1 - (r - |sigma|)^2 / (135 r).

    For |sigma| = r - 1 the bound applies only when the omitted label is complex;
    ``omitted_complex=None`` takes that case as given.
    """
    r, s = int(r), int(sigma_size)
    if r < 4:
        raise ShapeError(f"{SHAPE_MESSAGE}; got degree {r}")
    if not (2 <= s <= r - 2 or (s == r - 1 and omitted_complex is not False)):
        raise ShapeError(f"{SHAPE_MESSAGE}; got |sigma|={s}, r={r}")
    return Fraction(r - 1) - Fraction((r - s) ** 2, 135 * r)


@dataclass(frozen=True)
class KappaParams:
    r: int
    sigma_size: int
    a_exp: Fraction
    field_disc_abs: Optional[int] = None
    c_constants: Dict[str, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "a_exp", Fraction(self.a_exp))
        if self.r < 3 or not 2 <= self.sigma_size <= self.r:
            raise ShapeError(f"need r >= 3 and 2 <= |sigma| <= r, got r={self.r}, |sigma|={self.sigma_size}")
        if self.a_exp <= 0:
            raise ValueError("the discriminant exponent must be positive")

    @property
    def u(self) -> Fraction:
        return Fraction(4 * (self.r - self.sigma_size) ** 2, 9 * self.r)

    @classmethod
    def ineffective(cls, r: int, sigma_size: int) -> "KappaParams":
        return cls(r, sigma_size, Fraction(21, r - 1))


def kappa_from_theta(params: KappaParams) -> Tuple[Fraction, Fraction]:
    """theta = 1/(2(r-1+u) a - 1), which cancels the exponent on M(x*); kappa = r - 1 - theta u."""
    r, u, a = params.r, params.u, params.a_exp
    den = 2 * (r - 1 + u) * a - 1
    if den <= 0:
        raise ValueError(f"theta denominator {den} is not positive")
    theta = 1 / den
    return theta, r - 1 - theta * u


DEFAULT_CONSTANTS = {f"c{k}": Fraction(1) for k in range(1, 9)}


@dataclass(frozen=True)
class LogMagnitude:
    """A quantity sign * exp(log_abs), kept in logs because it overflows floats."""

    sign: int
    log_abs: float

    def to_json(self):
        return {"sign": self.sign, "log_abs": self.log_abs}


def _loglog(c, e, r, D, k):
    """log((c r)^(e r^4) |D|^(k r^3)) = e r^4 log(c r) + k r^3 log |D|."""
    with mpmath.workprec(80):
        val = mpmath.mpf(e.numerator) / e.denominator * r ** 4 * mpmath.log(mpmath.mpf(c.numerator) / c.denominator * r)
        val += k * r ** 3 * mpmath.log(D)
        return float(val)


def effective_exponents(params: KappaParams) -> Dict[str, object]:
    """Parametric effective exponents from placeholder-able absolute constants.

    Returns log-magnitudes of kappa - (r - 1), of log C(K), of log A_2(K) and
    of a(K).  Every value depends on the supplied constants and is labelled
    parametric.
    """
    if params.field_disc_abs is None:
        raise ValueError("the effective exponents need |D_K| (field_disc_abs)")
    consts = dict(DEFAULT_CONSTANTS)
    consts.update({k: Fraction(v) for k, v in params.c_constants.items()})
    missing = [k for k in DEFAULT_CONSTANTS if consts.get(k) is None]
    if missing:
        raise ValueError(f"missing constants {missing}")
    r, DK = params.r, params.field_disc_abs
    if DK < 1:
        raise ValueError("|D_K| must be a positive integer")
    c = consts
    gap = LogMagnitude(-1, -_loglog(c["c1"], c["c2"], r, DK, 6))
    return {
        "parametric": True,
        "constants": {k: str(v) for k, v in sorted(c.items())},
        "r": r,
        "field_disc_abs": DK,
        "kappa_base": r - 1,
        # kappa - (r-1) = -(c1 r)^(-c2 r^4) |D_K|^(-6 r^3)
        "kappa_minus_base": gap,
        # log C(K) = -(c3 r)^(c4 r^4) |D_K|^(2 r^3)
        "log_C": LogMagnitude(-1, _loglog(c["c3"], c["c4"], r, DK, 2)),
        # log A_2(K) = (c5 r)^(c6 r^4) |D_K|^(8 r^3)
        "log_A2": LogMagnitude(1, _loglog(c["c5"], c["c6"], r, DK, 8)),
        # a(K) = (c7 r)^(c8 r^4) |D_K|^(6 r^3)
        "a_K": LogMagnitude(1, _loglog(c["c7"], c["c8"], r, DK, 6)),
    }


def theoretical_kappa(embset: EmbeddingSet, sigma: SigmaSet) -> Dict[str, str]:
    """Known value or upper bound for kappa(sigma) given the signature of the field."""
    r = embset.r
    s = len(sigma)
    omitted = [k for k in embset.labels if k not in sigma.indices]
    if r < 3:
        return {"kind": "unsupported", "value": None, "reason": "degree below 3"}
    if s == r:
        return {"kind": "exact", "value": str(Fraction(r - 1)), "reason": "sigma is every label"}
    if len(omitted) == 1 and embset.is_real(omitted[0]):
        return {"kind": "exact", "value": str(Fraction(r - 1)), "reason": "sigma omits one real label"}
    if r == 3:
        # s == 2 and the omitted label is complex: one real and one complex member
        return {"kind": "exact", "value": "2/3", "reason": "cubic, sigma pairs a real and a complex label"}
    omitted_complex = len(omitted) == 1
    return {"kind": "upper", "value": str(kappa_upper_ineffective(r, s, omitted_complex or None)),
            "reason": "improved bound through a minimal-measure representative (ineffective constant)"}


# -- cubic mixed-pair chain ----------------------------------------------------


def cubic_chain_check(embset: EmbeddingSet, sigma: Optional[SigmaSet] = None, max_bits: int = 1024) -> ChainReport:
    """Certify |x_i - x_j| >= 2^(-1/3) M^(-2/3) for a real i and complex j in a cubic."""
    if embset.r != 3 or embset.signature != (1, 1):
        raise ShapeError(f"the cubic chain needs degree 3 with one real root and one complex pair; "
                         f"got degree {embset.r}, signature {embset.signature}")
    if sigma is None:
        sigma = SigmaSet((embset.real_labels()[0], embset.complex_labels()[0]))
    kinds = sorted(embset.is_real(k) for k in sigma.indices)
    if len(sigma) != 2 or kinds != [False, True]:
        raise ShapeError("the cubic chain needs sigma = {one real label, one complex label}")
    i = next(k for k in sigma.indices if embset.is_real(k))
    j = next(k for k in sigma.indices if not embset.is_real(k))
    D = discriminant(embset.poly)

    def build(e):
        k = e.pairing[j]
        M = mahler_measure(e)
        with working_precision(e.working_bits):
            dij, dik, djk = pair_distance(e, i, j), pair_distance(e, i, k), pair_distance(e, j, k)
            half_prod = dij * dik * djk / 2
            a0 = e.poly.lead
            links = [
                claim_eq(f"|x_{i} - x_{k}| = |x_{i} - x_{j}|", dik, dij),
                claim_le(f"|x_{j} - x_{k}| <= 2 |x_{i} - x_{j}|", djk, dij * 2),
                claim_ge(f"|x_{i} - x_{j}|^3 >= (1/2) prod |x_a - x_b|", dij ** 3, half_prod),
                claim_eq("((1/2) prod |x_a - x_b|)^2 = (1/4) a0^-4 |D|", half_prod ** 2,
                         Interval.exact(Fraction(abs(D), 4 * a0 ** 4))),
                claim_ge(f"|x_{i} - x_{j}|^3 >= 1 / (2 M^2)", dij ** 3, 1 / (M * M * 2)),
                claim_ge(f"|x_{i} - x_{j}| >= 2^(-1/3) M^(-2/3)", dij, 1 / (M * M * 2).root(3)),
            ]
        return ChainReport("cubic mixed-pair separation", links, e.precision_bits,
                           {"sigma": [i, j], "D": D})

    report, _ = with_refinement(embset, build, max_bits)
    return report


# -- config --------------------------------------------------------------------


def load_config(path) -> Dict[str, Fraction]:
    """Read ``key = value`` lines (``#`` comments) with exact rational values."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for n, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{n}: expected key = value")
            try:
                out[key.strip()] = Fraction(value.strip())
            except (ValueError, ZeroDivisionError) as exc:
                raise ValueError(f"{path}:{n}: value {value.strip()!r} is not a rational number") from exc
    return out
