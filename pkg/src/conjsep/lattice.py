"""Successive minima of the planar convex body

    S(Q) = { (x, y) : Q |alpha x + y| <= 1,  |beta_i x + y| / Q <= 1 }

and the unimodular matrices built from an adapted basis.

The search is certified.  Each linear form L_j appearing in the proxy
quadratic form q = sum_j L_j^2 satisfies L_j^2 <= gauge^2, so
q <= (n + 1) gauge^2.  Every lattice vector of gauge at most t therefore
lies in the ellipse q <= (n + 1) t^2, and that ellipse is enumerated
completely in a reduced basis of q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Sequence, Tuple

from mpmath.libmp import mpf_floor, to_int

from .embeddings import EmbeddingSet
from .intervals import CBox, Interval, Verdict, mpf_to_fraction, working_precision
from .moebius import UnimodularMatrix
from .reports import ClaimReport, claim_le

Vector = Tuple[int, int]


class EnumerationOverflow(RuntimeError):
    """The certified enumeration region holds more points than the configured limit."""


@dataclass(frozen=True)
class ConvexBodyS:
    alpha: Interval
    betas: Tuple[CBox, ...]
    Q: Fraction
    working_bits: int = 256

    def __post_init__(self):
        object.__setattr__(self, "Q", Fraction(self.Q))
        object.__setattr__(self, "betas", tuple(self.betas))
        if self.Q <= 1:
            raise ValueError("the scale Q must exceed 1")
        if not self.betas:
            raise ValueError("need at least one point beta besides alpha")
        a = CBox(self.alpha)
        for i, b in enumerate(self.betas):
            if b.overlaps(a):
                raise ValueError(f"beta_{i + 1} is not certified distinct from alpha")
            for c in self.betas[i + 1:]:
                if b.overlaps(c):
                    raise ValueError("betas are not certified pairwise distinct")

    @classmethod
    def from_embeddings(cls, embset: EmbeddingSet, real_label: int, Q) -> "ConvexBodyS":
        if not embset.is_real(real_label):
            raise ValueError(f"label {real_label} is not a real conjugate")
        boxes = embset.boxes()
        alpha = boxes[real_label - 1].re
        betas = [b for k, b in enumerate(boxes, start=1) if k != real_label]
        return cls(alpha, tuple(betas), Fraction(Q), embset.working_bits)

    @property
    def n(self):
        return len(self.betas)

    def forms(self, v: Vector) -> List[Interval]:
        """Values of the real linear forms whose squares sum to the proxy form."""
        x, y = v
        Q = Interval.exact(self.Q)
        out = [(self.alpha * x + y) * Q]
        for b in self.betas:
            out.append((b.re * x + y) / Q)
            out.append((b.im * x) / Q)
        return out

    def gauge(self, v: Vector) -> Interval:
        return gauge(self, v)

    def area_lower_bound(self) -> Interval:
        """Certified lower bound for the area, from an inscribed parallelogram."""
        with working_precision(self.working_bits):
            Q = Interval.exact(self.Q)
            dmax = Interval.exact(0)
            for b in self.betas:
                dmax = dmax.max(abs(b - CBox(self.alpha)))
            area = (Q - 1 / Q) * 4 / (Q * dmax)
        return Interval(area.lo)


def gauge(body: ConvexBodyS, v: Vector) -> Interval:
    """max(Q |alpha x + y|, max_i |beta_i x + y| / Q)."""
    x, y = v
    if x == 0 and y == 0:
        raise ValueError("gauge is evaluated on nonzero vectors only")
    with working_precision(body.working_bits):
        Q = Interval.exact(body.Q)
        out = abs(body.alpha * x + y) * Q
        for b in body.betas:
            out = out.max(abs(b * x + y) / Q)
    return out


@dataclass
class AdaptedBasis:
    v1: Vector
    v2: Vector
    lambda1: Interval
    lambda2: Interval
    minimal_certified: bool
    search_bound: Interval
    enumerated: int
    ties: List[Vector] = field(default_factory=list)

    @property
    def det(self):
        return self.v1[0] * self.v2[1] - self.v1[1] * self.v2[0]

    def matrix(self) -> UnimodularMatrix:
        return UnimodularMatrix(self.v1[0], self.v1[1], self.v2[0], self.v2[1])


def _combine(u: Vector, v: Vector, l: int, k: int) -> Vector:
    return (l * u[0] + k * v[0], l * u[1] + k * v[1])


def _gauss_reduce(forms: Sequence[Tuple[Fraction, Fraction]]) -> Tuple[Vector, Vector]:
    """Lagrange-Gauss reduction of the positive form sum (p x + q y)^2 with exact rationals."""

    def ip(u, v):
        return sum((p * u[0] + q * u[1]) * (p * v[0] + q * v[1]) for p, q in forms)

    b1, b2 = (1, 0), (0, 1)
    if ip(b1, b1) > ip(b2, b2):
        b1, b2 = b2, b1
    while True:
        mu = round(ip(b1, b2) / ip(b1, b1))
        if mu:
            b2 = _combine(b2, b1, 1, -mu)
        if ip(b2, b2) < ip(b1, b1):
            b1, b2 = b2, b1
            continue
        return b1, b2


def _mid_forms(body: ConvexBodyS):
    with working_precision(body.working_bits):
        a = mpf_to_fraction(body.alpha.mid())
        Q = body.Q
        out = [(Q * a, Q)]
        for b in body.betas:
            out.append((mpf_to_fraction(b.re.mid()) / Q, 1 / Q))
            out.append((mpf_to_fraction(b.im.mid()) / Q, Fraction(0)))
    return out


def _floor_upper(x: Interval) -> int:
    return int(to_int(mpf_floor(x.hi)))


def _key(v: Vector, g: Interval):
    return (g.upper_float(), abs(v[0]) + abs(v[1]), v)


def adapted_basis(body: ConvexBodyS, max_points: int = 2_000_000) -> AdaptedBasis:
    """Shortest vector v1 under the gauge and the shortest completion v2 with det(v1, v2) = +-1."""
    b1, b2 = _gauss_reduce(_mid_forms(body))
    with working_precision(body.working_bits):
        t = gauge(body, b1).max(gauge(body, b2))
        t = Interval(t.hi)
        T = t * t * (body.n + 1)
        f1, f2 = body.forms(b1), body.forms(b2)
        g11 = sum((u * u for u in f1), Interval.exact(0))
        g22 = sum((w * w for w in f2), Interval.exact(0))
        # Cauchy-Binet avoids the cancellation in g11 g22 - g12^2
        det = Interval.exact(0)
        for i in range(len(f1)):
            for j in range(i + 1, len(f1)):
                minor = f1[i] * f2[j] - f1[j] * f2[i]
                det = det + minor * minor
        if det.le(0) is not Verdict.FAILS:
            raise EnumerationOverflow("proxy form not certified positive definite; raise the precision")
        lmax = _floor_upper((T * g22 / det).sqrt())
        kmax = _floor_upper((T * g11 / det).sqrt())
    if (2 * lmax + 1) * (2 * kmax + 1) > max_points:
        raise EnumerationOverflow(f"enumeration box {2 * lmax + 1} x {2 * kmax + 1} exceeds {max_points} points")
    found = []
    for l in range(0, lmax + 1):
        for k in range(-kmax, kmax + 1):
            if l == 0 and k <= 0:
                continue  # v and -v have the same gauge
            v = _combine(b1, b2, l, k)
            g = gauge(body, v)
            if g.le(t) is not Verdict.FAILS:
                found.append((v, g))
    v1, lam1 = min(found, key=lambda item: _key(*item))
    ties = [v for v, g in found if v != v1 and g.overlaps(lam1)]
    completions = [(v, g) for v, g in found if abs(v1[0] * v[1] - v1[1] * v[0]) == 1]
    v2, lam2 = min(completions, key=lambda item: _key(*item))
    if v1[0] * v2[1] - v1[1] * v2[0] < 0:
        v2 = (-v2[0], -v2[1])
    return AdaptedBasis(v1, v2, lam1, lam2, not ties, t, len(found), ties)


def minkowski_check(body: ConvexBodyS, basis: AdaptedBasis) -> ClaimReport:
    """lambda1 * lambda2 * area <= 4, with a certified lower bound for the area."""
    with working_precision(body.working_bits):
        lhs = Interval(basis.lambda1.hi) * Interval(basis.lambda2.hi) * body.area_lower_bound()
    return claim_le("lambda1 * lambda2 * area_lower(S(Q)) <= 4", lhs, 4)


@dataclass
class WindowReport:
    Q: Fraction
    delta: Fraction
    eps: Fraction
    matrix: UnimodularMatrix
    basis: AdaptedBasis
    claims: List[ClaimReport]
    implication: dict

    @property
    def verdict(self) -> Verdict:
        return Verdict.combine(c.verdict for c in self.claims)

    def failed(self):
        return [c.claim for c in self.claims if c.verdict is not Verdict.HOLDS]

    def rows(self):
        return [(str(self.Q), c.claim, c.verdict.value, c.margin) for c in self.claims]

    def to_json(self):
        return {
            "Q": str(self.Q),
            "delta": str(self.delta),
            "eps": str(self.eps),
            "matrix": self.matrix.to_json(),
            "lambda1": self.basis.lambda1.to_json(),
            "lambda2": self.basis.lambda2.to_json(),
            "minimal_certified": self.basis.minimal_certified,
            "verdict": self.verdict.value,
            "claims": [c.to_json() for c in self.claims],
            "implication": self.implication,
        }


def _qpow(Q, e: Fraction) -> Interval:
    return Interval.exact(Q) ** e


def _window_claims(body, v: Vector, name: str, delta: Fraction) -> List[ClaimReport]:
    x, y = v
    out = []
    a_val = abs(body.alpha * x + y)
    out.append(ClaimReport(f"Q^(-1-delta) <= |alpha {name}|", a_val, _qpow(body.Q, -1 - delta), ">=",
                           a_val.ge(_qpow(body.Q, -1 - delta))))
    out.append(claim_le(f"|alpha {name}| <= Q^(-1+delta)", a_val, _qpow(body.Q, -1 + delta)))
    for i, b in enumerate(body.betas, start=1):
        val = abs(b * x + y)
        lo, hi = _qpow(body.Q, 1 - delta), _qpow(body.Q, 1 + delta)
        out.append(ClaimReport(f"Q^(1-delta) <= |beta_{i} {name}|", val, lo, ">=", val.ge(lo)))
        out.append(claim_le(f"|beta_{i} {name}| <= Q^(1+delta)", val, hi))
    return out


def _implication(body, v: Vector, eps: Fraction):
    """Premise: |alpha v| <= Q^(-1+eps), |beta v| <= Q^(1+eps); conclusion with 2 eps lower bounds."""
    x, y = v
    a_val = abs(body.alpha * x + y)
    b_vals = [abs(b * x + y) for b in body.betas]
    premise = [a_val.le(_qpow(body.Q, -1 + eps))] + [b.le(_qpow(body.Q, 1 + eps)) for b in b_vals]
    conclusion = [a_val.ge(_qpow(body.Q, -1 - 2 * eps))] + [b.ge(_qpow(body.Q, 1 - 2 * eps)) for b in b_vals]
    return {"premise": Verdict.combine(premise).value, "conclusion": Verdict.combine(conclusion).value}


def lemma21_matrix(embset: EmbeddingSet, real_label: int, Q, delta) -> Tuple[UnimodularMatrix, WindowReport]:
    """Adapted-basis matrix for S(Q) and a certified verdict for each window inequality.

    Rows (a, b) and (c, d) are checked against
    Q^(-1-delta) <= |alpha a + b|, |alpha c + d| <= Q^(-1+delta) and
    Q^(1-delta) <= |beta_i a + b|, |beta_i c + d| <= Q^(1+delta).
    Failure at small Q is a reported verdict, not an error.
    """
    Q = Fraction(Q)
    delta = Fraction(str(delta)) if isinstance(delta, float) else Fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    body = ConvexBodyS.from_embeddings(embset, real_label, Q)
    basis = adapted_basis(body)
    m = basis.matrix()
    eps = delta / 7
    with working_precision(body.working_bits):
        claims = _window_claims(body, basis.v1, "a + b", delta) + _window_claims(body, basis.v2, "c + d", delta)
        implication = {
            "eps": str(eps),
            "row1": _implication(body, basis.v1, eps),
            "row2": _implication(body, basis.v2, eps),
        }
    claims.append(minkowski_check(body, basis))
    return m, WindowReport(Q, delta, eps, m, basis, claims, implication)


def brute_force_minimum(body: ConvexBodyS, t: float) -> Tuple[Vector, float]:
    """Independent float scan of all (x, y) with gauge <= t, column by column in x.

    Meant as a test oracle for moderate Q only.
    """
    alpha = body.alpha.mid_float()
    betas = [complex(b.re.mid_float(), b.im.mid_float()) for b in body.betas]
    Q = float(body.Q)
    dmax = max(abs(b - alpha) for b in betas)
    xmax = int(math.ceil(t * (Q + 1 / Q) / dmax)) + 1
    best = None
    for x in range(0, xmax + 1):
        centre = -alpha * x
        for y in range(int(math.floor(centre - t / Q)) - 1, int(math.ceil(centre + t / Q)) + 2):
            if x == 0 and y <= 0:
                continue
            g = max(Q * abs(alpha * x + y), max(abs(b * x + y) for b in betas) / Q)
            if best is None or g < best[1]:
                best = ((x, y), g)
    return best
