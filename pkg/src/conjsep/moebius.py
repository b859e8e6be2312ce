"""The GL(2,Z) action on algebraic numbers and greedy Mahler-measure descent
inside an equivalence class."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List

from .embeddings import AlgebraicNumber, EmbeddingSet, embeddings_via_moebius
from .intervals import Interval, Verdict, working_precision
from .measures import mahler_measure
from .polynomial import PolynomialError, mean_of_roots, transform_poly
from .reports import claim_le

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class UnimodularMatrix:
    """Integer matrix [[a, b], [c, d]] with determinant +-1, acting by x -> (a x + b)/(c x + d)."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        for name in "abcd":
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise PolynomialError(f"matrix entry {name}={value!r} is not an integer")
            object.__setattr__(self, name, int(value))
        if self.det not in (1, -1):
            raise PolynomialError(f"matrix {self.to_json()} has determinant {self.det}, not +-1")

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: "UnimodularMatrix") -> "UnimodularMatrix":
        return UnimodularMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "UnimodularMatrix":
        e = self.det
        return UnimodularMatrix(e * self.d, -e * self.b, -e * self.c, e * self.a)

    def __call__(self, z):
        return (self.a * z + self.b) / (self.c * z + self.d)

    def size(self):
        return max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))

    def to_json(self):
        return [self.a, self.b, self.c, self.d]

    @classmethod
    def from_json(cls, data):
        a, b, c, d = data
        return cls(a, b, c, d)

    @classmethod
    def parse(cls, text: str) -> "UnimodularMatrix":
        text = text.strip()
        if not text.startswith("["):
            text = f"[{text}]"
        try:
            values = json.loads(text)
        except json.JSONDecodeError as exc:
            raise PolynomialError(f"malformed matrix {text!r}") from exc
        if len(values) != 4:
            raise PolynomialError("a matrix needs exactly four entries a,b,c,d")
        return cls(*values)

    @classmethod
    def identity(cls):
        return cls(1, 0, 0, 1)

    @classmethod
    def translation(cls, k: int):
        return cls(1, k, 0, 1)

    @classmethod
    def inversion(cls):
        return cls(0, -1, 1, 0)

    def __str__(self):
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]]"


@dataclass(frozen=True)
class ReductionBoundParams:
    """Multiplier and exponent for a bound of the shape M(x*) <= A |D|^a_exp."""

    A: Fraction
    a_exp: Fraction

    def __post_init__(self):
        object.__setattr__(self, "A", Fraction(self.A))
        object.__setattr__(self, "a_exp", Fraction(self.a_exp))
        if self.A < 1 or self.a_exp <= 0:
            raise ValueError("need A >= 1 and a_exp > 0")


def _as_matrix(m) -> UnimodularMatrix:
    if isinstance(m, UnimodularMatrix):
        return m
    return UnimodularMatrix(*m)


def apply(m, alg: AlgebraicNumber) -> AlgebraicNumber:
    """The equivalent number (a x + b)/(c x + d) with its distinguished root tracked."""
    m = _as_matrix(m)
    target, perm = embeddings_via_moebius(alg.embset, m)
    return AlgebraicNumber(target, perm[alg.label])


def mahler_via_forms(embset: EmbeddingSet, m) -> Interval:
    """a0 * prod max(|a x_i + b|, |c x_i + d|): the Mahler measure of the transformed number."""
    m = _as_matrix(m)
    with working_precision(embset.working_bits):
        out = Interval.exact(embset.poly.lead)
        for box in embset.boxes():
            out = out * abs(box * m.a + m.b).max(abs(box * m.c + m.d))
    return out


@dataclass
class ReductionResult:
    number: AlgebraicNumber
    matrix: UnimodularMatrix
    M: Interval
    M_start: Interval
    trace: List[str] = field(default_factory=list)
    exhausted: bool = False
    steps: int = 0

    def __iter__(self):
        # allows ``alg_star, m = reduce_class(...)``
        yield self.number
        yield self.matrix


def _optimal_translation(poly):
    k = round(mean_of_roots(poly))
    return UnimodularMatrix.translation(-k) if k else None


def _candidate_moves(poly):
    moves = [UnimodularMatrix.translation(1), UnimodularMatrix.translation(-1), UnimodularMatrix.inversion()]
    shift = _optimal_translation(poly)
    if shift is not None and shift.size() > 1:
        moves.append(shift)
    s = UnimodularMatrix.inversion()
    shift_after = _optimal_translation(transform_poly(poly, s))
    if shift_after is not None:
        moves.append(shift_after @ s)
    return moves


def _pick(improving):
    best = min(improving, key=lambda item: item[1].upper_float())
    tied = [item for item in improving if item[1].overlaps(best[1])]
    return min(tied, key=lambda item: (item[0].size(), item[0].to_json()))


def reduce_class(alg: AlgebraicNumber, step_budget: int = 200, max_bits: int = 1024) -> ReductionResult:
    """Greedy descent of the Mahler measure over x+1, x-1, -1/x and optimal translations.

    Only moves whose new measure is certified strictly smaller are accepted, so
    the returned measure never exceeds the starting one.  Overlapping
    enclosures are refined up to ``max_bits``, then counted as no improvement.
    """
    if alg.degree < 3:
        raise ValueError("class reduction needs degree >= 3")
    current = alg
    total = UnimodularMatrix.identity()
    m_cur = mahler_measure(current.embset)
    m_start = m_cur
    trace = []
    steps = 0
    while steps < step_budget:
        moves = _candidate_moves(current.poly)
        while True:
            scored = [(m, mahler_via_forms(current.embset, m)) for m in moves]
            improving = [(m, val) for m, val in scored if val.lt(m_cur) is Verdict.HOLDS]
            undecided = any(val.lt(m_cur) is Verdict.INDETERMINATE for _, val in scored)
            if improving or not undecided or current.embset.precision_bits * 2 > max_bits:
                break
            current = AlgebraicNumber(current.embset.refine(current.embset.precision_bits), current.label)
            m_cur = mahler_measure(current.embset)
        if not improving:
            break
        move, value = _pick(improving)
        current = apply(move, current)
        total = move @ total
        steps += 1
        m_cur = mahler_measure(current.embset)
        line = f"step {steps}: {move} -> M in [{value.lower_float():.6g}, {value.upper_float():.6g}]"
        trace.append(line)
        log.info(line)
    else:
        return ReductionResult(current, total, m_cur, m_start, trace, True, steps)
    return ReductionResult(current, total, m_cur, m_start, trace, False, steps)


def check_reduction_bound(result: ReductionResult, D: int, params: ReductionBoundParams):
    """Record whether M(x*) <= A |D|^a_exp for user-supplied (A, a_exp)."""
    with working_precision(result.number.embset.working_bits):
        rhs = Interval.exact(params.A) * (Interval.exact(abs(D)) ** params.a_exp)
    return claim_le("M(x*) <= A |D|^a_exp", result.M, rhs)
