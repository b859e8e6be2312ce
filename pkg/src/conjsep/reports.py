"""Three-valued claim reports shared by every certified checker."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from mpmath.libmp import mpf_sub, round_floor, to_float

from .intervals import Interval, Verdict


@dataclass
class ClaimReport:
    claim: str
    lhs: Interval
    rhs: Interval
    relation: str  # ">=", "<=" or "=" (enclosure consistency)
    verdict: Verdict

    @property
    def margin(self) -> float:
        """Certified slack: lower(lhs) - upper(rhs) for >=, lower(rhs) - upper(lhs) for <=.

        For identities the margin is minus the gap between disjoint enclosures
        (0 when they intersect).
        """
        if self.relation == ">=":
            return to_float(mpf_sub(self.lhs.lo, self.rhs.hi, 53, round_floor), rnd=round_floor)
        if self.relation == "<=":
            return to_float(mpf_sub(self.rhs.lo, self.lhs.hi, 53, round_floor), rnd=round_floor)
        if self.lhs.overlaps(self.rhs):
            return 0.0
        gap = max(to_float(mpf_sub(self.lhs.lo, self.rhs.hi, 53, round_floor)),
                  to_float(mpf_sub(self.rhs.lo, self.lhs.hi, 53, round_floor)))
        return -gap

    def to_json(self) -> Dict[str, Any]:
        return {
            "claim": self.claim,
            "relation": self.relation,
            "lhs": self.lhs.to_json()["hex"],
            "rhs": self.rhs.to_json()["hex"],
            "lhs_dec": self.lhs.decimal(),
            "rhs_dec": self.rhs.decimal(),
            "verdict": self.verdict.value,
            "margin": self.margin,
        }


def claim_ge(name, lhs, rhs) -> ClaimReport:
    lhs, rhs = Interval.exact(lhs), Interval.exact(rhs)
    return ClaimReport(name, lhs, rhs, ">=", lhs.ge(rhs))


def claim_le(name, lhs, rhs) -> ClaimReport:
    lhs, rhs = Interval.exact(lhs), Interval.exact(rhs)
    return ClaimReport(name, lhs, rhs, "<=", lhs.le(rhs))


def claim_eq(name, lhs, rhs) -> ClaimReport:
    lhs, rhs = Interval.exact(lhs), Interval.exact(rhs)
    return ClaimReport(name, lhs, rhs, "=", lhs.consistent_with(rhs))


@dataclass
class ChainReport:
    claim: str
    links: List[ClaimReport]
    precision_bits: int
    info: Dict[str, Any] = field(default_factory=dict)
    note: Optional[str] = None

    @property
    def verdict(self) -> Verdict:
        return Verdict.combine(link.verdict for link in self.links)

    def link(self, name) -> ClaimReport:
        for item in self.links:
            if item.claim == name:
                return item
        raise KeyError(name)

    def failures(self):
        return [link for link in self.links if link.verdict is Verdict.FAILS]

    def to_json(self) -> Dict[str, Any]:
        out = {
            "claim": self.claim,
            "verdict": self.verdict.value,
            "precision_bits": self.precision_bits,
            "links": [link.to_json() for link in self.links],
        }
        if self.info:
            out["info"] = self.info
        if self.note:
            out["note"] = self.note
        return out


def with_refinement(embset, build, max_bits=4096):
    """Run ``build(embset)``; while the verdict is indeterminate, double the precision.

    Returns ``(report, embset_used)``.
    """
    report = build(embset)
    while report.verdict is Verdict.INDETERMINATE and embset.precision_bits * 2 <= max_bits:
        embset = embset.refine(embset.precision_bits)
        report = build(embset)
    return report, embset
