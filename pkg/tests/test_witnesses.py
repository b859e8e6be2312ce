import csv
import io
import math
from fractions import Fraction

import pytest

from conjsep.embeddings import AlgebraicNumber, SigmaSet, compute_embeddings
from conjsep.intervals import Interval, Verdict
from conjsep.polynomial import IntPolynomial, normalize
from conjsep.witnesses import (
    CSV_COLUMNS,
    dominated_by_power,
    estimate_kappa,
    family_ad,
    family_aq,
    fit_exponent,
    fit_loglog,
    growth_exponent,
    records_to_csv,
    reproduce,
)

CUBIC = normalize([-2, 0, 0, 1])
QUARTIC = normalize([-2, 0, 0, 0, 1])


@pytest.fixture(scope="module")
def cubic_seed():
    return AlgebraicNumber(compute_embeddings(CUBIC, 128))


def test_synthetic_power_law_fit_is_exact():
    xs = [math.log(v) for v in (2, 5, 11, 40, 300)]
    fit = fit_loglog(xs, [-2 * x + 0.5 for x in xs])
    assert abs(fit.slope + 2) < 1e-12 and abs(fit.intercept - 0.5) < 1e-12
    with pytest.raises(ValueError):
        fit_loglog([1, 2], [3, 4])
    with pytest.raises(ValueError):
        fit_loglog([1, 1, 1], [3, 4, 5])


def test_reciprocal_family_growth(cubic_seed):
    batch = family_ad(cubic_seed, [10, 100, 1000, 10000], SigmaSet.full(3))
    ratios = [rec.M.mid_float() / rec.parameter ** 3 for rec in batch]
    assert all(0.5 < q < 2.0 for q in ratios)
    assert all(rec.verdicts["mahler_two_routes"] == "holds" for rec in batch)
    assert abs(growth_exponent(batch).slope - 3) < 0.01


def test_reciprocal_family_full_sigma_slope(cubic_seed):
    batch = family_ad(cubic_seed, [2 ** k for k in range(1, 15)], SigmaSet.full(3))
    fit = fit_exponent(batch)
    assert fit.certified
    assert abs(fit.slope + 2) < 0.07


def test_reciprocal_family_rejects_zero(cubic_seed):
    with pytest.raises(ValueError):
        family_ad(cubic_seed, [0], SigmaSet.full(3))


def test_records_reproduce_bit_for_bit(cubic_seed):
    rec = family_ad(cubic_seed, [37], SigmaSet((1, 2)))[0]
    again = reproduce(rec)
    assert (again.M.lo, again.M.hi) == (rec.M.lo, rec.M.hi)
    assert (again.S_sigma.lo, again.S_sigma.hi) == (rec.S_sigma.lo, rec.S_sigma.hi)
    strip = lambda d: {k: v for k, v in d.items() if k not in ("verdicts", "claims")}
    assert strip(again.to_json()) == strip(rec.to_json())


def test_csv_layout(cubic_seed):
    text = records_to_csv(family_ad(cubic_seed, [3, 9], SigmaSet((1, 2))))
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == CSV_COLUMNS
    assert len(rows) == 3
    lo, hi = float(rows[1][2]), float(rows[1][3])
    assert lo <= hi


def test_quartic_family_records():
    seed = AlgebraicNumber(compute_embeddings(QUARTIC, 128))
    batch = family_aq(seed, 1, [Fraction(10) ** k for k in (2, 4, 6)], Fraction(3, 10))
    assert [q for q, _ in batch.skipped] == [Fraction(100)]
    for rec in batch:
        assert rec.verdicts["window"] == "holds"
        assert rec.verdicts["explicit_chain"] == "holds"
        assert dominated_by_power(rec, 4, Fraction(1, 2)).verdict is Verdict.HOLDS
    with pytest.raises(ValueError):
        family_aq(seed, 1, [100], Fraction(3, 10), SigmaSet((1, 2)))
    with pytest.raises(ValueError):
        family_aq(seed, 3, [100], Fraction(3, 10))


def test_kappa_estimate_cubic():
    est = estimate_kappa(CUBIC, SigmaSet((1, 2)))
    assert est["theoretical"]["value"] == "2/3"
    assert abs(est["empirical_kappa"] - Fraction(2, 3)) < 0.07
    none = estimate_kappa(QUARTIC, SigmaSet((1, 2)), strategy="none")
    assert none["families"] == [] and none["note"]
    assert est["irreducibility"] == "certified-irreducible"


def test_kappa_estimate_flags_reducible_seed():
    # (x^2 - 2)(x - 3) is squarefree but reducible
    est = estimate_kappa(IntPolynomial((6, -2, -3, 1)), SigmaSet((1, 2)), strategy="none")
    assert est["irreducibility"] == "unverified"
    assert "kappa is undefined" in est["note"]


def test_fit_flags_wide_enclosures():
    class Rec:
        def __init__(self, m, s, w):
            self.M = Interval(m * (1 - w), m * (1 + w))
            self.S_sigma = Interval.exact(s)
    recs = [Rec(10.0 ** k, 10.0 ** (-2 * k), 0.1) for k in range(1, 5)]
    assert not fit_exponent(recs).certified


def test_parallel_records_match_serial(cubic_seed):
    ds = [3, 5, 17, 40]
    serial = family_ad(cubic_seed, ds, SigmaSet((1, 2)))
    parallel = family_ad(cubic_seed, ds, SigmaSet((1, 2)), jobs=2)
    assert [r.to_json() for r in serial] == [r.to_json() for r in parallel]
    seed = AlgebraicNumber(compute_embeddings(QUARTIC, 128))
    ladder = [Fraction(10) ** k for k in (2, 4, 5)]
    a = family_aq(seed, 1, ladder, Fraction(3, 10))
    b = family_aq(seed, 1, ladder, Fraction(3, 10), jobs=2)
    assert [r.to_json() for r in a] == [r.to_json() for r in b] and a.skipped == b.skipped
