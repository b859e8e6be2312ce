import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conjsep.embeddings import AlgebraicNumber, compute_embeddings, embeddings_via_moebius
from conjsep.intervals import Verdict
from conjsep.measures import mahler_measure
from conjsep.moebius import ReductionBoundParams, UnimodularMatrix, apply, check_reduction_bound, mahler_via_forms, reduce_class
from conjsep.polynomial import PolynomialError, discriminant, normalize, transform_poly
from tests.conftest import random_irreducible, random_unimodular

CUBE_ROOT_2 = normalize([-2, 0, 0, 1])
entries = st.integers(-20, 20)


@st.composite
def unimodular(draw):
    a, b, c = draw(entries), draw(entries), draw(entries)
    # complete to det 1 when possible, otherwise fall back to a product of generators
    for d in range(-40, 41):
        if a * d - b * c in (1, -1):
            return UnimodularMatrix(a, b, c, d)
    return UnimodularMatrix(1, draw(entries), 0, 1)


def test_rejects_non_unimodular():
    with pytest.raises(PolynomialError):
        UnimodularMatrix(2, 0, 0, 1)
    with pytest.raises(PolynomialError):
        UnimodularMatrix(1, 0.5, 0, 1)
    assert UnimodularMatrix.parse("0,1,1,1") == UnimodularMatrix.parse("[0,1,1,1]")


@given(unimodular(), unimodular())
@settings(max_examples=100, deadline=None)
def test_group_laws(m1, m2):
    assert (m1 @ m2).det == m1.det * m2.det
    assert m1 @ m1.inverse() == UnimodularMatrix.identity()
    x = Fraction(7, 3)
    if (m2.c * x + m2.d) != 0 and (m1.c * m2(x) + m1.d) != 0:
        assert (m1 @ m2)(x) == m1(m2(x))


@given(st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_mahler_two_routes_agree(seed):
    rng = random.Random(seed)
    poly = random_irreducible(rng, rng.randint(3, 6))
    m = UnimodularMatrix(*random_unimodular(rng, 12))
    emb = compute_embeddings(poly, 128)
    via_forms = mahler_via_forms(emb, m)
    target, _ = embeddings_via_moebius(emb, m)
    assert via_forms.overlaps(mahler_measure(target))
    assert abs(discriminant(target.poly)) == abs(discriminant(poly))


def test_apply_tracks_distinguished_root():
    alg = AlgebraicNumber(compute_embeddings(CUBE_ROOT_2, 128), 1)
    out = apply((0, 1, 1, 1), alg)
    # 1/(2^(1/3) + 1) is the real conjugate
    assert out.embset.is_real(out.label)
    assert abs(out.root().re.mid_float() - 1 / (2 ** (1 / 3) + 1)) < 1e-12


def test_no_small_matrix_beats_the_reduced_cubic():
    """Exhaustive over |entries| <= 10: no equivalent of 2^(1/3) has certified M < 2."""
    emb = compute_embeddings(CUBE_ROOT_2, 96)
    below = []
    count = 0
    for a, b, c, d in itertools.product(range(-10, 11), repeat=4):
        if a * d - b * c not in (1, -1):
            continue
        count += 1
        if mahler_via_forms(emb, (a, b, c, d)).lt(2) is Verdict.HOLDS:
            below.append((a, b, c, d))
    assert count > 1000
    assert below == []


def test_reduce_undoes_translation():
    far = normalize(transform_poly(CUBE_ROOT_2, (1, 1000, 0, 1)).coeffs)
    res = reduce_class(AlgebraicNumber(compute_embeddings(far, 128)))
    assert res.number.poly == CUBE_ROOT_2
    assert res.M.contains(2)
    assert res.M.le(res.M_start) is Verdict.HOLDS
    assert res.matrix == UnimodularMatrix(1, -1000, 0, 1)
    alg_star, m = res
    assert transform_poly(far, m) == alg_star.poly


def test_reduce_undoes_inversion():
    res = reduce_class(AlgebraicNumber(compute_embeddings(normalize([-1, 3, -3, 3]), 128)))
    assert res.M.contains(2)
    assert res.number.poly.degree == 3


def test_reduced_seed_is_a_fixed_point():
    res = reduce_class(AlgebraicNumber(compute_embeddings(CUBE_ROOT_2, 128)))
    assert res.matrix == UnimodularMatrix.identity()
    assert res.trace == [] and not res.exhausted


@given(st.integers(0, 10**6))
@settings(max_examples=15, deadline=None)
def test_reduction_never_increases_measure(seed):
    rng = random.Random(seed)
    poly = random_irreducible(rng, rng.randint(3, 5), bound=4)
    m = UnimodularMatrix(*random_unimodular(rng, 8))
    start = AlgebraicNumber(compute_embeddings(transform_poly(poly, m), 128))
    res = reduce_class(start)
    assert res.M.le(res.M_start) is not Verdict.FAILS
    assert transform_poly(start.poly, res.matrix) == res.number.poly
    assert mahler_via_forms(start.embset, res.matrix).overlaps(res.M)


def test_reduction_bound_report():
    res = reduce_class(AlgebraicNumber(compute_embeddings(CUBE_ROOT_2, 128)))
    rep = check_reduction_bound(res, -108, ReductionBoundParams(1, Fraction(1, 2)))
    assert rep.verdict is Verdict.HOLDS
    with pytest.raises(ValueError):
        ReductionBoundParams(0, 1)
