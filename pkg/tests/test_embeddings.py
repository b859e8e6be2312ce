import random

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conjsep.embeddings import (
    LABEL_CONVENTION,
    AlgebraicNumber,
    EmbeddingSet,
    SigmaSet,
    compute_embeddings,
    embeddings_via_moebius,
    track_root,
)
from conjsep.intervals import working_precision
from conjsep.polynomial import normalize
from tests.conftest import random_irreducible, random_unimodular


def numeric_roots(poly, dps=60):
    with mpmath.workdps(dps):
        return mpmath.polyroots(list(reversed(poly.coeffs)), maxsteps=400, extraprec=400)


def box_contains(box, z, slack=1e-30):
    # float comparison with slack: the numerical roots are an independent, uncertified oracle
    return (box.re.lower_float() - slack <= float(mpmath.re(z)) <= box.re.upper_float() + slack
            and box.im.lower_float() - slack <= float(mpmath.im(z)) <= box.im.upper_float() + slack)


def test_cube_root_of_two_labels():
    emb = compute_embeddings(normalize([-2, 0, 0, 1]), 128)
    assert emb.signature == (1, 1)
    assert emb.real_labels() == [1]
    with working_precision(128):
        assert (emb.conjugate(1).re ** 3).contains(2)
    # complex pair: positive imaginary part first
    assert emb.conjugate(2).im.lower_float() > 0 > emb.conjugate(3).im.upper_float()
    assert emb.pairing[2] == 3 and emb.pairing[3] == 2


def test_real_labels_ascend():
    emb = compute_embeddings(normalize([2, -10, 0, 1]), 80)  # three real roots
    assert emb.signature == (3, 0)
    lows = [emb.conjugate(k).re.lower_float() for k in emb.labels]
    assert lows == sorted(lows)


@given(st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_every_root_in_exactly_one_enclosure(seed):
    rng = random.Random(seed)
    poly = random_irreducible(rng, rng.randint(2, 7))
    emb = compute_embeddings(poly, 96)
    boxes = emb.boxes()
    for z in numeric_roots(poly):
        hits = [b for b in boxes if box_contains(b, z)]
        assert len(hits) == 1
    for i in range(len(boxes)):
        for j in range(i + 1, len(boxes)):
            assert not boxes[i].overlaps(boxes[j])
    # width target: 2^-p relative to max(|root|, 2^-p)


def test_refine_shrinks_and_keeps_labels():
    emb = compute_embeddings(normalize([-3, 1, 0, 0, 1]), 64)
    fine = emb.refine(128)
    for k in emb.labels:
        assert emb.conjugate(k).contains(fine.conjugate(k))
        assert fine.conjugate(k).re.relative_width() < emb.conjugate(k).re.relative_width()
    assert fine.precision_bits == 192


def test_json_round_trip_recertifies():
    emb = compute_embeddings(normalize([1, 1, 0, 0, 0, 1]), 100)
    data = emb.to_json()
    back = EmbeddingSet.from_json(data)
    assert back == emb
    assert data["label_convention"] == LABEL_CONVENTION


def test_sigma_set_validation():
    assert SigmaSet.parse("3,1").indices == (1, 3)
    assert SigmaSet.full(4).pairs()[0] == (1, 2)
    with pytest.raises(ValueError):
        SigmaSet.parse("1")
    with pytest.raises(ValueError):
        SigmaSet.parse("1,1")
    with pytest.raises(ValueError):
        SigmaSet.parse("1,x")
    with pytest.raises(ValueError):
        SigmaSet.parse("1,5").check(4)


@given(st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_moebius_images_match_fresh_isolation(seed):
    rng = random.Random(seed)
    seed_poly = random_irreducible(rng, rng.randint(3, 6))
    m = random_unimodular(rng)
    src = compute_embeddings(seed_poly, 96)
    target, perm = embeddings_via_moebius(src, m)
    assert sorted(perm.values()) == target.labels
    fresh = compute_embeddings(target.poly, 96)
    assert fresh.signature == target.signature
    for k in target.labels:
        assert fresh.conjugate(k).overlaps(target.conjugate(k))
    assert track_root(src, m, fresh) == perm


def test_algebraic_number_root():
    alg = AlgebraicNumber.from_poly(normalize([-2, 0, 1]), label=2)
    assert alg.degree == 2
    with working_precision(128):
        assert (alg.root().re * alg.root().re).contains(2)
