import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conjsep.embeddings import compute_embeddings
from conjsep.intervals import CBox, Interval, Verdict
from conjsep.lattice import ConvexBodyS, adapted_basis, brute_force_minimum, gauge, lemma21_matrix, minkowski_check
from conjsep.polynomial import count_real_roots, normalize
from tests.conftest import random_irreducible


def random_body(rng):
    while True:
        poly = random_irreducible(rng, rng.randint(3, 5))
        if count_real_roots(poly):
            break
    emb = compute_embeddings(poly, 128)
    label = rng.choice(emb.real_labels())
    Q = Fraction(rng.randint(5, 3000), rng.randint(1, 3))
    if Q <= 1:
        Q = Fraction(2)
    return ConvexBodyS.from_embeddings(emb, label, Q)


def brute_force_completion(body, v1, t):
    """Float scan for the smallest gauge among v with |det(v1, v)| = 1."""
    alpha = body.alpha.mid_float()
    betas = [complex(b.re.mid_float(), b.im.mid_float()) for b in body.betas]
    Q = float(body.Q)
    dmax = max(abs(b - alpha) for b in betas)
    xmax = int(math.ceil(t * (Q + 1 / Q) / dmax)) + 1
    best = None
    for x in range(-xmax, xmax + 1):
        centre = -alpha * x
        for y in range(int(math.floor(centre - t / Q)) - 1, int(math.ceil(centre + t / Q)) + 2):
            if abs(v1[0] * y - v1[1] * x) != 1:
                continue
            g = max(Q * abs(alpha * x + y), max(abs(b * x + y) for b in betas) / Q)
            if best is None or g < best[1]:
                best = ((x, y), g)
    return best


def test_gauge_of_simple_body():
    body = ConvexBodyS(Interval.exact(0), (CBox.exact(1),), Fraction(4))
    # (0, 1): max(4 * 1, 1 / 4) = 4;  (1, 0): max(0, 1/4) = 1/4
    assert gauge(body, (0, 1)).contains(4)
    assert gauge(body, (1, 0)).contains(Fraction(1, 4))
    with pytest.raises(ValueError):
        gauge(body, (0, 0))
    with pytest.raises(ValueError):
        ConvexBodyS(Interval.exact(0), (CBox.exact(1),), Fraction(1))


def test_minima_agree_with_brute_force_on_random_bodies():
    rng = random.Random(7)
    for _ in range(50):
        body = random_body(rng)
        basis = adapted_basis(body)
        v, g = brute_force_minimum(body, basis.lambda1.upper_float() * 1.01 + 1e-9)
        assert abs(g - basis.lambda1.mid_float()) <= 1e-9 * g
        assert v in (basis.v1, (-basis.v1[0], -basis.v1[1])) or basis.ties
        w, h = brute_force_completion(body, basis.v1, basis.lambda2.upper_float() * 1.01 + 1e-9)
        assert abs(h - basis.lambda2.mid_float()) <= 1e-9 * h
        assert basis.det == 1
        assert minkowski_check(body, basis).verdict is Verdict.HOLDS


@given(st.integers(0, 10**6))
@settings(max_examples=25, deadline=None)
def test_basis_properties(seed):
    body = random_body(random.Random(seed))
    basis = adapted_basis(body)
    assert basis.matrix().det == 1
    assert basis.lambda1.le(basis.lambda2) is not Verdict.FAILS
    assert minkowski_check(body, basis).verdict is Verdict.HOLDS


@pytest.mark.parametrize("coeffs", [[-2, 0, 0, 1], [-2, 0, 0, 0, 1]])
def test_ladder_matrices_unimodular(coeffs):
    emb = compute_embeddings(normalize(coeffs), 128)
    for label in emb.real_labels():
        for k in range(2, 9, 2):
            m, rep = lemma21_matrix(emb, label, Fraction(10) ** k, Fraction(3, 10))
            assert m.det == 1
            assert rep.basis.minimal_certified
            assert rep.claims[-1].verdict is Verdict.HOLDS


def test_window_passes_for_large_q():
    emb = compute_embeddings(normalize([-2, 0, 0, 1]), 128)
    _, rep = lemma21_matrix(emb, 1, Fraction(10) ** 8, Fraction(3, 10))
    assert rep.verdict is Verdict.HOLDS, rep.failed()
    assert rep.implication["row1"]["conclusion"] == "holds"
    row = rep.rows()[0]
    assert row[0] == str(Fraction(10) ** 8) and row[2] == "holds"


def test_small_q_failure_is_reported_not_raised():
    emb = compute_embeddings(normalize([-2, 0, 0, 1]), 128)
    _, rep = lemma21_matrix(emb, 1, 2, Fraction(3, 10))
    assert rep.verdict is Verdict.FAILS
    assert rep.failed()


def test_rejects_nonreal_label_and_bad_delta():
    emb = compute_embeddings(normalize([-2, 0, 0, 1]), 128)
    with pytest.raises(ValueError):
        lemma21_matrix(emb, 2, 100, Fraction(3, 10))
    with pytest.raises(ValueError):
        lemma21_matrix(emb, 1, 100, 0)
