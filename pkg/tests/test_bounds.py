import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conjsep.bounds import (
    HypothesisViolation,
    KappaParams,
    ShapeError,
    check_pair_set,
    cubic_chain_check,
    effective_exponents,
    kappa_from_theta,
    kappa_upper_ineffective,
    lemma33_quantities,
    load_config,
    pair_set_A,
    pair_set_A_size,
    sigma_shape,
    theoretical_kappa,
    verify_lemma33,
)
from conjsep.embeddings import AlgebraicNumber, SigmaSet, compute_embeddings
from conjsep.intervals import Verdict
from conjsep.moebius import UnimodularMatrix, reduce_class
from conjsep.polynomial import normalize, transform_poly
from tests.conftest import random_irreducible, random_unimodular

IDENTITY_CLAIMS = ("prod f_i = M(x)/M(x*)", "prod_{i<j} g_ij = |D|^(1/2) / M(x)^(r-1)",
                   "prod_{i<j} g_ij f_i f_j = |D|^(1/2) / M(x*)^(r-1)")


def admissible_sigma(rng, emb):
    r = emb.r
    if emb.complex_labels() and rng.random() < 0.3:
        omit = rng.choice(emb.complex_labels())
        return SigmaSet(tuple(k for k in emb.labels if k != omit))
    return SigmaSet(tuple(rng.sample(emb.labels, rng.randint(2, r - 2))))


def test_pair_set_examples():
    assert pair_set_A(2) == [(2, 3)]
    assert pair_set_A(4) == [(2, 3), (3, 4), (3, 5), (4, 5)]
    assert [pair_set_A_size(l) for l in (2, 3, 4, 5)] == [1, 2, 4, 6]


@pytest.mark.parametrize("l", range(2, 65))
def test_pair_set_combinatorics(l):
    assert all(check_pair_set(l).values())


def test_kappa_formulas_exact():
    assert kappa_upper_ineffective(4, 2) == Fraction(404, 135)
    assert kappa_upper_ineffective(10, 4) == 9 - Fraction(36, 1350)
    assert kappa_upper_ineffective(5, 4, omitted_complex=True) == 4 - Fraction(1, 675)
    with pytest.raises(ShapeError):
        kappa_upper_ineffective(5, 4, omitted_complex=False)
    with pytest.raises(ShapeError):
        kappa_upper_ineffective(3, 2)
    assert kappa_from_theta(KappaParams.ineffective(4, 2)) == (Fraction(9, 425), Fraction(1271, 425))


def test_theta_u_dominates_the_stated_gap():
    for r in range(4, 201):
        for s in range(2, r - 1):
            theta, kappa = kappa_from_theta(KappaParams.ineffective(r, s))
            u = KappaParams.ineffective(r, s).u
            assert theta * u >= Fraction((r - s) ** 2, 135 * r)
            assert kappa <= kappa_upper_ineffective(r, s)


def test_effective_exponents_structure():
    small = effective_exponents(KappaParams(4, 2, 1, 229))
    assert small["parametric"]
    assert small["kappa_minus_base"].sign == -1
    big = effective_exponents(KappaParams(4, 2, 1, 10**6))
    # larger |D_K|: smaller gap below r - 1, larger constants
    assert big["kappa_minus_base"].log_abs < small["kappa_minus_base"].log_abs
    assert big["log_C"].log_abs > small["log_C"].log_abs
    assert big["log_A2"].log_abs > small["log_A2"].log_abs
    higher = effective_exponents(KappaParams(6, 2, 1, 229))
    assert higher["kappa_minus_base"].log_abs < small["kappa_minus_base"].log_abs
    tuned = effective_exponents(KappaParams(4, 2, 1, 229, {"c1": Fraction(3)}))
    assert tuned["constants"]["c1"] == "3"
    with pytest.raises(ValueError):
        effective_exponents(KappaParams(4, 2, 1))


def test_load_config(tmp_path):
    path = tmp_path / "consts.cfg"
    path.write_text("# constants\nc1 = 3/2\nA=4\n\nfield_disc_abs = 229  # quartic\n")
    assert load_config(path) == {"c1": Fraction(3, 2), "A": Fraction(4), "field_disc_abs": Fraction(229)}
    path.write_text("c1 = pi\n")
    with pytest.raises(ValueError):
        load_config(path)


def test_cubic_chain():
    rep = cubic_chain_check(compute_embeddings(normalize([-2, 0, 0, 1]), 128))
    assert rep.verdict is Verdict.HOLDS
    with pytest.raises(ShapeError):
        cubic_chain_check(compute_embeddings(normalize([1, -3, 0, 1]), 128))  # totally real
    with pytest.raises(ShapeError):
        cubic_chain_check(compute_embeddings(normalize([-2, 0, 0, 1]), 128), SigmaSet((2, 3)))


def test_theoretical_kappa_cases():
    cubic = compute_embeddings(normalize([-2, 0, 0, 1]), 64)
    assert theoretical_kappa(cubic, SigmaSet((1, 2)))["value"] == "2/3"
    assert theoretical_kappa(cubic, SigmaSet((1, 2, 3)))["value"] == "2"
    assert theoretical_kappa(cubic, SigmaSet((2, 3)))["value"] == "2"
    quartic = compute_embeddings(normalize([-2, 0, 0, 0, 1]), 64)
    assert theoretical_kappa(quartic, SigmaSet((1, 2)))["value"] == str(Fraction(404, 135))


def test_shape_rules():
    quartic = compute_embeddings(normalize([-2, 0, 0, 0, 1]), 64)
    assert sigma_shape(quartic, SigmaSet((1, 2))) == "small"
    assert sigma_shape(quartic, SigmaSet((1, 2, 3))) == "omit-complex"
    with pytest.raises(ShapeError):
        sigma_shape(quartic, SigmaSet((2, 3, 4)))
    with pytest.raises(ShapeError):
        sigma_shape(compute_embeddings(normalize([-2, 0, 0, 1]), 64), SigmaSet((1, 2)))


def test_lemma33_on_the_cube_root_pair():
    q = lemma33_quantities(compute_embeddings(normalize([-2, 0, 0, 1]), 128), (0, 1, 1, 1))
    assert q.ratio.overlaps(Fraction(2, 3))
    assert all(c.verdict is Verdict.HOLDS for c in q.claims)


@given(st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_lemma33_claims_on_random_pairs(seed):
    rng = random.Random(seed)
    emb = compute_embeddings(random_irreducible(rng, rng.randint(4, 6)), 128)
    q = lemma33_quantities(emb, random_unimodular(rng, 9))
    verdicts = {c.claim: c.verdict for c in q.claims}
    for name in IDENTITY_CLAIMS:
        assert verdicts[name] is Verdict.HOLDS
    assert Verdict.FAILS not in verdicts.values()


@given(st.integers(0, 10**6))
@settings(max_examples=10, deadline=None)
def test_improved_bound_on_reduced_pairs(seed):
    rng = random.Random(seed)
    base = random_irreducible(rng, rng.randint(4, 5), bound=4)
    start = AlgebraicNumber(compute_embeddings(transform_poly(base, random_unimodular(rng, 6)), 128))
    res = reduce_class(start)
    rep = verify_lemma33(start.embset, res.matrix, admissible_sigma(rng, start.embset))
    assert rep.verdict is not Verdict.FAILS, [c.claim for c in rep.failures()]


def test_hypothesis_violation_is_raised():
    emb = compute_embeddings(normalize([-2, 0, 0, 0, 1]), 128)
    with pytest.raises(HypothesisViolation):
        verify_lemma33(emb, UnimodularMatrix(1, 7, 0, 1), SigmaSet((1, 2)))


def test_exact_equality_case_is_not_a_violation():
    # x^4 + 1 is mapped to itself by -1/x: every f_i = 1 and M(x*) = M(x) exactly
    emb = compute_embeddings(normalize([1, 0, 0, 0, 1]), 128)
    rep = verify_lemma33(emb, UnimodularMatrix.inversion(), SigmaSet((1, 2)))
    assert rep.verdict is not Verdict.FAILS
    assert rep.links[0].verdict is Verdict.HOLDS
