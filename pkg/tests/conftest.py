import random

import pytest

from conjsep.polynomial import NotSquarefreeError, PolynomialError, normalize, try_certify_irreducible

ACCEPTANCE_LINES = []


def random_irreducible(rng, degree, bound=6, lead_bound=3):
    """Random primitive polynomial with a mod-p irreducibility certificate."""
    while True:
        coeffs = [rng.randint(-bound, bound) for _ in range(degree)] + [rng.randint(1, lead_bound)]
        if coeffs[0] == 0:
            continue
        try:
            poly = normalize(coeffs)
        except (NotSquarefreeError, PolynomialError):
            continue
        if poly.degree == degree and try_certify_irreducible(poly).certified:
            return poly


def random_unimodular(rng, bound=6):
    while True:
        a, b, c, d = (rng.randint(-bound, bound) for _ in range(4))
        if a * d - b * c in (1, -1):
            return a, b, c, d


@pytest.fixture
def rng():
    return random.Random(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
