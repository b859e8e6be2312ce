"""Exact integer polynomials: normalization, resultants, discriminants,
GL(2,Z) substitution, Sturm counts and a modular irreducibility certificate.

Nothing in this module touches floating point.  Coefficients are stored in
ascending order, so ``IntPolynomial((-2, 0, 0, 1))`` is x^3 - 2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd
from typing import Optional, Sequence


class PolynomialError(ValueError):
    pass


class ZeroPolynomialError(PolynomialError):
    pass


class NotSquarefreeError(PolynomialError):
    pass


@dataclass(frozen=True)
class IntPolynomial:
    """Dense integer polynomial, coefficients ascending, no trailing zeros."""

    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coeffs)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        object.__setattr__(self, "coeffs", coeffs or (0,))

    @property
    def degree(self):
        return -1 if self.is_zero() else len(self.coeffs) - 1

    @property
    def lead(self):
        return self.coeffs[-1]

    def is_zero(self):
        return self.coeffs == (0,)

    @property
    def content(self):
        g = 0
        for c in self.coeffs:
            g = gcd(g, c)
        return g

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self):
        return IntPolynomial(tuple(k * c for k, c in enumerate(self.coeffs))[1:] or (0,))

    def __neg__(self):
        return IntPolynomial(tuple(-c for c in self.coeffs))

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntPolynomial(tuple(x + y for x, y in zip(a, b)))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPolynomial(tuple(other * c for c in self.coeffs))
        return IntPolynomial(_mul(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def to_text(self):
        return "[" + ",".join(str(c) for c in self.coeffs) + "]"

    @classmethod
    def parse(cls, text):
        """Parse the dense ascending text format, e.g. ``"[-2,0,0,1]"``."""
        try:
            values = json.loads(text)
        except json.JSONDecodeError as exc:
            raise PolynomialError(f"malformed polynomial {text!r}: {exc.msg}") from None
        if not isinstance(values, list) or not all(isinstance(v, int) for v in values):
            raise PolynomialError(f"polynomial must be a list of integers, got {text!r}")
        return cls(tuple(values))

    def __str__(self):
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            mag = abs(c)
            body = mono if (mag == 1 and mono) else (f"{mag}{'*' if mono else ''}{mono}")
            terms.append(("-" if c < 0 else "+", body))
        if not terms:
            return "0"
        head = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        return head + "".join(f" {s} {b}" for s, b in terms[1:])


def _mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return tuple(out)


def _pow(a, k):
    out = (1,)
    for _ in range(k):
        out = _mul(out, a)
    return out


# -- normalization -----------------------------------------------------------


def primitive_part(poly: IntPolynomial) -> IntPolynomial:
    if poly.is_zero():
        raise ZeroPolynomialError("the zero polynomial has no primitive part")
    g = poly.content
    sign = -1 if poly.lead < 0 else 1
    return IntPolynomial(tuple(sign * c // g for c in poly.coeffs))


def normalize(raw_coeffs: Sequence[int], require_squarefree: bool = True) -> IntPolynomial:
    """Primitive polynomial with positive leading coefficient.

    Raises for the zero polynomial, for constants, and (by default) for input
    with a repeated root.
    """
    poly = IntPolynomial(tuple(raw_coeffs))
    if poly.is_zero():
        raise ZeroPolynomialError("cannot normalize the zero polynomial")
    if poly.degree < 1:
        raise PolynomialError("a defining polynomial needs degree at least 1")
    poly = primitive_part(poly)
    if require_squarefree and not is_squarefree(poly):
        raise NotSquarefreeError(f"{poly} has a repeated root")
    return poly


def is_squarefree(poly: IntPolynomial) -> bool:
    if poly.degree <= 1:
        return poly.degree == 1
    return resultant_subresultant(poly, poly.derivative()) != 0


# -- resultants ----------------------------------------------------------------


def sylvester_matrix(f: IntPolynomial, g: IntPolynomial):
    m, n = f.degree, g.degree
    fa, ga = f.coeffs[::-1], g.coeffs[::-1]
    size = m + n
    rows = []
    for i in range(n):
        rows.append([0] * i + list(fa) + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + list(ga) + [0] * (size - n - 1 - i))
    return rows


def bareiss_determinant(matrix):
    """Fraction-free Gaussian elimination; exact for integer matrices."""
    a = [list(row) for row in matrix]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * pivot - a[i][k] * a[k][j]) // prev
        prev = pivot
    return sign * a[n - 1][n - 1]


def resultant_sylvester(f: IntPolynomial, g: IntPolynomial) -> int:
    if f.degree <= 0 or g.degree <= 0:
        raise PolynomialError("resultant needs two non-constant polynomials")
    return bareiss_determinant(sylvester_matrix(f, g))


def _prem(a, b):
    """Pseudo-remainder of ascending coefficient tuples: lc(b)^(da-db+1) a mod b."""
    a = _strip(a)
    db = len(b) - 1
    lb = b[-1]
    da = _deg(a)
    if da < db:
        return tuple(a) if a else (0,)
    e = da - db + 1
    while a and len(a) - 1 >= db:
        la = a[-1]
        shift = len(a) - 1 - db
        a = [x * lb for x in a]
        for i, y in enumerate(b):
            a[i + shift] -= la * y
        a = _strip(a[:-1])
        e -= 1
    scale = lb**e
    return tuple(x * scale for x in a) if a else (0,)


def _strip(coeffs):
    out = list(coeffs)
    while out and out[-1] == 0:
        out.pop()
    return out


def _content(coeffs):
    g = 0
    for c in coeffs:
        g = gcd(g, c)
    return g


def _deg(coeffs):
    return -1 if all(c == 0 for c in coeffs) else len(coeffs) - 1


def resultant_subresultant(f: IntPolynomial, g: IntPolynomial) -> int:
    """Resultant via Collins' subresultant pseudo-remainder sequence."""
    A, B = f.coeffs, g.coeffs
    if _deg(A) <= 0 and _deg(B) <= 0:
        raise PolynomialError("resultant needs a non-constant polynomial")
    if _deg(A) < 0 or _deg(B) < 0:
        return 0
    s = 1
    if _deg(A) < _deg(B):
        A, B = B, A
        if _deg(A) % 2 == 1 and _deg(B) % 2 == 1:
            s = -1
    if _deg(B) == 0:
        return s * B[0] ** _deg(A)
    a, b = _content(A), _content(B)
    A = tuple(x // a for x in A)
    B = tuple(x // b for x in B)
    t = a ** _deg(B) * b ** _deg(A)
    g_, h = 1, 1
    while True:
        da, db = _deg(A), _deg(B)
        delta = da - db
        if da % 2 == 1 and db % 2 == 1:
            s = -s
        R = _prem(A, B)
        A = B
        if _deg(R) < 0:
            return 0
        div = g_ * h**delta
        B = tuple(x // div for x in R)
        g_ = A[-1]
        if delta == 0:
            pass
        else:
            h = g_**delta // h ** (delta - 1)
        if _deg(B) <= 0:
            break
    da = _deg(A)
    h = B[0] ** da // h ** (da - 1) if da >= 1 else h
    return s * t * h


def discriminant(poly: IntPolynomial, method: str = "sylvester") -> int:
    """Discriminant a0^(2r-2) prod_{i<j} (x_i - x_j)^2 as an exact integer."""
    r = poly.degree
    if r < 2:
        raise PolynomialError("discriminant needs degree at least 2")
    fp = poly.derivative()
    if method == "sylvester":
        res = resultant_sylvester(poly, fp)
    elif method == "subresultant":
        res = resultant_subresultant(poly, fp)
    else:
        raise ValueError(f"unknown resultant method {method!r}")
    if res == 0:
        raise NotSquarefreeError(f"{poly} has a repeated root: discriminant is zero")
    sign = -1 if (r * (r - 1) // 2) % 2 else 1
    q, rem = divmod(sign * res, poly.lead)
    assert rem == 0
    return q


# -- GL(2,Z) substitution ------------------------------------------------------


def _matrix_entries(m):
    if isinstance(m, (tuple, list)):
        a, b, c, d = m
    else:
        a, b, c, d = m.a, m.b, m.c, m.d
    if a * d - b * c not in (1, -1):
        raise PolynomialError(f"matrix {[a, b, c, d]} has determinant {a * d - b * c}, not +-1")
    return a, b, c, d


def transform_poly(poly: IntPolynomial, m) -> IntPolynomial:
    """Primitive defining polynomial of (a x + b)/(c x + d) over the roots x of ``poly``.

    Substitutes F(dX - bY, -cX + aY) in the binary form of ``poly`` and sets
    Y = 1.  ``m`` is anything with attributes a, b, c, d, or a 4-tuple.
    """
    a, b, c, d = _matrix_entries(m)
    r = poly.degree
    num = (-b, d)
    den = (a, -c)
    out = (0,)
    for k, coef in enumerate(poly.coeffs):
        if coef:
            term = _mul(_pow(num, k), _pow(den, r - k))
            out = (IntPolynomial(out) + IntPolynomial(tuple(coef * t for t in term))).coeffs
    result = IntPolynomial(out)
    if result.is_zero():
        raise PolynomialError("substitution produced the zero polynomial")
    return primitive_part(result)


# -- Sturm sequences -----------------------------------------------------------


def sturm_sequence(poly: IntPolynomial):
    """Sturm chain with remainders rescaled by positive factors (signs preserved)."""
    seq = [poly.coeffs, poly.derivative().coeffs]
    while _deg(seq[-1]) > 0:
        a, b = seq[-2], seq[-1]
        e = len(a) - len(b) + 1
        lb = b[-1]
        # prem multiplies by lc(b)^e; flip sign when that factor is negative
        r = _prem(a, b)
        if lb < 0 and e % 2 == 1:
            r = tuple(-x for x in r)
        r = tuple(-x for x in r)
        if _deg(r) < 0:
            break
        g = _content(r)
        seq.append(tuple(x // g for x in r))
    return [IntPolynomial(s) for s in seq]


def _sign_changes(values):
    signs = [v for v in values if v != 0]
    return sum(1 for x, y in zip(signs, signs[1:]) if (x > 0) != (y > 0))


def count_real_roots(poly: IntPolynomial) -> int:
    """Number of distinct real roots, by Sturm's theorem."""
    seq = sturm_sequence(poly)
    at_pos_inf = [p.lead for p in seq]
    at_neg_inf = [p.lead * (-1) ** p.degree for p in seq]
    return _sign_changes(at_neg_inf) - _sign_changes(at_pos_inf)


# -- irreducibility over F_p ---------------------------------------------------


def _gf_trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _gf_mod(a, m, p):
    a = _gf_trim(a)
    dm = len(m) - 1
    inv = pow(m[-1], -1, p)
    while len(a) - 1 >= dm:
        q = a[-1] * inv % p
        shift = len(a) - 1 - dm
        for i, y in enumerate(m):
            a[i + shift] = (a[i + shift] - q * y) % p
        a = _gf_trim(a)
    return a


def _gf_mulmod(a, b, m, p):
    if not a or not b:
        return []
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    return _gf_mod(prod, m, p)


def _gf_powmod(base, e, m, p):
    result = [1]
    base = _gf_mod(base, m, p)
    while e:
        if e & 1:
            result = _gf_mulmod(result, base, m, p)
        base = _gf_mulmod(base, base, m, p)
        e >>= 1
    return result


def _gf_gcd(a, b, p):
    a, b = _gf_trim(a), _gf_trim(b)
    while b:
        a, b = b, _gf_mod(a, b, p)
    return a


def _prime_factors(n):
    out, k = [], 2
    while k * k <= n:
        if n % k == 0:
            out.append(k)
            while n % k == 0:
                n //= k
        k += 1
    if n > 1:
        out.append(n)
    return out


def _gf_sub(a, b, p):
    n = max(len(a), len(b))
    a = a + [0] * (n - len(a))
    b = b + [0] * (n - len(b))
    return _gf_trim([(x - y) % p for x, y in zip(a, b)])


def irreducible_mod_p(poly: IntPolynomial, p: int) -> bool:
    """Rabin's test for the reduction of ``poly`` modulo a prime not dividing the lead."""
    f = [c % p for c in poly.coeffs]
    if f[-1] == 0:
        raise PolynomialError(f"{p} divides the leading coefficient")
    n = len(f) - 1
    if n == 1:
        return True
    x = [0, 1]
    for q in _prime_factors(n):
        h = _gf_powmod(x, p ** (n // q), f, p)
        if len(_gf_gcd(f, _gf_sub(h, x, p), p)) > 1:
            return False
    return not _gf_sub(_gf_powmod(x, p**n, f, p), x, p)


def _small_primes(count):
    primes, k = [], 2
    while len(primes) < count:
        if all(k % q for q in primes if q * q <= k):
            primes.append(k)
        k += 1
    return primes


@dataclass(frozen=True)
class IrreducibilityCertificate:
    status: str  # "certified-irreducible" or "unverified"
    witness: Optional[int] = None

    @property
    def certified(self):
        return self.status == "certified-irreducible"

    def verify(self, poly: IntPolynomial) -> bool:
        if not self.certified:
            return False
        return poly.lead % self.witness != 0 and irreducible_mod_p(poly, self.witness)


def try_certify_irreducible(poly: IntPolynomial, prime_budget: int = 60) -> IrreducibilityCertificate:
    """Look for a prime p not dividing a0*D such that ``poly`` is irreducible mod p.

    Sound but incomplete: some irreducible polynomials (x^4 + 1, for one) are
    reducible modulo every prime and always come back unverified.
    """
    if poly.degree == 1:
        return IrreducibilityCertificate("certified-irreducible", _small_primes(1)[0])
    bad = poly.lead * discriminant(poly, method="subresultant")
    for p in _small_primes(prime_budget):
        if bad % p == 0:
            continue
        if irreducible_mod_p(poly, p):
            return IrreducibilityCertificate("certified-irreducible", p)
    return IrreducibilityCertificate("unverified")


def binomial_shift(poly: IntPolynomial, k: int) -> IntPolynomial:
    """poly(x - k): the polynomial whose roots are those of ``poly`` shifted by +k."""
    r = poly.degree
    out = [0] * (r + 1)
    for n, c in enumerate(poly.coeffs):
        for j in range(n + 1):
            out[j] += c * comb(n, j) * (-k) ** (n - j)
    return IntPolynomial(tuple(out))


def mean_of_roots(poly: IntPolynomial) -> Fraction:
    """Exact average of the roots (equivalently of their real parts)."""
    r = poly.degree
    return Fraction(-poly.coeffs[r - 1], r * poly.lead)
