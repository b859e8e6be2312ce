"""Outward-rounded interval arithmetic on dyadic endpoints.

Endpoints are mpmath ``mpf`` tuples (sign, mantissa, exponent, bitcount), so
every endpoint is an exact dyadic rational.  Each arithmetic step rounds the
lower endpoint toward -inf and the upper endpoint toward +inf at the current
working precision, which is held in a context variable::

    >>> with working_precision(256):
    ...     x = Interval.exact(2).sqrt()
    >>> (x * x).contains(2), x.contains(Fraction(14142, 10**4))
    (True, False)

Comparisons are three-valued (see :class:`Verdict`): an interval comparison
either certifies a claim, certifies its negation, or reports that the
enclosures overlap at the current precision.
"""

from __future__ import annotations

import contextlib
import contextvars
import enum
import math
from fractions import Fraction

from mpmath.libmp import (
    fone,
    from_int,
    from_man_exp,
    from_rational,
    fzero,
    mpf_add,
    mpf_cmp,
    mpf_div,
    mpf_log,
    mpf_mul,
    mpf_neg,
    mpf_nthroot,
    mpf_sqrt,
    mpf_sub,
    round_ceiling,
    round_floor,
    round_nearest,
    to_float,
    to_man_exp,
    to_rational,
    to_str,
)

DEFAULT_PRECISION = 128

_PREC = contextvars.ContextVar("conjsep_working_precision", default=DEFAULT_PRECISION)


@contextlib.contextmanager
def working_precision(bits):
    """Temporarily set the working precision (in bits) of interval arithmetic."""
    if bits < 16:
        raise ValueError("working precision must be at least 16 bits")
    token = _PREC.set(int(bits))
    try:
        yield int(bits)
    finally:
        _PREC.reset(token)


def current_precision():
    return _PREC.get()


class Verdict(str, enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    INDETERMINATE = "indeterminate"

    @staticmethod
    def combine(verdicts):
        """Conjunction of verdicts: any failure wins, then any indeterminacy."""
        verdicts = list(verdicts)
        if any(v is Verdict.FAILS for v in verdicts):
            return Verdict.FAILS
        if any(v is Verdict.INDETERMINATE for v in verdicts):
            return Verdict.INDETERMINATE
        return Verdict.HOLDS


# -- dyadic helpers ---------------------------------------------------------


def to_mpf(x, rnd=round_nearest, prec=None):
    """Convert an int, Fraction, float or mpf tuple to an mpf tuple.

    Integers, floats and dyadic fractions convert exactly; other fractions are
    rounded in direction ``rnd``.
    """
    if isinstance(x, tuple):
        return x
    if isinstance(x, bool):
        x = int(x)
    if isinstance(x, int):
        return from_int(x)
    if isinstance(x, float):
        return _from_fraction(Fraction(x), rnd, prec)
    if isinstance(x, Fraction):
        return _from_fraction(x, rnd, prec)
    if isinstance(x, str):
        return _from_fraction(Fraction(x), rnd, prec)
    raise TypeError(f"cannot convert {type(x).__name__} to a dyadic")


def _from_fraction(q, rnd, prec):
    p, d = q.numerator, q.denominator
    if d & (d - 1) == 0:
        return from_man_exp(p, -(d.bit_length() - 1))
    return from_rational(p, d, prec or _PREC.get(), rnd)


def mpf_to_fraction(s):
    p, q = to_rational(s)
    return Fraction(int(p), int(q))


def dyadic_hex(s):
    """Exact hexadecimal rendering ``[-]0x<mantissa>p<exponent>`` of a dyadic."""
    man, exp = _signed_man_exp(s)
    if man == 0:
        return "0x0p0"
    sign = "-" if man < 0 else ""
    return f"{sign}0x{abs(man):x}p{exp}"


def parse_dyadic_hex(text):
    text = text.strip()
    sign = -1 if text.startswith("-") else 1
    body = text.lstrip("+-")
    if not body.startswith("0x"):
        raise ValueError(f"not a hex dyadic: {text!r}")
    man_txt, _, exp_txt = body[2:].partition("p")
    return from_man_exp(sign * int(man_txt, 16), int(exp_txt or 0))


def _lt(a, b):
    return mpf_cmp(a, b) < 0


def _min(*xs):
    best = xs[0]
    for x in xs[1:]:
        if mpf_cmp(x, best) < 0:
            best = x
    return best


def _max(*xs):
    best = xs[0]
    for x in xs[1:]:
        if mpf_cmp(x, best) > 0:
            best = x
    return best


def _signed_man_exp(s):
    # to_man_exp drops the sign bit of an mpf tuple
    man, exp = to_man_exp(s)
    return (-man if s[0] else man), exp


def _pow_round(s, k, prec, rnd):
    man, exp = _signed_man_exp(s)
    return from_man_exp(man**k, exp * k, prec, rnd)


def _exact_pow_cmp(y, n, x):
    """Sign of y**n - x, computed exactly."""
    man, exp = _signed_man_exp(y)
    return mpf_cmp(from_man_exp(man**n, exp * n), x)


def _root(x, n, prec, rnd):
    """Directed n-th root of a non-negative dyadic, verified by exact powering."""
    if x == fzero:
        return fzero
    y = mpf_nthroot(x, n, prec, rnd)
    # mpf_nthroot is not guaranteed to honour directed rounding; nudge until the
    # exact power check confirms the bound
    step = 1
    if rnd == round_floor:
        while _exact_pow_cmp(y, n, x) > 0:
            y = mpf_mul(y, from_man_exp((1 << prec) - step, -prec), prec, round_floor)
            step *= 2
    else:
        while _exact_pow_cmp(y, n, x) < 0:
            y = mpf_mul(y, from_man_exp((1 << prec) + step, -prec), prec, round_ceiling)
            step *= 2
    return y


# -- real intervals ---------------------------------------------------------


class Interval:
    """Closed real interval [lo, hi] with dyadic endpoints."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        lo = to_mpf(lo, round_floor)
        hi = lo if hi is None else to_mpf(hi, round_ceiling)
        if mpf_cmp(lo, hi) > 0:
            raise ValueError("interval lower endpoint exceeds upper endpoint")
        self.lo = lo
        self.hi = hi

    @classmethod
    def exact(cls, x):
        """Tightest enclosure of an int/Fraction/float (exact when dyadic)."""
        if isinstance(x, Interval):
            return x
        return cls(to_mpf(x, round_floor), to_mpf(x, round_ceiling))

    @classmethod
    def hull(cls, *items):
        items = [cls.exact(i) for i in items]
        return cls(_min(*[i.lo for i in items]), _max(*[i.hi for i in items]))

    # -- inspection --------------------------------------------------------

    def mid(self):
        return mpf_div(mpf_add(self.lo, self.hi), from_int(2), _PREC.get() + 8, round_nearest)

    def width(self):
        return mpf_sub(self.hi, self.lo, _PREC.get(), round_ceiling)

    def rad(self):
        return mpf_div(self.width(), from_int(2), _PREC.get(), round_ceiling)

    def is_point(self):
        return self.lo == self.hi

    def contains(self, x):
        if isinstance(x, Interval):
            return mpf_cmp(self.lo, x.lo) <= 0 and mpf_cmp(x.hi, self.hi) <= 0
        lo, hi = to_mpf(x, round_floor), to_mpf(x, round_ceiling)
        return mpf_cmp(self.lo, lo) <= 0 and mpf_cmp(hi, self.hi) <= 0

    __contains__ = contains

    def contains_zero(self):
        return mpf_cmp(self.lo, fzero) <= 0 <= mpf_cmp(self.hi, fzero)

    def interior_contains(self, other):
        return mpf_cmp(self.lo, other.lo) < 0 and mpf_cmp(other.hi, self.hi) < 0

    def overlaps(self, other):
        other = Interval.exact(other)
        return mpf_cmp(self.lo, other.hi) <= 0 and mpf_cmp(other.lo, self.hi) <= 0

    def intersect(self, other):
        lo, hi = _max(self.lo, other.lo), _min(self.hi, other.hi)
        if mpf_cmp(lo, hi) > 0:
            raise ValueError("intervals are disjoint")
        return Interval(lo, hi)

    def lower_float(self):
        return to_float(self.lo, rnd=round_floor)

    def upper_float(self):
        return to_float(self.hi, rnd=round_ceiling)

    def mid_float(self):
        return to_float(self.mid())

    def relative_width(self):
        """Width divided by the smallest magnitude in the interval (inf if it contains 0)."""
        if self.contains_zero():
            return math.inf
        mag = _min(abs_mpf(self.lo), abs_mpf(self.hi))
        return to_float(mpf_div(self.width(), mag, 53, round_ceiling))

    def log_bounds(self):
        """Float enclosure of log(x) for a positive interval, widened by a few ulps."""
        if mpf_cmp(self.lo, fzero) <= 0:
            raise ValueError("log of a non-positive interval")
        lo = to_float(mpf_log(self.lo, 80, round_floor))
        hi = to_float(mpf_log(self.hi, 80, round_ceiling))
        return (math.nextafter(math.nextafter(lo, -math.inf), -math.inf),
                math.nextafter(math.nextafter(hi, math.inf), math.inf))

    def log_mid(self):
        return to_float(mpf_log(self.mid(), 64))

    def __repr__(self):
        return f"Interval({to_str(self.lo, 12)}, {to_str(self.hi, 12)})"

    def decimal(self, digits=20):
        # nearest-rounded display only; the hex form is the exact record
        return [to_str(self.lo, digits), to_str(self.hi, digits)]

    def to_json(self):
        return {"hex": [dyadic_hex(self.lo), dyadic_hex(self.hi)], "dec": self.decimal()}

    @classmethod
    def from_json(cls, data):
        lo, hi = data["hex"]
        return cls(parse_dyadic_hex(lo), parse_dyadic_hex(hi))

    # -- arithmetic --------------------------------------------------------

    def __neg__(self):
        return Interval(mpf_neg(self.hi), mpf_neg(self.lo))

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        p = _PREC.get()
        return Interval(mpf_add(self.lo, other.lo, p, round_floor), mpf_add(self.hi, other.hi, p, round_ceiling))

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        p = _PREC.get()
        return Interval(mpf_sub(self.lo, other.hi, p, round_floor), mpf_sub(self.hi, other.lo, p, round_ceiling))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        p = _PREC.get()
        a, b, c, d = self.lo, self.hi, other.lo, other.hi
        if mpf_cmp(a, fzero) >= 0 and mpf_cmp(c, fzero) >= 0:
            return Interval(mpf_mul(a, c, p, round_floor), mpf_mul(b, d, p, round_ceiling))
        pairs = ((a, c), (a, d), (b, c), (b, d))
        lows = [mpf_mul(x, y, p, round_floor) for x, y in pairs]
        highs = [mpf_mul(x, y, p, round_ceiling) for x, y in pairs]
        return Interval(_min(*lows), _max(*highs))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if other.contains_zero():
            raise ZeroDivisionError("interval division by an interval containing 0")
        p = _PREC.get()
        a, b, c, d = self.lo, self.hi, other.lo, other.hi
        pairs = ((a, c), (a, d), (b, c), (b, d))
        lows = [mpf_div(x, y, p, round_floor) for x, y in pairs]
        highs = [mpf_div(x, y, p, round_ceiling) for x, y in pairs]
        return Interval(_min(*lows), _max(*highs))

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def __abs__(self):
        if mpf_cmp(self.lo, fzero) >= 0:
            return self
        if mpf_cmp(self.hi, fzero) <= 0:
            return -self
        return Interval(fzero, _max(mpf_neg(self.lo), self.hi))

    def __pow__(self, k):
        if isinstance(k, Fraction):
            if k.denominator == 1:
                return self ** k.numerator
            return self.root(k.denominator) ** k.numerator
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return Interval.exact(1) / (self ** (-k))
        if k == 0:
            return Interval.exact(1)
        p = _PREC.get()
        if k % 2 == 0:
            mag = abs(self)
            return Interval(_pow_round(mag.lo, k, p, round_floor), _pow_round(mag.hi, k, p, round_ceiling))
        return Interval(_pow_round(self.lo, k, p, round_floor), _pow_round(self.hi, k, p, round_ceiling))

    def sqrt(self):
        if mpf_cmp(self.lo, fzero) < 0:
            raise ValueError("sqrt of an interval with negative part")
        p = _PREC.get()
        lo = mpf_sqrt(self.lo, p, round_floor)
        hi = mpf_sqrt(self.hi, p, round_ceiling)
        if _exact_pow_cmp(lo, 2, self.lo) > 0:
            lo = _root(self.lo, 2, p, round_floor)
        if _exact_pow_cmp(hi, 2, self.hi) < 0:
            hi = _root(self.hi, 2, p, round_ceiling)
        return Interval(lo, hi)

    def root(self, n):
        """Real n-th root of a non-negative interval."""
        if n == 2:
            return self.sqrt()
        if mpf_cmp(self.lo, fzero) < 0:
            raise ValueError("root of an interval with negative part")
        p = _PREC.get()
        return Interval(_root(self.lo, n, p, round_floor), _root(self.hi, n, p, round_ceiling))

    def max(self, other):
        other = _coerce(other)
        return Interval(_max(self.lo, other.lo), _max(self.hi, other.hi))

    def min(self, other):
        other = _coerce(other)
        return Interval(_min(self.lo, other.lo), _min(self.hi, other.hi))

    # -- certified comparisons ---------------------------------------------

    def le(self, other):
        """Verdict on the claim ``self <= other`` for every pair of enclosed values."""
        other = _coerce(other)
        if mpf_cmp(self.hi, other.lo) <= 0:
            return Verdict.HOLDS
        if mpf_cmp(self.lo, other.hi) > 0:
            return Verdict.FAILS
        return Verdict.INDETERMINATE

    def ge(self, other):
        return _coerce(other).le(self)

    def lt(self, other):
        other = _coerce(other)
        if mpf_cmp(self.hi, other.lo) < 0:
            return Verdict.HOLDS
        if mpf_cmp(self.lo, other.hi) >= 0:
            return Verdict.FAILS
        return Verdict.INDETERMINATE

    def gt(self, other):
        return _coerce(other).lt(self)

    def consistent_with(self, other):
        """Identity check: HOLDS when the enclosures intersect, FAILS when disjoint."""
        return Verdict.HOLDS if self.overlaps(_coerce(other)) else Verdict.FAILS


def abs_mpf(s):
    return mpf_neg(s) if mpf_cmp(s, fzero) < 0 else s


def _coerce(x):
    if isinstance(x, Interval):
        return x
    if isinstance(x, (int, Fraction, float)):
        return Interval.exact(x)
    return NotImplemented


def interval_product(items):
    out = Interval.exact(1)
    for item in items:
        out = out * item
    return out


ONE = Interval(fone)
ZERO = Interval(fzero)


# -- complex boxes ----------------------------------------------------------


class CBox:
    """Axis-parallel rectangle re x im in the complex plane."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=None):
        self.re = Interval.exact(re)
        self.im = Interval.exact(0) if im is None else Interval.exact(im)

    @classmethod
    def exact(cls, z):
        if isinstance(z, CBox):
            return z
        if isinstance(z, Interval):
            return cls(z, ZERO)
        if isinstance(z, complex):
            return cls(Interval.exact(z.real), Interval.exact(z.imag))
        return cls(Interval.exact(z), ZERO)

    @classmethod
    def square(cls, center_re, center_im, radius):
        """The box [cr - rad, cr + rad] x [ci - rad, ci + rad] (outward rounded)."""
        radius = Interval(radius).hi
        # exact corner arithmetic: rounding here would swamp radii far below
        # the working precision
        re = Interval(mpf_sub(center_re, radius), mpf_add(center_re, radius))
        im = Interval(mpf_sub(center_im, radius), mpf_add(center_im, radius))
        return cls(re, im)

    def __repr__(self):
        return f"CBox(re={self.re!r}, im={self.im!r})"

    def conj(self):
        return CBox(self.re, -self.im)

    def __neg__(self):
        return CBox(-self.re, -self.im)

    def __add__(self, other):
        other = _ccoerce(other)
        return CBox(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _ccoerce(other)
        return CBox(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _ccoerce(other) - self

    def __mul__(self, other):
        other = _ccoerce(other)
        if other.im.is_point() and other.im.lo == fzero:
            return CBox(self.re * other.re, self.im * other.re)
        return CBox(self.re * other.re - self.im * other.im, self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def abs2(self):
        return self.re ** 2 + self.im ** 2

    def __abs__(self):
        if self.im.is_point() and self.im.lo == fzero:
            return abs(self.re)
        return self.abs2().sqrt()

    def __truediv__(self, other):
        other = _ccoerce(other)
        if other.im.is_point() and other.im.lo == fzero:
            return CBox(self.re / other.re, self.im / other.re)
        den = other.abs2()
        if den.contains_zero():
            raise ZeroDivisionError("complex box division by a box containing 0")
        num = self * other.conj()
        return CBox(num.re / den, num.im / den)

    def __rtruediv__(self, other):
        return _ccoerce(other) / self

    def contains_zero(self):
        return self.re.contains_zero() and self.im.contains_zero()

    def interior_contains(self, other):
        return self.re.interior_contains(other.re) and self.im.interior_contains(other.im)

    def contains(self, other):
        other = _ccoerce(other)
        return self.re.contains(other.re) and self.im.contains(other.im)

    def overlaps(self, other):
        return self.re.overlaps(other.re) and self.im.overlaps(other.im)

    def mid_complex(self):
        return complex(self.re.mid_float(), self.im.mid_float())


def _ccoerce(x):
    if isinstance(x, CBox):
        return x
    return CBox.exact(x)


def horner(coeffs, z):
    """Evaluate sum coeffs[k] z^k (ascending integer coefficients) on a box or interval."""
    acc = None
    for c in reversed(coeffs):
        acc = Interval.exact(c) if acc is None else acc * z + c
    return acc


def pow_fraction(base, exponent):
    """base**exponent for a positive interval base and rational exponent."""
    exponent = Fraction(exponent)
    return base ** exponent
