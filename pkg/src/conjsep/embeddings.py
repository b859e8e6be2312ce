"""Certified enclosures of all complex conjugates of an algebraic number.

Roots are approximated with mpmath's simultaneous iteration and then
certified one by one with the complex Krawczyk operator on a square box.
A box symmetric about the real axis that holds exactly one root holds a real
root; a box in the open upper half plane and its mirror image hold a
conjugate pair.  Once ``r`` pairwise disjoint boxes are certified, every root
is accounted for.

Label convention (1-based): real roots first in ascending order, then complex
pairs ordered by real part (ties by imaginary part), the member with positive
imaginary part first.
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import mpmath
from mpmath.libmp import (
    fzero,
    mpf_abs,
    mpf_add,
    mpf_cmp,
    mpf_neg,
    mpf_sub,
    round_ceiling,
)

from .intervals import CBox, Interval, dyadic_hex, horner, parse_dyadic_hex, working_precision
from .polynomial import IntPolynomial, count_real_roots, transform_poly

log = logging.getLogger(__name__)

LABEL_CONVENTION = "real-ascending-then-pairs-by-real-part-positive-imag-first"
PRECISION_CAP = 2**16


class PrecisionExhausted(RuntimeError):
    """Raised when enclosures cannot be separated below the working-precision cap."""


class _Retry(Exception):
    pass


@dataclass(frozen=True)
class Enclosure:
    """Square box of half-width ``radius`` around a dyadic complex center."""

    center_re: tuple
    center_im: tuple
    radius: tuple
    is_real: bool

    def box(self) -> CBox:
        return CBox.square(self.center_re, self.center_im, self.radius)

    def mirrored(self) -> "Enclosure":
        return Enclosure(self.center_re, mpf_neg(self.center_im), self.radius, self.is_real)

    def approx(self) -> complex:
        return complex(mpmath.mp.make_mpf(self.center_re), mpmath.mp.make_mpf(self.center_im))

    def to_json(self):
        return {
            "re": dyadic_hex(self.center_re),
            "im": dyadic_hex(self.center_im),
            "radius": dyadic_hex(self.radius),
            "real": self.is_real,
        }

    @classmethod
    def from_json(cls, data):
        return cls(parse_dyadic_hex(data["re"]), parse_dyadic_hex(data["im"]),
                   parse_dyadic_hex(data["radius"]), bool(data["real"]))


@dataclass(frozen=True)
class EmbeddingSet:
    poly: IntPolynomial
    enclosures: Tuple[Enclosure, ...]
    precision_bits: int
    working_bits: int
    pairing: Dict[int, int] = field(default_factory=dict, compare=False)

    @property
    def r(self):
        return len(self.enclosures)

    @property
    def labels(self):
        return list(range(1, self.r + 1))

    @property
    def signature(self):
        n_real = sum(1 for e in self.enclosures if e.is_real)
        return n_real, (self.r - n_real) // 2

    def real_labels(self):
        return [k for k in self.labels if self.enclosures[k - 1].is_real]

    def complex_labels(self):
        return [k for k in self.labels if not self.enclosures[k - 1].is_real]

    def is_real(self, label):
        return self.enclosures[label - 1].is_real

    def conjugate(self, label) -> CBox:
        """Certified box containing the conjugate with the given label."""
        return self.enclosures[label - 1].box()

    def boxes(self):
        return [e.box() for e in self.enclosures]

    def approximations(self):
        return [e.approx() for e in self.enclosures]

    def refine(self, extra_bits: int) -> "EmbeddingSet":
        return refine(self, extra_bits)

    def to_json(self):
        return {
            "poly": list(self.poly.coeffs),
            "precision_bits": self.precision_bits,
            "working_bits": self.working_bits,
            "label_convention": LABEL_CONVENTION,
            "signature": list(self.signature),
            "pairing": {str(k): v for k, v in sorted(self.pairing.items())},
            "enclosures": [dict(label=k, **e.to_json()) for k, e in zip(self.labels, self.enclosures)],
        }

    @classmethod
    def from_json(cls, data, recertify=True):
        poly = IntPolynomial(tuple(data["poly"]))
        encs = tuple(Enclosure.from_json(e) for e in data["enclosures"])
        out = cls(poly, encs, int(data["precision_bits"]), int(data["working_bits"]), _pairing(encs))
        if recertify:
            verify_embedding_set(out)
        return out


@dataclass(frozen=True)
class SigmaSet:
    indices: Tuple[int, ...]

    def __post_init__(self):
        idx = tuple(sorted(set(int(i) for i in self.indices)))
        if len(idx) != len(tuple(self.indices)):
            raise ValueError(f"repeated label in sigma {list(self.indices)}")
        if len(idx) < 2:
            raise ValueError("sigma needs at least two distinct labels")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def parse(cls, text: str) -> "SigmaSet":
        try:
            return cls(tuple(int(t) for t in text.split(",") if t.strip()))
        except ValueError as exc:
            raise ValueError(f"malformed sigma {text!r}: {exc}") from None

    @classmethod
    def full(cls, r):
        return cls(tuple(range(1, r + 1)))

    def check(self, r):
        for i in self.indices:
            if not 1 <= i <= r:
                raise ValueError(f"label {i} out of range 1..{r}")
        return self

    def pairs(self):
        idx = self.indices
        return [(idx[a], idx[b]) for a in range(len(idx)) for b in range(a + 1, len(idx))]

    def map(self, perm: Dict[int, int]) -> "SigmaSet":
        return SigmaSet(tuple(perm[i] for i in self.indices))

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __str__(self):
        return ",".join(str(i) for i in self.indices)


@dataclass(frozen=True)
class AlgebraicNumber:
    """A defining polynomial together with the label of the distinguished conjugate."""

    embset: EmbeddingSet
    label: int = 1

    @property
    def poly(self):
        return self.embset.poly

    @property
    def degree(self):
        return self.embset.r

    def root(self) -> CBox:
        return self.embset.conjugate(self.label)

    @classmethod
    def from_poly(cls, poly: IntPolynomial, label: int = 1, precision_bits: int = 128):
        return cls(compute_embeddings(poly, precision_bits), label)


# -- helpers -------------------------------------------------------------------


def _mpf(x):
    if isinstance(x, tuple):
        return mpmath.mp.make_mpf(x)
    return mpmath.mpf(x)


def _height_bits(poly):
    return max(abs(c).bit_length() for c in poly.coeffs)


def _target_radius(center_re, center_im, p):
    """2^-p times max(|z|, 2^-p), rounded down."""
    mag = max(abs(_mpf(center_re)), abs(_mpf(center_im)))
    floor = mpmath.ldexp(1, -p)
    scale = mag if mag > floor else floor
    with mpmath.workprec(64):
        t = mpmath.ldexp(scale, -p) * mpmath.mpf("0.5")
    return t._mpf_


def _pairing(encs):
    out = {}
    k = 0
    while k < len(encs):
        if encs[k].is_real:
            k += 1
            continue
        out[k + 1] = k + 2
        out[k + 2] = k + 1
        k += 2
    return out


def _krawczyk(coeffs, dcoeffs, zr, zi, rho, work):
    """True when the square box of half-width rho around zr + i zi provably holds one root."""
    with working_precision(work):
        X = CBox.square(zr, zi, rho)
        z = CBox(Interval(zr), Interval(zi))
        try:
            dX = CBox.exact(horner(dcoeffs, X))
        except ZeroDivisionError:
            return False
        if dX.contains_zero():
            return False
        fz = CBox.exact(horner(coeffs, z))
        dz = CBox.exact(horner(dcoeffs, z))
        with mpmath.workprec(work):
            dzm = mpmath.mpc(_mpf(dz.re.mid()), _mpf(dz.im.mid()))
            if dzm == 0:
                return False
            y = 1 / dzm
        Y = CBox(Interval(y.real._mpf_), Interval(y.imag._mpf_))
        K = z - Y * fz + (1 - Y * dX) * (X - z)
        return X.interior_contains(K)


def _newton(coeffs_desc, z, work, iters):
    with mpmath.workprec(work):
        for _ in range(iters):
            fz, dfz = mpmath.polyval(coeffs_desc, z, derivative=True)
            if dfz == 0:
                break
            step = fz / dfz
            z = z - step
            if step == 0:
                break
        fz, dfz = mpmath.polyval(coeffs_desc, z, derivative=True)
        err = abs(fz / dfz) if dfz != 0 else mpmath.inf
    return z, err


def _certify_root(poly, z, p, work, real, inside=None):
    """Krawczyk-certified Enclosure around approximation z, radius within the p-bit target."""
    coeffs = poly.coeffs
    dcoeffs = poly.derivative().coeffs
    desc = [int(c) for c in reversed(coeffs)]
    with mpmath.workprec(work):
        z = mpmath.mpc(z)
        if real:
            z = mpmath.mpc(z.real, 0)
        z, err = _newton(desc, z, work, 60)
        if real:
            z = mpmath.mpc(z.real, 0)
            z, err = _newton(desc, z, work, 2)
            z = mpmath.mpc(z.real, 0)
    zr = z.real._mpf_
    zi = fzero if real else z.imag._mpf_
    target = _target_radius(zr, zi, p)
    tmin = mpmath.ldexp(max(abs(_mpf(zr)), abs(_mpf(zi)), mpmath.ldexp(1, -p)), -work + 24)
    with mpmath.workprec(64):
        rho = max(4 * err, tmin)
        tgt = _mpf(target)
        candidates = []
        while rho < tgt:
            candidates.append(rho)
            rho *= 16
        candidates.append(tgt)
    for rho in candidates:
        rho_m = rho._mpf_
        if not _krawczyk(coeffs, dcoeffs, zr, zi, rho_m, work):
            continue
        enc = Enclosure(zr, zi, rho_m, real)
        if not real:
            with working_precision(work):
                if mpf_cmp(enc.box().im.lo, fzero) <= 0:
                    raise _Retry("complex root box touches the real axis")
        if inside is not None:
            with working_precision(work):
                if not inside.box().contains(enc.box()):
                    continue
        return enc
    raise _Retry("Krawczyk test failed at every radius")


def _cmp_center(a: Enclosure, b: Enclosure):
    # real parts indistinguishable at the enclosure scale: fall back to imaginary parts
    gap = mpf_abs(mpf_sub(a.center_re, b.center_re))
    if mpf_cmp(gap, mpf_add(a.radius, b.radius)) <= 0:
        return mpf_cmp(a.center_im, b.center_im) or mpf_cmp(a.center_re, b.center_re)
    return mpf_cmp(a.center_re, b.center_re)


def _order(reals, uppers):
    reals = sorted(reals, key=functools.cmp_to_key(_cmp_center))
    uppers = sorted(uppers, key=functools.cmp_to_key(_cmp_center))
    out = list(reals)
    for e in uppers:
        out.append(e)
        out.append(e.mirrored())
    return tuple(out)


def _check_disjoint(encs, work):
    with working_precision(work):
        boxes = [e.box() for e in encs]
        for i in range(len(boxes)):
            for j in range(i + 1, len(boxes)):
                if boxes[i].overlaps(boxes[j]):
                    return False
    return True


def verify_embedding_set(embset: EmbeddingSet) -> None:
    """Re-run the Krawczyk and disjointness checks; raise ValueError on failure."""
    poly = embset.poly
    coeffs, dcoeffs = poly.coeffs, poly.derivative().coeffs
    seen = set()
    for k, e in zip(embset.labels, embset.enclosures):
        if not e.is_real and k in seen:
            continue
        if e.is_real and e.center_im != fzero:
            raise ValueError(f"real enclosure {k} is not centered on the real axis")
        if not _krawczyk(coeffs, dcoeffs, e.center_re, e.center_im, e.radius, embset.working_bits):
            raise ValueError(f"enclosure {k} failed the Krawczyk test")
        if not e.is_real:
            seen.add(embset.pairing[k])
    if not _check_disjoint(embset.enclosures, embset.working_bits):
        raise ValueError("enclosures are not pairwise disjoint")
    if len(embset.enclosures) != poly.degree:
        raise ValueError("number of enclosures differs from the degree")


# -- public operations -----------------------------------------------------------


def compute_embeddings(poly: IntPolynomial, precision_bits: int = 64, cap: int = PRECISION_CAP) -> EmbeddingSet:
    """Certified, labelled enclosures of all roots of a squarefree ``poly``.

    Each enclosure has radius at most 2^-precision_bits * max(|root|, 2^-precision_bits).
    """
    if precision_bits < 32:
        raise ValueError("precision_bits must be at least 32")
    if poly.degree < 1:
        raise ValueError("need a polynomial of degree at least 1")
    n_real = count_real_roots(poly)
    work = 64
    while work < precision_bits + 2 * _height_bits(poly) + 64:
        work *= 2
    while work <= cap:
        try:
            return _isolate(poly, precision_bits, work, n_real)
        except (_Retry, mpmath.libmp.NoConvergence) as exc:
            log.debug("isolation of %s at %d bits failed (%s); doubling", poly, work, exc)
            work *= 2
    raise PrecisionExhausted(f"could not separate the roots of {poly} below {cap} working bits")


def _isolate(poly, p, work, n_real):
    r = poly.degree
    desc = [int(c) for c in reversed(poly.coeffs)]
    with mpmath.workprec(work):
        approx = mpmath.polyroots(desc, maxsteps=max(100, 20 * r), extraprec=work, error=False)
        if r == 1:
            approx = [approx] if not isinstance(approx, list) else approx
        approx = sorted((mpmath.mpc(z) for z in approx), key=lambda z: abs(z.imag))
    real_approx = approx[:n_real]
    rest = approx[n_real:]
    uppers_approx = sorted(rest, key=lambda z: -z.imag)[: (r - n_real) // 2]
    reals = [_certify_root(poly, z, p, work, True) for z in real_approx]
    uppers = [_certify_root(poly, z if z.imag > 0 else z.conjugate(), p, work, False) for z in uppers_approx]
    encs = _order(reals, uppers)
    if not _check_disjoint(encs, work):
        raise _Retry("enclosures overlap")
    return EmbeddingSet(poly, encs, p, work, _pairing(encs))


def refine(embset: EmbeddingSet, extra_bits: int, cap: int = PRECISION_CAP) -> EmbeddingSet:
    """Shrink every enclosure to the (precision_bits + extra_bits) target, keeping labels."""
    if extra_bits <= 0:
        return embset
    p = embset.precision_bits + extra_bits
    poly = embset.poly
    work = embset.working_bits
    while work < p + 2 * _height_bits(poly) + 64:
        work *= 2
    while work <= cap:
        try:
            out = []
            skip = set()
            for k, e in zip(embset.labels, embset.enclosures):
                if k in skip:
                    continue
                z = mpmath.mpc(_mpf(e.center_re), _mpf(e.center_im))
                new = _certify_root(poly, z, p, work, e.is_real, inside=e)
                out.append(new)
                if not e.is_real:
                    out.append(new.mirrored())
                    skip.add(embset.pairing[k])
            return EmbeddingSet(poly, tuple(out), p, work, dict(embset.pairing))
        except _Retry as exc:
            log.debug("refinement at %d bits failed (%s); doubling", work, exc)
            work *= 2
    raise PrecisionExhausted(f"could not refine the roots of {poly} below {cap} working bits")


def moebius_image(box: CBox, a, b, c, d, real=False) -> CBox:
    """Box enclosing (a z + b)/(c z + d) for every z in ``box``."""
    if real:
        x = box.re
        return CBox((x * a + b) / (x * c + d))
    return (box * a + b) / (box * c + d)


def _enclosure_from_box(box: CBox, real: bool, work) -> Enclosure:
    with working_precision(work):
        cr = box.re.mid()
        ci = fzero if real else box.im.mid()
        rad = fzero
        for lo, hi, c in ((box.re.lo, box.re.hi, cr), (box.im.lo, box.im.hi, ci)):
            for gap in (mpf_sub(hi, c, work, round_ceiling), mpf_sub(c, lo, work, round_ceiling)):
                if mpf_cmp(gap, rad) > 0:
                    rad = gap
    return Enclosure(cr, ci, rad, real)


def embeddings_via_moebius(src: EmbeddingSet, m, precision_bits: Optional[int] = None,
                           cap: int = PRECISION_CAP):
    """Embedding set of the transformed polynomial built from Möbius images of ``src``.

    Returns ``(target_embset, perm)`` where ``perm[i]`` is the target label of
    the image of source conjugate ``i``.  Containment holds by construction;
    disjointness of the r image boxes certifies that each holds exactly one root.
    """
    a, b, c, d = (m.a, m.b, m.c, m.d) if not isinstance(m, (tuple, list)) else m
    target = transform_poly(src.poly, (a, b, c, d))
    p = precision_bits or src.precision_bits
    cur = src
    tries = 0
    while True:
        tries += 1
        work = max(cur.working_bits, 64)
        try:
            images = {}
            with working_precision(work):
                for k, e in zip(cur.labels, cur.enclosures):
                    if k in images:
                        continue
                    img = moebius_image(e.box(), a, b, c, d, real=e.is_real)
                    images[k] = _enclosure_from_box(img, e.is_real, work)
                    if not e.is_real:
                        images[cur.pairing[k]] = images[k].mirrored()
            worst = 0
            for enc in images.values():
                ratio = _mpf(enc.radius) / _mpf(_target_radius(enc.center_re, enc.center_im, p))
                worst = max(worst, ratio)
            if worst > 1:
                raise _Retry(("radius", worst))
            for k, enc in images.items():
                if not enc.is_real and mpf_cmp(mpf_sub(mpf_abs(enc.center_im), enc.radius), fzero) <= 0:
                    raise _Retry(("axis", 1))
            if not _check_disjoint(list(images.values()), work):
                raise _Retry(("overlap", 1))
        except ZeroDivisionError:
            worst = mpmath.mpf(2) ** 32
        except _Retry as exc:
            worst = exc.args[0][1]
        else:
            break
        extra = int(mpmath.ceil(mpmath.log(max(worst, 2), 2))) + 16
        if cur.working_bits > cap or tries > 40:
            raise PrecisionExhausted("Möbius images could not be separated below the precision cap")
        cur = refine(cur, extra, cap)
    reals = [e for e in images.values() if e.is_real]
    uppers = [e for e in images.values() if not e.is_real and mpf_cmp(e.center_im, fzero) > 0]
    encs = _order(reals, uppers)
    index = {}
    for k, e in images.items():
        index[k] = next(j + 1 for j, t in enumerate(encs) if t == e)
    out = EmbeddingSet(target, encs, p, max(work, cur.working_bits), _pairing(encs))
    return out, index


def track_root(embset: EmbeddingSet, m, target: Optional[EmbeddingSet] = None,
               cap: int = PRECISION_CAP) -> Dict[int, int]:
    """Label permutation carrying source conjugates to the target's own labels.

    ``target`` defaults to a fresh :func:`compute_embeddings` of the transformed
    polynomial.  The image of source box i must meet exactly one target box.
    """
    a, b, c, d = (m.a, m.b, m.c, m.d) if not isinstance(m, (tuple, list)) else m
    if target is None:
        target = compute_embeddings(transform_poly(embset.poly, (a, b, c, d)), embset.precision_bits)
    cur = embset
    while True:
        work = max(cur.working_bits, target.working_bits)
        perm = {}
        ambiguous = False
        with working_precision(work):
            tboxes = target.boxes()
            for k, e in zip(cur.labels, cur.enclosures):
                try:
                    img = moebius_image(e.box(), a, b, c, d, real=e.is_real)
                except ZeroDivisionError:
                    ambiguous = True
                    break
                hits = [j + 1 for j, tb in enumerate(tboxes) if tb.overlaps(img)]
                if len(hits) == 1:
                    perm[k] = hits[0]
                elif not hits:
                    raise ValueError("Möbius image meets no target enclosure; target does not match")
                else:
                    ambiguous = True
                    break
        if not ambiguous:
            return perm
        if cur.working_bits > cap:
            raise PrecisionExhausted("image boxes straddle target enclosures at the precision cap")
        cur = refine(cur, 64, cap)
