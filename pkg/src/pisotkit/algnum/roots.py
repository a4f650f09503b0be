"""Real root isolation, certified refinement, and Pisot classification.

Isolation uses Sturm counts and exact bisection, so every
``RealAlgebraic`` carries a bracket that provably contains exactly one
root.  Refinement accelerates bisection with Newton steps whose results
are re-certified by exact integer sign evaluations; nothing about the
returned enclosure depends on floating point.

Conjugate moduli run a floating Aberth iteration (mpmath) to locate all
complex roots, then certify a-posteriori: each root estimate gets a disk
of radius d*|p(z)| / (|lead| * prod |z - z_j|), every factor evaluated
in exact rational arithmetic with outward rounding.  Each such disk
contains at least one root, so pairwise-disjoint disks contain exactly
one root apiece.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction

import mpmath

try:
    from gmpy2 import mpz as _mpz
except ImportError:  # pragma: no cover
    _mpz = int

from ..errors import BoundaryAmbiguous, DomainError, Inconclusive, PrecisionExhausted
from .poly import IntPolynomial, _horner, _sign
from .precision import (
    PrecisionReal,
    dyadic_fraction,
    escalation,
    max_extra_bits,
    sqrt_lower,
    sqrt_upper,
)


def bits_for(eps: Fraction) -> int:
    """Smallest convenient b with 2**-b <= eps (may overshoot by one)."""
    if eps <= 0:
        raise DomainError("error target must be positive")
    q = 1 / Fraction(eps)
    if q <= 1:
        return 1
    return max(1, q.numerator.bit_length() - q.denominator.bit_length() + 1)


def _round_dyadic(q: Fraction, bits: int) -> Fraction:
    scaled = q * (1 << bits)
    man = (scaled.numerator * 2 + scaled.denominator) // (2 * scaled.denominator)
    return dyadic_fraction(man, bits)


def _dyadic_mantissa(q: Fraction) -> tuple[int, int] | None:
    """Return (mantissa, bits) if q = mantissa / 2**bits, else None."""
    den = q.denominator
    bits = den.bit_length() - 1
    if den != 1 << bits:
        return None
    return q.numerator, bits


def _eval_scaled(coeffs, mantissa: int, bits: int) -> int:
    """Exact p(mantissa / 2**bits) * 2**(bits*degree) as an integer."""
    x = _mpz(mantissa)
    acc = _mpz(coeffs[-1])
    scale = 0
    for s in range(len(coeffs) - 2, -1, -1):
        scale += bits
        acc = acc * x + (_mpz(coeffs[s]) << scale)
    return acc


class _PolyEval:
    """Sign and Newton-step evaluation, fast on dyadic points."""

    def __init__(self, coeffs):
        self.coeffs = coeffs
        self.dcoeffs = tuple(s * coeffs[s] for s in range(1, len(coeffs)))

    def sign_at(self, q: Fraction) -> int:
        dy = _dyadic_mantissa(q)
        if dy is None:
            return _sign(_horner(self.coeffs, q))
        return _sign(_eval_scaled(self.coeffs, dy[0], dy[1]))

    def newton_from(self, q: Fraction, grid_bits: int = 0) -> Fraction | None:
        """One Newton step from a dyadic point, truncated to the 2**-grid_bits
        grid (or q's own grid if coarser bits are requested).

        The result must land on a grid strictly finer than the step size,
        otherwise it collapses onto the starting bracket's endpoints.
        """
        dy = _dyadic_mantissa(q)
        if dy is None:
            px = _horner(self.coeffs, q)
            dpx = _horner(self.dcoeffs, q)
            if dpx == 0:
                return None
            return q - px / dpx
        man, bits = dy
        if grid_bits > bits:
            man <<= grid_bits - bits
            bits = grid_bits
        px = _eval_scaled(self.coeffs, man, bits)
        dpx = _eval_scaled(self.dcoeffs, man, bits)
        if dpx == 0:
            return None
        # px carries scale 2**(bits*d) and dpx carries 2**(bits*(d-1)),
        # so px // dpx is the Newton displacement in 2**-bits grid units.
        # The floor costs at most one grid unit, which the bracketing
        # step absorbs.
        step = int(px) // int(dpx)
        return dyadic_fraction(man - step, bits)


class RealAlgebraic:
    """A real root of an integer polynomial, known through a shrinking bracket.

    Invariant: either lo == hi (an exact rational root) or
    p(lo) * p(hi) < 0 and [lo, hi] contains exactly one root of p.
    Refinement results are cached; the bracket only ever shrinks.
    """

    __slots__ = ("poly", "_lo", "_hi", "_sign_lo", "_lock", "_eval")

    def __init__(self, poly: IntPolynomial, lo, hi, _trusted: bool = False):
        lo = Fraction(lo)
        hi = Fraction(hi)
        if lo > hi:
            raise DomainError("bracket must satisfy lo <= hi")
        if not _trusted:
            poly.require_squarefree()
            if lo == hi:
                if poly(lo) != 0:
                    raise DomainError(f"{lo} is not a root of {poly}")
            else:
                if poly(lo) == 0 or poly(hi) == 0:
                    raise DomainError("open bracket endpoints must not be roots")
                if _sign(poly(lo)) * _sign(poly(hi)) >= 0:
                    raise DomainError("bracket endpoints must straddle a sign change")
                if poly.count_roots(lo, hi) != 1:
                    raise DomainError("bracket must isolate exactly one root")
        self.poly = poly
        self._lo = lo
        self._hi = hi
        self._sign_lo = 0 if lo == hi else _sign(poly(lo))
        self._lock = threading.Lock()
        self._eval = _PolyEval(poly.coeffs)

    @property
    def is_exact(self) -> bool:
        return self._lo == self._hi

    @property
    def bracket(self) -> tuple[Fraction, Fraction]:
        return self._lo, self._hi

    def refine(self, target) -> PrecisionReal:
        """Enclosure with abs_error <= target (Fraction, or int = bits)."""
        eps = Fraction(1, 1 << target) if isinstance(target, int) else Fraction(target)
        if eps <= 0:
            raise DomainError("target error must be positive")
        with self._lock:
            return self._refine_locked(eps)

    def _set_exact(self, x: Fraction):
        self._lo = x
        self._hi = x
        self._sign_lo = 0

    def _shrink(self, x: Fraction, sx: int):
        if sx == self._sign_lo:
            self._lo = x
        else:
            self._hi = x

    def _refine_locked(self, eps: Fraction) -> PrecisionReal:
        while True:
            lo, hi = self._lo, self._hi
            if lo == hi:
                return PrecisionReal(lo, Fraction(0), bits_for(eps))
            width = hi - lo
            if width <= eps:
                # Snap the returned midpoint onto a dyadic grid: enclosures
                # with power-of-two denominators keep all downstream
                # Fraction arithmetic cheap.  The half-grid slack stays
                # within the requested eps.
                out_bits = bits_for(eps) + 2
                mid = _round_dyadic((lo + hi) / 2, out_bits)
                return PrecisionReal(
                    mid, width / 2 + Fraction(1, 1 << (out_bits + 1)), bits_for(eps)
                )
            acc = max(4, bits_for(width) if width < 1 else 1)
            work = 2 * acc + 48

            # Newton candidate from the (dyadic-rounded) midpoint.
            mid = _round_dyadic((lo + hi) / 2, work)
            if not lo < mid < hi:
                mid = (lo + hi) / 2
            if self._probe(mid):
                continue
            cand = self._eval.newton_from(mid, work)
            if cand is not None and self._lo < cand < self._hi and cand != mid:
                if self._probe(cand):
                    continue
                # Close in on the root side of the Newton point: Newton
                # error shrinks quadratically, so a short geometric probe
                # usually pins a tiny bracket in a couple of evaluations.
                self._close_near(cand, width, eps, work)
            # Guarantee at least bisection progress per round.
            if self._hi - self._lo > width / 2:
                m2 = _round_dyadic((self._lo + self._hi) / 2, work)
                if not self._lo < m2 < self._hi:
                    m2 = (self._lo + self._hi) / 2
                self._probe(m2)

    def _probe(self, x: Fraction) -> bool:
        """Evaluate the sign at x and shrink; True if x was an exact root."""
        sx = self._eval.sign_at(x)
        if sx == 0:
            self._set_exact(x)
            return True
        self._shrink(x, sx)
        return False

    def _close_near(self, anchor: Fraction, prev_width: Fraction, eps: Fraction, work: int):
        """March a geometrically growing probe from the Newton point.

        After ``_probe(anchor)`` the anchor is one bracket endpoint; the
        root sits on its other side, typically within O(prev_width**2).
        """
        if anchor == self._lo:
            direction = 1
        elif anchor == self._hi:
            direction = -1
        else:
            return
        bits = max(work, bits_for(eps) + 8)
        delta = max(eps / 2, prev_width * prev_width)
        for _ in range(4):
            if self._hi - self._lo <= 2 * delta:
                return
            z = _round_dyadic(anchor + direction * delta, bits)
            if not self._lo < z < self._hi:
                return
            if self._probe(z):
                return
            delta *= 256

    def approx_float(self) -> float:
        return float(self.refine(60).value)

    def __repr__(self):
        if self.is_exact:
            return f"RealAlgebraic({self.poly!r}, root={self._lo})"
        return (
            f"RealAlgebraic({self.poly!r}, bracket=({float(self._lo):.6g},"
            f" {float(self._hi):.6g}))"
        )


def _nonroot_point(poly: IntPolynomial, lo: Fraction, hi: Fraction) -> Fraction:
    mid = (lo + hi) / 2
    step = (hi - lo) / 4
    while poly(mid) == 0 and step > 0:
        mid = mid + step
        step /= 4
    return mid


def isolate_real_roots(poly: IntPolynomial) -> list[RealAlgebraic]:
    """All real roots as isolating brackets, sorted increasing.

    Raises NotSquarefree when p shares a factor with p'.  Returns [] for
    polynomials without real roots (x^2 + 1).
    """
    poly.require_squarefree()
    bound = poly.root_bound()
    roots: list[tuple[Fraction, RealAlgebraic]] = []
    total = poly.count_roots(-bound, bound)
    stack = [(-bound, bound, total)]
    while stack:
        lo, hi, cnt = stack.pop()
        if cnt == 0:
            continue
        slo = _sign(poly(lo))
        shi = _sign(poly(hi))
        if cnt == 1 and slo * shi < 0:
            roots.append((lo, RealAlgebraic(poly, lo, hi, _trusted=True)))
            continue
        mid = (lo + hi) / 2
        if poly(mid) == 0:
            # Exact rational root; carve out a Sturm-verified window so
            # the flanking intervals have nonroot endpoints.
            roots.append((mid, RealAlgebraic(poly, mid, mid, _trusted=True)))
            gap = (hi - lo) / 8
            while True:
                a, b = mid - gap, mid + gap
                if poly(a) != 0 and poly(b) != 0 and poly.count_roots(a, b) == 1:
                    break
                gap /= 8
            stack.append((lo, a, poly.count_roots(lo, a)))
            stack.append((b, hi, poly.count_roots(b, hi)))
            continue
        left = poly.count_roots(lo, mid)
        stack.append((lo, mid, left))
        stack.append((mid, hi, cnt - left))
    roots.sort(key=lambda item: item[0])
    return [r for _, r in roots]


def largest_real_root(poly: IntPolynomial) -> RealAlgebraic:
    roots = isolate_real_roots(poly)
    if not roots:
        raise DomainError(f"{poly} has no real roots")
    return roots[-1]


def power(x: RealAlgebraic, k: int, target) -> PrecisionReal:
    """Certified x**k with abs_error <= target, by square-and-multiply.

    Working precision is chosen a priori from k and log2|x|, then
    escalated if the tracked bound misses the target (it should not).
    """
    if k < 0:
        raise DomainError("negative exponents are not supported")
    eps = Fraction(1, 1 << target) if isinstance(target, int) else Fraction(target)
    if k == 0:
        return PrecisionReal.exact(1, bits_for(eps))
    rough = x.refine(16)
    mag = max(abs(rough.lower), abs(rough.upper), Fraction(1))
    log2_mag = max(0, mag.numerator.bit_length() - mag.denominator.bit_length() + 1)
    start = k * log2_mag + bits_for(eps) + 2 * k.bit_length() + 64
    for prec in escalation(start):
        base = x.refine(prec)
        acc = None
        for bit in bin(k)[2:]:
            if acc is not None:
                acc = (acc * acc).rounded(prec)
            if bit == "1":
                acc = base if acc is None else (acc * base).rounded(prec)
        if acc.abs_error <= eps:
            return acc
    raise PrecisionExhausted(f"power({k}) could not reach abs_error {float(eps)}")


def power_walk(x: RealAlgebraic, k_max: int, target) -> list[PrecisionReal]:
    """[x**0, x**1, ..., x**k_max], each with abs_error <= target.

    Fixed-point integer products at a shared working precision; cheaper
    than k_max independent powers when a whole trajectory is needed.
    The iterate v_k tracks x**k * 2**prec and e_k is an integer ulp
    bound maintained by the recurrence
    e_{k+1} <= ceil((e_k*(|b|+eb) + |v_k|*eb) / 2**prec) + 1,
    which covers the base enclosure width eb and the floor at each step.
    """
    if k_max < 0:
        raise DomainError("k_max must be nonnegative")
    eps = Fraction(1, 1 << target) if isinstance(target, int) else Fraction(target)
    rough = x.refine(16)
    mag = max(abs(rough.lower), abs(rough.upper), Fraction(1))
    log2_mag = max(0, mag.numerator.bit_length() - mag.denominator.bit_length() + 1)
    start = k_max * log2_mag + bits_for(eps) + 2 * max(k_max, 1).bit_length() + 64
    for prec in escalation(start):
        base = x.refine(prec)
        one = _mpz(1) << prec
        b = (_mpz(base.value.numerator) << prec) // _mpz(base.value.denominator)
        err = base.abs_error
        eb = _mpz(1) + (
            _mpz(0)
            if not err
            else -((_mpz(-err.numerator) << prec) // _mpz(err.denominator))
        )
        b_mag = abs(b) + eb
        # Fail fast once the ulp bound cannot meet eps at this rung.
        eps_ulps = (_mpz(eps.numerator) << prec) // _mpz(eps.denominator)
        budget_bits = int(eps_ulps.bit_length()) + 1
        vals = [one]
        errs = [_mpz(0)]
        v, e = one, _mpz(0)
        ok = True
        for _ in range(k_max):
            v = (v * b) >> prec
            e = -((-(e * b_mag + abs(v) * eb)) >> prec) + 1
            if e.bit_length() > budget_bits:
                ok = False
                break
            vals.append(v)
            errs.append(e)
        if ok and (not errs or errs[-1] <= eps_ulps):
            return [
                PrecisionReal(dyadic_fraction(v, prec), dyadic_fraction(e, prec), prec)
                for v, e in zip(vals, errs)
            ]
    raise PrecisionExhausted(f"power_walk({k_max}) could not reach the target error")


# -- conjugate moduli via Aberth plus exact certification ---------------


def _horner_complex_exact(coeffs, re: Fraction, im: Fraction) -> tuple[Fraction, Fraction]:
    ar, ai = Fraction(0), Fraction(0)
    for c in reversed(coeffs):
        ar, ai = ar * re - ai * im + c, ar * im + ai * re
    return ar, ai


def _horner_complex_mantissa(coeffs, rm: int, im: int, w: int) -> tuple[int, int, int]:
    """Exact p(z) for z = (rm + i*im) / 2^w, all-integer.

    Returns (pr, pi, big_w) with p(z) = (pr + i*pi) / 2^big_w.  Avoids
    rational normalization entirely; at certification precisions the
    gcd calls inside Fraction arithmetic dominate everything else.
    """
    ar, ai = coeffs[-1], 0
    shift = 0
    for c in reversed(coeffs[:-1]):
        shift += w
        ar, ai = ar * rm - ai * im + (c << shift), ar * im + ai * rm
    return ar, ai, shift


def _aberth_estimates(coeffs, prec: int):
    d = len(coeffs) - 1
    with mpmath.workprec(prec):
        cs = [mpmath.mpf(c) for c in coeffs]
        dcs = [mpmath.mpf(s * coeffs[s]) for s in range(1, d + 1)]

        def ph(z, poly):
            acc = mpmath.mpc(0)
            for c in reversed(poly):
                acc = acc * z + c
            return acc

        radius = 1 + max(abs(c) for c in cs[:-1]) / abs(cs[-1])
        zs = [
            0.85 * radius * mpmath.exp(2j * mpmath.pi * (i + 0.27) / d) * (1 + mpmath.mpf(i) / (9 * d))
            for i in range(d)
        ]
        tol = mpmath.mpf(2) ** (-prec + 8)
        for _ in range(40 + 6 * d):
            moved = mpmath.mpf(0)
            for i in range(d):
                pv = ph(zs[i], cs)
                dv = ph(zs[i], dcs)
                if dv == 0:
                    zs[i] += tol * (1 + abs(zs[i]))
                    continue
                ratio = pv / dv
                acc = mpmath.mpc(0)
                for j in range(d):
                    if j != i:
                        diff = zs[i] - zs[j]
                        if diff == 0:
                            diff = tol * (1 + abs(zs[i])) * (1 + 1j)
                        acc += 1 / diff
                denom = 1 - ratio * acc
                step = ratio if denom == 0 else ratio / denom
                zs[i] -= step
                moved = max(moved, abs(step))
            if moved < tol * (1 + max(abs(z) for z in zs)):
                break
        out = []
        for z in zs:
            sre, mre, ere, _ = mpmath.mpf(z.real)._mpf_
            sim, mim, eim, _ = mpmath.mpf(z.imag)._mpf_
            fre = Fraction(mre << ere) if ere >= 0 else Fraction(mre, 1 << -ere)
            fim = Fraction(mim << eim) if eim >= 0 else Fraction(mim, 1 << -eim)
            out.append((-fre if sre else fre, -fim if sim else fim))
    return out


@dataclass(frozen=True)
class RootDisk:
    """Certified enclosure of exactly one complex root."""

    center_re: Fraction
    center_im: Fraction
    radius: Fraction

    def modulus(self, bits: int = 64) -> PrecisionReal:
        lo = sqrt_lower(self.center_re**2 + self.center_im**2, bits) - self.radius
        hi = sqrt_upper(self.center_re**2 + self.center_im**2, bits) + self.radius
        lo = max(lo, Fraction(0))
        return PrecisionReal((lo + hi) / 2, (hi - lo) / 2, bits)

    def contains(self, re: Fraction, im: Fraction) -> bool:
        return (re - self.center_re) ** 2 + (im - self.center_im) ** 2 <= self.radius**2


def _ceil_dyadic(num: int, den: int, sig: int = 64) -> Fraction:
    """Dyadic upper bound on num/den with about sig mantissa bits."""
    if num == 0:
        return Fraction(0)
    shift = sig + den.bit_length() - num.bit_length()
    if shift >= 0:
        return dyadic_fraction(-((-num << shift) // den), shift)
    return Fraction(-((-num) // (den << -shift)) << -shift)


def root_disks(poly: IntPolynomial, target_radius) -> list[RootDisk]:
    """Pairwise-disjoint disks, one per complex root, radii <= target."""
    poly.require_squarefree()
    eps = (
        Fraction(1, 1 << target_radius)
        if isinstance(target_radius, int)
        else Fraction(target_radius)
    )
    coeffs = poly.coeffs
    d = poly.degree
    lead = abs(coeffs[-1])
    for prec in escalation(max(64, bits_for(eps) + 16)):
        centers = _aberth_estimates(coeffs, prec)
        # One shared grid 2**-w keeps every bound in integer arithmetic.
        w = 0
        for re, im in centers:
            w = max(w, re.denominator.bit_length(), im.denominator.bit_length())
        grid = [
            (
                re.numerator << (w - re.denominator.bit_length() + 1),
                im.numerator << (w - im.denominator.bit_length() + 1),
            )
            for re, im in centers
        ]
        disks = []
        ok = True
        for i, (rm, jm) in enumerate(grid):
            pr, pi, big_w = _horner_complex_mantissa(coeffs, rm, jm, w)
            pm = pr * pr + pi * pi
            res = math.isqrt(pm)
            if res * res < pm:
                res += 1
            sep_m = 1
            for j, (rm2, jm2) in enumerate(grid):
                if j == i:
                    continue
                dr, di = rm - rm2, jm - jm2
                low = math.isqrt(dr * dr + di * di)
                if low == 0:
                    ok = False
                    break
                sep_m *= low
            if not ok:
                break
            # radius = d * (res / 2**big_w) / (lead * sep_m / 2**((d-1) w))
            radius = _ceil_dyadic(d * res, lead * sep_m << (big_w - (d - 1) * w))
            disks.append(RootDisk(centers[i][0], centers[i][1], radius))
        if not ok:
            continue
        if any(disk.radius > eps for disk in disks):
            continue
        disjoint = True
        for i in range(d):
            rm, jm = grid[i]
            for j in range(i + 1, d):
                dr, di = rm - grid[j][0], jm - grid[j][1]
                dist2 = dyadic_fraction(dr * dr + di * di, 2 * w)
                if dist2 <= (disks[i].radius + disks[j].radius) ** 2:
                    disjoint = False
                    break
            if not disjoint:
                break
        if disjoint:
            return disks
    raise PrecisionExhausted(
        f"could not certify disjoint root disks for {poly} at radius {float(eps)}"
    )


def _disk_of(disks: list[RootDisk], root: RealAlgebraic) -> int:
    """Index of the unique disk containing ``root``.

    Certified by exclusion: the root is matched only when it is provably
    outside every other disk, since each disk holds exactly one root.
    """
    positive = [disk.radius for disk in disks if disk.radius > 0]
    target = min(positive + [Fraction(1, 1 << 64)]) / 4
    for _ in range(6):
        approx = root.refine(target)
        bits = bits_for(target) + 8
        candidates = []
        for idx, disk in enumerate(disks):
            d2 = (approx.value - disk.center_re) ** 2 + disk.center_im**2
            dist_low = sqrt_lower(d2, bits) - approx.abs_error
            if dist_low <= disk.radius:
                candidates.append(idx)
        if len(candidates) == 1:
            return candidates[0]
        target /= 16
    raise PrecisionExhausted("could not match the real root to a certified disk")


def conjugate_moduli(
    poly: IntPolynomial,
    root: RealAlgebraic | None = None,
    target=Fraction(1, 1 << 40),
) -> list[PrecisionReal]:
    """Certified moduli of all roots other than ``root`` (default: the
    largest real root), sorted decreasing."""
    if poly.degree == 1:
        return []
    if root is None:
        root = largest_real_root(poly)
    eps = Fraction(1, 1 << target) if isinstance(target, int) else Fraction(target)
    disks = root_disks(poly, eps / 2)
    skip = _disk_of(disks, root)
    bits = bits_for(eps) + 8
    mods = [disk.modulus(bits) for i, disk in enumerate(disks) if i != skip]
    mods.sort(key=lambda m: m.value, reverse=True)
    return mods


@dataclass(frozen=True)
class PisotReport:
    """Outcome of a certified Pisot test on a candidate minimal polynomial."""

    polynomial: IntPolynomial
    is_pisot: bool
    alpha: PrecisionReal | None
    conjugate_moduli: tuple[PrecisionReal, ...]
    reason: str
    working_precision: int


def classify_pisot(poly: IntPolynomial) -> PisotReport:
    """Certify whether the largest real root of ``poly`` is a Pisot number.

    ``poly`` is treated as the minimal polynomial of its largest real
    root: the caller is responsible for irreducibility.  A positive
    verdict is sound even for reducible squarefree input (every other
    root of a multiple of the minimal polynomial still has modulus < 1),
    while a negative verdict assumes minimality.  Raises Inconclusive
    when some conjugate modulus straddles 1 at the precision ceiling,
    which is exactly the Salem-like situation.
    """
    poly.require_squarefree()
    if poly.degree == 1:
        a0, a1 = poly.coeffs
        root = PrecisionReal.exact(Fraction(-a0, a1))
        if a1 != 1:
            return PisotReport(
                poly, False, root, (), "root is not an algebraic integer", 53
            )
        ok = root.value > 1
        reason = "integer root exceeds 1" if ok else "root does not exceed 1"
        return PisotReport(poly, ok, root, (), reason, 53)

    if not poly.is_monic():
        return PisotReport(
            poly, False, None, (), "nonmonic: root is not an algebraic integer", 53
        )

    roots = isolate_real_roots(poly)
    alpha = roots[-1] if roots else None
    if alpha is None:
        return PisotReport(poly, False, None, (), "no real root", 53)
    approx = alpha.refine(48)
    while approx.straddles(1):
        if approx.abs_error <= Fraction(1, 1 << (48 + max_extra_bits())):
            break
        approx = alpha.refine(approx.abs_error / 16)
    if not approx.certainly_gt(1):
        return PisotReport(
            poly, False, approx, (), "largest real root does not exceed 1", approx.working_precision
        )

    target_bits = 16
    ceiling = 16 + max_extra_bits()
    while True:
        mods = conjugate_moduli(poly, alpha, Fraction(1, 1 << target_bits))
        if all(m.certainly_lt(1) for m in mods):
            return PisotReport(
                poly, True, approx, tuple(mods), "all conjugates certified inside the unit circle", target_bits
            )
        offender = next((m for m in mods if m.certainly_gt(1)), None)
        if offender is not None:
            return PisotReport(
                poly,
                False,
                approx,
                tuple(mods),
                "a conjugate has modulus certified above 1",
                target_bits,
            )
        if target_bits >= ceiling:
            raise Inconclusive(
                f"conjugate modulus of {poly} straddles 1 at the precision ceiling"
            )
        target_bits = min(target_bits * 2, ceiling)
