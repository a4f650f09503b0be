"""Validated real arithmetic on exact rational midpoints.

A ``PrecisionReal`` stores an exact ``Fraction`` midpoint together with
an exact ``Fraction`` bound on the absolute error.  Field operations
propagate error bounds rigorously and never round the midpoint on
their own; midpoint rounding happens only where a constructor says it
does (``rounded``, the transcendental helpers, square roots).  Error
bounds with bulky representations are rounded UP to about 48
significant bits at construction, so a bound may be slightly coarser
than the exact propagated one but never smaller.  Without that
normalization, repeated interval products accumulate lcm denominators
and gcd work grows quadratically along a trajectory.

Certified integer-boundary operations (``frac_part``,
``nearest_integer_distance``) refuse to guess: when the error interval
straddles an integer they raise ``BoundaryAmbiguous`` so the caller can
escalate precision, and escalation itself is capped by a context-local
budget (``precision_budget``).
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import mpmath

from ..errors import BoundaryAmbiguous, DomainError, PrecisionExhausted

# Extra precision (bits) an escalation loop may add on top of its
# starting point before giving up.  Context-local so nested experiments
# can tighten it without touching global state.
_MAX_EXTRA_BITS: ContextVar[int] = ContextVar("pisotkit_max_extra_bits", default=16384)

DEFAULT_MAX_EXTRA_BITS = 16384


def max_extra_bits() -> int:
    return _MAX_EXTRA_BITS.get()


@contextmanager
def precision_budget(extra_bits: int):
    """Temporarily set how many bits escalation may add before failing."""
    if extra_bits < 0:
        raise DomainError("precision budget must be nonnegative")
    token = _MAX_EXTRA_BITS.set(extra_bits)
    try:
        yield
    finally:
        _MAX_EXTRA_BITS.reset(token)


def escalation(start_bits: int):
    """Yield working precisions: start, then doubling, capped by the budget.

    The caller is expected to raise ``PrecisionExhausted`` if the
    generator runs out; see ``escalate_until`` for the common wrapper.
    """
    ceiling = start_bits + max_extra_bits()
    cur = max(start_bits, 8)
    while True:
        yield cur
        if cur >= ceiling:
            return
        cur = min(cur * 2, ceiling)


def escalate_until(start_bits: int, attempt, describe: str = "operation"):
    """Run ``attempt(bits)`` at escalating precision until it stops raising
    ``BoundaryAmbiguous``; raise ``PrecisionExhausted`` at the ceiling."""
    last = None
    for bits in escalation(start_bits):
        try:
            return attempt(bits)
        except BoundaryAmbiguous as exc:
            last = exc
    raise PrecisionExhausted(
        f"{describe}: precision ceiling reached "
        f"(start {start_bits} bits, budget +{max_extra_bits()})"
    ) from last


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def dyadic_fraction(num, shift_bits: int) -> Fraction:
    """Fraction(num, 2**shift_bits) skipping the generic gcd.

    Reduction against a power of two only strips trailing zero bits, so
    the reduced form is known directly; the stdlib constructor would run
    a full-size gcd, which dominates when these are built in bulk.
    """
    num = int(num)
    if num == 0:
        return _ZERO
    t = (num & -num).bit_length() - 1
    if t > shift_bits:
        t = shift_bits
    f = Fraction.__new__(Fraction)
    f._numerator = num >> t
    f._denominator = 1 << (shift_bits - t)
    return f


_ZERO = Fraction(0)


def _ceil_sig_bits(q: Fraction, sig: int = 48) -> Fraction:
    """Smallest dyadic rational with ~sig significant bits that is >= q > 0."""
    num, den = q.numerator, q.denominator
    shift = sig - (num.bit_length() - den.bit_length())
    if shift >= 0:
        return dyadic_fraction(-((-num << shift) // den), shift)
    return Fraction(-(-num // (den << -shift)) << -shift)


@dataclass(frozen=True)
class PrecisionReal:
    """An interval ``value +- abs_error`` with exact rational endpoints."""

    value: Fraction
    abs_error: Fraction
    working_precision: int = 53

    def __post_init__(self):
        object.__setattr__(self, "value", _as_fraction(self.value))
        err = _as_fraction(self.abs_error)
        if err < 0:
            raise DomainError("abs_error must be nonnegative")
        # Keep bounds rigorous but representation-compact (round up only).
        # Dyadic bounds with small numerators stay exact however large
        # the denominator exponent is (their arithmetic is cheap and the
        # compaction below emits exactly that shape, so it never
        # re-fires); anything bulky gets rounded up to ~48 significant
        # bits.
        if err and err.numerator.bit_length() > 64:
            err = _ceil_sig_bits(err)
        elif err:
            den = err.denominator
            if den.bit_length() > 64 and den & (den - 1):
                err = _ceil_sig_bits(err)
        object.__setattr__(self, "abs_error", err)
        if self.working_precision < 1:
            raise DomainError("working_precision must be positive")

    @classmethod
    def exact(cls, q, working_precision: int = 53) -> "PrecisionReal":
        return cls(_as_fraction(q), Fraction(0), working_precision)

    # -- exact interval arithmetic -------------------------------------

    def _coerce(self, other) -> "PrecisionReal":
        if isinstance(other, PrecisionReal):
            return other
        return PrecisionReal(_as_fraction(other), Fraction(0), self.working_precision)

    def __add__(self, other):
        o = self._coerce(other)
        return PrecisionReal(
            self.value + o.value,
            self.abs_error + o.abs_error,
            min(self.working_precision, o.working_precision),
        )

    __radd__ = __add__

    def __neg__(self):
        return PrecisionReal(-self.value, self.abs_error, self.working_precision)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        err = (
            abs(self.value) * o.abs_error
            + abs(o.value) * self.abs_error
            + self.abs_error * o.abs_error
        )
        return PrecisionReal(
            self.value * o.value,
            err,
            min(self.working_precision, o.working_precision),
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        den_low = abs(o.value) - o.abs_error
        if den_low <= 0:
            raise ZeroDivisionError("divisor interval contains zero")
        err = (abs(o.value) * self.abs_error + abs(self.value) * o.abs_error) / (
            abs(o.value) * den_low
        )
        return PrecisionReal(
            self.value / o.value,
            err,
            min(self.working_precision, o.working_precision),
        )

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __abs__(self):
        return PrecisionReal(abs(self.value), self.abs_error, self.working_precision)

    # -- rounding and conversion ---------------------------------------

    def rounded(self, bits: int) -> "PrecisionReal":
        """Round the midpoint onto the 2**-bits grid, inflating the bound."""
        if bits < 1:
            raise DomainError("bits must be positive")
        num, den = self.value.numerator, self.value.denominator
        j = den.bit_length() - 1
        if den == 1 << j:
            # Dyadic midpoint: regrid with shifts, no gcd at all.
            if j <= bits:
                return PrecisionReal(
                    dyadic_fraction(num << (bits - j), bits), self.abs_error, bits
                )
            man = (num + (1 << (j - bits - 1))) >> (j - bits)
        else:
            scaled = self.value * (1 << bits)
            man = (scaled.numerator * 2 + scaled.denominator) // (2 * scaled.denominator)
        return PrecisionReal(
            dyadic_fraction(man, bits),
            self.abs_error + Fraction(1, 1 << (bits + 1)),
            bits,
        )

    def __float__(self) -> float:
        return float(self.value)

    def decimal_string(self, digits: int = 12) -> str:
        """Exact decimal rendering of the midpoint, rounded to ``digits``."""
        q = self.value * 10**digits
        n = (q.numerator * 2 + q.denominator) // (2 * q.denominator)
        sign = "-" if n < 0 else ""
        n = abs(n)
        ip, fp = divmod(n, 10**digits)
        return f"{sign}{ip}.{fp:0{digits}d}" if digits else f"{sign}{ip}"

    # -- certified comparisons -----------------------------------------

    @property
    def lower(self) -> Fraction:
        return self.value - self.abs_error

    @property
    def upper(self) -> Fraction:
        return self.value + self.abs_error

    def certainly_lt(self, bound) -> bool:
        return self.upper < _as_fraction(bound)

    def certainly_gt(self, bound) -> bool:
        return self.lower > _as_fraction(bound)

    def straddles(self, point) -> bool:
        p = _as_fraction(point)
        return self.lower <= p <= self.upper

    def __repr__(self):
        return (
            f"PrecisionReal({float(self.value)!r} +- {float(self.abs_error)!r},"
            f" prec={self.working_precision})"
        )


def frac_part(x: PrecisionReal) -> PrecisionReal:
    """Certified fractional part of ``x``.

    Requires ``abs_error < 1/4``.  Raises ``BoundaryAmbiguous`` when the
    interval straddles an integer, since the fractional part then jumps
    between values near 0 and values near 1.
    """
    if x.abs_error >= Fraction(1, 4):
        raise DomainError("frac_part needs abs_error < 1/4")
    n = math.floor(x.value)
    if x.lower >= n and x.upper < n + 1:
        return PrecisionReal(x.value - n, x.abs_error, x.working_precision)
    nearest = n if x.value - n < Fraction(1, 2) else n + 1
    raise BoundaryAmbiguous(
        f"interval {float(x.value)} +- {float(x.abs_error)} straddles integer {nearest}",
        nearest_integer=nearest,
        distance_bound=abs(x.value - nearest) + x.abs_error,
    )


def nearest_integer_distance(x: PrecisionReal) -> PrecisionReal:
    """Distance from ``x`` to the nearest integer, with the same error bound.

    The distance function is 1-Lipschitz, so the input bound transfers
    unchanged; no boundary certification is needed.
    """
    if x.abs_error >= Fraction(1, 4):
        raise DomainError("nearest_integer_distance needs abs_error < 1/4")
    n = math.floor(x.value + Fraction(1, 2))
    return PrecisionReal(abs(x.value - n), x.abs_error, x.working_precision)


def round_nearest(x: PrecisionReal) -> int:
    """Certified nearest integer.

    Raises ``BoundaryAmbiguous`` when the interval straddles a half-integer
    boundary.  An exact half-integer (abs_error == 0) has no nearest integer
    at all; that case raises unconditionally, and callers must not retry it
    at higher precision.
    """
    if x.abs_error >= Fraction(1, 4):
        raise DomainError("round_nearest needs abs_error < 1/4")
    shifted = x.value + Fraction(1, 2)
    if x.abs_error == 0 and shifted.denominator == 1:
        raise BoundaryAmbiguous(
            f"{x.value} is an exact half-integer; rounding is undefined",
            nearest_integer=None,
            distance_bound=Fraction(1, 2),
        )
    n = math.floor(shifted)
    if x.lower >= n - Fraction(1, 2) and x.upper < n + Fraction(1, 2):
        return n
    boundary = n - Fraction(1, 2) if x.value - n < 0 else n + Fraction(1, 2)
    raise BoundaryAmbiguous(
        f"interval {float(x.value)} +- {float(x.abs_error)} straddles"
        f" half-integer {float(boundary)}",
        nearest_integer=n,
        distance_bound=abs(x.value - boundary) + x.abs_error,
    )


# -- square roots (exact integer kernel) -------------------------------


def sqrt_lower(q: Fraction, bits: int) -> Fraction:
    """Lower bound for sqrt(q), within 2**-bits of the true value."""
    q = _as_fraction(q)
    if q < 0:
        raise DomainError("sqrt of a negative rational")
    num, den = q.numerator, q.denominator
    j = den.bit_length() - 1
    if den == 1 << j:
        # Dyadic input: the result lands on the 2**-(j+bits) grid with
        # no reduction work.
        return dyadic_fraction(math.isqrt(num << (j + 2 * bits)), j + bits)
    m = math.isqrt(num * den << (2 * bits))
    return Fraction(m, den << bits)


def sqrt_upper(q: Fraction, bits: int) -> Fraction:
    q = _as_fraction(q)
    if q < 0:
        raise DomainError("sqrt of a negative rational")
    num, den = q.numerator, q.denominator
    j = den.bit_length() - 1
    if den == 1 << j:
        t = num << (j + 2 * bits)
        m = math.isqrt(t)
        if m * m < t:
            m += 1
        return dyadic_fraction(m, j + bits)
    t = num * den << (2 * bits)
    m = math.isqrt(t)
    if m * m < t:
        m += 1
    return Fraction(m, den << bits)


def sqrt_prec(x: PrecisionReal, bits: int) -> PrecisionReal:
    """Certified square root; requires the interval to sit in [0, inf)."""
    if x.lower < 0:
        raise DomainError("sqrt requires a certified nonnegative interval")
    lo = sqrt_lower(x.lower, bits)
    hi = sqrt_upper(x.upper, bits)
    mid = (lo + hi) / 2
    return PrecisionReal(mid, (hi - lo) / 2, bits)


# -- transcendental constructors (library-backed) ----------------------
#
# mpmath evaluates ln/exp/pi to its working precision with small
# relative error.  Ten guard bits of claimed slack are added on top of
# the twenty extra bits the evaluation runs at; these bounds are
# library-trusted rather than independently proved.

_GUARD = 20


def _fraction_from_mpf(x) -> Fraction:
    if not mpmath.isfinite(x):
        raise DomainError("nonfinite value from library evaluation")
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    if man == 0:
        return Fraction(0)
    val = Fraction(man << exp) if exp >= 0 else Fraction(man, 1 << -exp)
    return -val if sign else val


def _mpf_from_fraction(q: Fraction):
    return mpmath.mpf(q.numerator) / mpmath.mpf(q.denominator)


def _claimed_eval_error(result: Fraction, bits: int) -> Fraction:
    return (abs(result) + 1) * Fraction(1, 1 << (bits + _GUARD // 2))


def ln_prec(x: PrecisionReal, bits: int) -> PrecisionReal:
    """Natural log with a propagated input bound plus claimed eval error."""
    if x.lower <= 0:
        raise DomainError("ln requires a certified positive interval")
    with mpmath.workprec(bits + _GUARD):
        r = _fraction_from_mpf(mpmath.ln(_mpf_from_fraction(x.value)))
    input_term = x.abs_error / x.lower
    return PrecisionReal(r, input_term + _claimed_eval_error(r, bits), bits)


def exp_prec(x: PrecisionReal, bits: int) -> PrecisionReal:
    with mpmath.workprec(bits + _GUARD):
        r = _fraction_from_mpf(mpmath.exp(_mpf_from_fraction(x.value)))
    if x.abs_error >= 1:
        raise DomainError("exp input error bound must be < 1")
    # |exp(v+d) - exp(v)| <= exp(v) * (e - 1) * d  for |d| <= 1
    input_term = r * 2 * x.abs_error
    return PrecisionReal(r, input_term + _claimed_eval_error(r, bits), bits)


def pi_prec(bits: int) -> PrecisionReal:
    with mpmath.workprec(bits + _GUARD):
        r = _fraction_from_mpf(+mpmath.pi)
    return PrecisionReal(r, _claimed_eval_error(r, bits), bits)
