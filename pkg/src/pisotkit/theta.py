"""The shift parameter and its certified fractional multiples.

A shift is one of three kinds:

* ``rational``: an exact Fraction; fractional parts of multiples are
  exact and periodic.
* ``algebraic``: a real root of an integer polynomial, certified
  irrational at construction by the rational root theorem (a quadratic
  or higher polynomial with no rational root in the isolating bracket
  has an irrational root there).
* ``decimal``: a decimal literal with a declared absolute error; its
  rationality is unknown, and certification can never exceed the
  declared accuracy.

Fractional parts {k*shift} refuse to answer when the certified interval
straddles an integer: rational shifts never do (they are exact),
algebraic shifts escalate precision until the straddle resolves (it
always does, since k*shift is never an integer), and decimal shifts
raise PrecisionExhausted when the declared accuracy is consumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .algnum import IntPolynomial, PrecisionReal, RealAlgebraic, bits_for
from .algnum.precision import escalation, frac_part
from .errors import BoundaryAmbiguous, DomainError, PrecisionExhausted

_COEFF_CERT_CAP = 10**9


def _divisors(n: int) -> list[int]:
    n = abs(n)
    out = []
    i = 1
    while i * i <= n:
        if n % i == 0:
            out.append(i)
            out.append(n // i)
        i += 1
    return out


def _rational_root_in(poly: IntPolynomial, lo: Fraction, hi: Fraction) -> Optional[Fraction]:
    """A rational root of poly inside [lo, hi], or None if there is none.

    Raises DomainError when coefficients are too large to enumerate
    divisor candidates, since irrationality then cannot be certified.
    """
    coeffs = poly.coeffs
    a0, ad = coeffs[0], coeffs[-1]
    if a0 == 0:
        if lo <= 0 <= hi:
            return Fraction(0)
        # strip the factor x and recurse on the rest
        return _rational_root_in(IntPolynomial(coeffs[1:]), lo, hi)
    if abs(a0) > _COEFF_CERT_CAP or abs(ad) > _COEFF_CERT_CAP:
        raise DomainError(
            "cannot certify irrationality: coefficients exceed the divisor"
            f" enumeration cap {_COEFF_CERT_CAP}"
        )
    for num in _divisors(a0):
        for den in _divisors(ad):
            for cand in (Fraction(num, den), Fraction(-num, den)):
                if lo <= cand <= hi and poly(cand) == 0:
                    return cand
    return None


@dataclass(frozen=True)
class FracBatch:
    """Fixed-point fractional parts of consecutive multiples.

    ``mantissas[i] / 2**scale_bits`` approximates {(k_start+i)*shift}
    within ``abs_error``, certified on a single side of every integer.
    ``floors[i]`` is the exact floor of the corresponding multiple.
    """

    k_start: int
    mantissas: list[int]
    floors: list[int]
    scale_bits: int
    abs_error: Fraction

    def __len__(self):
        return len(self.mantissas)

    def floats(self) -> list[float]:
        p = self.scale_bits
        return [math.ldexp(m >> max(p - 60, 0), max(p - 60, 0) - p) for m in self.mantissas]

    @property
    def float_error(self) -> Fraction:
        """Bound on |floats()[i] - {(k_start+i)*shift}|.

        Covers abs_error plus the mantissa truncation and float64
        rounding introduced by floats().
        """
        return self.abs_error + Fraction(1, 1 << 52) + Fraction(1, 1 << 60)


class Theta:
    """Tagged shift value; construct via ``rational``/``algebraic``/``decimal``."""

    __slots__ = ("kind", "_fraction", "_root", "_decimal_error", "_text")

    def __init__(self, kind, fraction=None, root=None, decimal_error=None, text=None, _token=None):
        if _token is not _CTOR:
            raise TypeError("use Theta.rational / Theta.algebraic / Theta.decimal / Theta.parse")
        self.kind = kind
        self._fraction = fraction
        self._root = root
        self._decimal_error = decimal_error
        self._text = text

    # -- constructors ----------------------------------------------------

    @classmethod
    def rational(cls, value) -> "Theta":
        return cls("rational", fraction=Fraction(value), _token=_CTOR)

    @classmethod
    def algebraic(cls, root: RealAlgebraic) -> "Theta":
        """Certify (ir)rationality of the bracketed root and tag accordingly."""
        lo, hi = root.bracket
        if root.is_exact:
            return cls.rational(lo)
        rational = _rational_root_in(root.poly, lo, hi)
        if rational is not None:
            return cls.rational(rational)
        return cls("algebraic", root=root, _token=_CTOR)

    @classmethod
    def decimal(cls, text: str, abs_error) -> "Theta":
        err = _parse_rational_literal(str(abs_error))
        if err < 0:
            raise DomainError("declared error must be nonnegative")
        value = _parse_rational_literal(text)
        return cls(
            "decimal", fraction=value, decimal_error=err, text=str(text), _token=_CTOR
        )

    @classmethod
    def parse(cls, text: str) -> "Theta":
        """Shorthand: ``"1/3"`` | ``"alg:x^2+2x-1:0,1"`` | ``"dec:0.4142:1e-9"``."""
        text = text.strip()
        if text.startswith("alg:"):
            try:
                _, poly_text, bracket = text.split(":", 2)
                lo_text, hi_text = bracket.split(",")
            except ValueError:
                raise DomainError(f"bad algebraic shift syntax: {text!r}") from None
            poly = IntPolynomial.parse(poly_text)
            lo = _parse_rational_literal(lo_text)
            hi = _parse_rational_literal(hi_text)
            return cls.algebraic(RealAlgebraic(poly, lo, hi))
        if text.startswith("dec:"):
            try:
                _, value, err = text.split(":", 2)
            except ValueError:
                raise DomainError(f"bad decimal shift syntax: {text!r}") from None
            return cls.decimal(value, err)
        return cls.rational(_parse_rational_literal(text))

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        if self.kind == "rational":
            return {"kind": "rational", "value": str(self._fraction)}
        if self.kind == "algebraic":
            lo, hi = self._root.bracket
            return {
                "kind": "algebraic",
                "polynomial": str(self._root.poly),
                "bracket": [str(lo), str(hi)],
            }
        return {
            "kind": "decimal",
            "value": self._text,
            "abs_error": str(self._decimal_error),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Theta":
        kind = data.get("kind")
        if kind == "rational":
            return cls.rational(_parse_rational_literal(data["value"]))
        if kind == "algebraic":
            poly = IntPolynomial.parse(data["polynomial"])
            lo = _parse_rational_literal(data["bracket"][0])
            hi = _parse_rational_literal(data["bracket"][1])
            return cls.algebraic(RealAlgebraic(poly, lo, hi))
        if kind == "decimal":
            return cls.decimal(data["value"], data["abs_error"])
        raise DomainError(f"unknown shift kind {kind!r}")

    # -- basic queries ----------------------------------------------------

    @property
    def is_rational(self) -> Optional[bool]:
        """True/False when certified; None for decimal inputs."""
        if self.kind == "rational":
            return True
        if self.kind == "algebraic":
            return False
        return None

    def as_fraction(self) -> Fraction:
        if self.kind != "rational":
            raise DomainError("exact fraction only available for rational shifts")
        return self._fraction

    def refine(self, target) -> PrecisionReal:
        eps = Fraction(1, 1 << target) if isinstance(target, int) else Fraction(target)
        if self.kind == "rational":
            return PrecisionReal(self._fraction, Fraction(0), bits_for(eps))
        if self.kind == "algebraic":
            return self._root.refine(eps)
        if eps < self._decimal_error:
            raise PrecisionExhausted(
                f"shift declared with abs_error {self._decimal_error}, "
                f"cannot refine to {float(eps)}"
            )
        return PrecisionReal(self._fraction, self._decimal_error, bits_for(eps))

    def describe(self) -> str:
        if self.kind == "rational":
            return str(self._fraction)
        if self.kind == "algebraic":
            lo, hi = self._root.bracket
            return f"root of {self._root.poly} in ({float(lo):.6g}, {float(hi):.6g})"
        return f"{self._text} +- {float(self._decimal_error):.3g}"

    def __repr__(self):
        return f"Theta({self.describe()})"

    def __eq__(self, other):
        return isinstance(other, Theta) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(str(self.to_dict()))

    # -- fractional parts of multiples ------------------------------------

    def cycle_fracs(self) -> list[Fraction]:
        """For rational p/q: the exact cycle [{0}, {p/q}, ..., {(q-1)p/q}]."""
        if self.kind != "rational":
            raise DomainError("cycle_fracs requires a rational shift")
        p, q = self._fraction.numerator, self._fraction.denominator
        if q > 10**7:
            raise DomainError(f"denominator {q} exceeds the cycle materialization guard")
        return [Fraction((j * p) % q, q) for j in range(q)]

    def frac_multiple(self, k: int, bits: int | None = None) -> PrecisionReal:
        """Certified {k * shift}; exact for rational shifts.

        ``bits`` optionally demands abs_error <= 2**-bits on the result
        (beyond the bare boundary certification).
        """
        if self.kind == "rational":
            p, q = self._fraction.numerator, self._fraction.denominator
            return PrecisionReal(Fraction((k * p) % q, q), Fraction(0))
        return self._certified_multiple(k, want_floor=False, min_bits=bits or 0)

    def floor_multiple(self, k: int) -> int:
        if self.kind == "rational":
            return (k * self._fraction.numerator) // self._fraction.denominator
        return self._certified_multiple(k, want_floor=True)

    def _certified_multiple(self, k: int, want_floor: bool, min_bits: int = 0):
        target = Fraction(1, 1 << min_bits) if min_bits else None
        if self.kind == "decimal":
            # One shot at the declared accuracy; no escalation possible.
            kv = PrecisionReal(self._fraction, self._decimal_error) * k
            if target is not None and kv.abs_error > target:
                raise PrecisionExhausted(
                    f"declared accuracy of ({self.describe()}) is coarser than"
                    f" the requested 2**-{min_bits} for multiple {k}"
                )
            try:
                frac = frac_part(kv)
            except BoundaryAmbiguous as exc:
                raise PrecisionExhausted(
                    f"declared accuracy of ({self.describe()}) cannot place "
                    f"multiple {k} on one side of an integer"
                ) from exc
            return math.floor(kv.value) if want_floor else frac
        start = max(48, min_bits + 2) + max(abs(k), 1).bit_length()
        last = None
        for bits in escalation(start):
            approx = self.refine(Fraction(1, 1 << bits))
            kv = approx * k
            if target is not None and kv.abs_error > target:
                continue
            try:
                frac = frac_part(kv)
            except BoundaryAmbiguous as exc:
                last = exc
                continue
            return math.floor(kv.value) if want_floor else frac
        raise PrecisionExhausted(
            f"could not certify the fractional part of {k} * ({self.describe()})"
        ) from last

    def frac_batch(self, k_start: int, count: int, bits: int = 60) -> FracBatch:
        """Fixed-point {k*shift} and exact floors for consecutive k.

        Certified: every mantissa sits at least (|k|+1) scale units away
        from the integer boundaries for non-rational shifts, so floors
        are exact and fractional parts have one valid error bound.
        """
        if count <= 0:
            raise DomainError("count must be positive")
        k_end = k_start + count - 1
        k_abs = max(abs(k_start), abs(k_end), 1)
        if self.kind == "rational":
            p_num, q = self._fraction.numerator, self._fraction.denominator
            scale = bits
            mans = []
            floors = []
            prod = k_start * p_num
            for _ in range(count):
                floors.append(prod // q)
                mans.append(((prod % q) << scale) // q)
                prod += p_num
            return FracBatch(k_start, mans, floors, scale, Fraction(1, 1 << scale))
        start = bits + k_abs.bit_length() + 16
        last = None
        for scale in escalation(start):
            if self.kind == "decimal":
                approx = PrecisionReal(self._fraction, self._decimal_error)
            else:
                approx = self.refine(Fraction(1, 1 << (scale + 2)))
            man = round(approx.value * (1 << scale))
            per_unit_err = abs(approx.value - Fraction(man, 1 << scale)) + approx.abs_error
            guard = math.ceil(k_abs * per_unit_err * (1 << scale)) + 1
            mask = (1 << scale) - 1
            full = k_start * man
            mans = []
            floors = []
            ambiguous_at = None
            for i in range(count):
                r = full & mask
                if r < guard or r > mask - guard + 1:
                    ambiguous_at = k_start + i
                    break
                mans.append(r)
                floors.append(full >> scale)
                full += man
            if ambiguous_at is None:
                return FracBatch(
                    k_start,
                    mans,
                    floors,
                    scale,
                    Fraction(k_abs, 1 << scale) + k_abs * approx.abs_error,
                )
            last = BoundaryAmbiguous(
                f"multiple {ambiguous_at} of ({self.describe()}) is within "
                f"{guard} scale units of an integer at {scale} bits"
            )
            if self.kind == "decimal" and Fraction(1, 1 << scale) <= self._decimal_error:
                raise PrecisionExhausted(
                    "declared decimal accuracy cannot separate a multiple from an integer"
                ) from last
        raise PrecisionExhausted(
            f"fractional parts of multiples of ({self.describe()}) could not be certified"
        ) from last


_CTOR = object()


def _parse_rational_literal(text: str) -> Fraction:
    """Exact rational from '1/3', '0.25', '-2', '1e-9' style literals."""
    cleaned = str(text).strip().replace("−", "-")
    try:
        return Fraction(cleaned)
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"cannot parse rational literal {text!r}: {exc}") from None
