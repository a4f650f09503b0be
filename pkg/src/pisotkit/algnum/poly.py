"""Integer polynomials with exact arithmetic.

Coefficients are plain Python ints stored in ascending order, so
``coeffs[s]`` multiplies ``x**s``.  Everything here is exact: evaluation
uses Horner over Fraction/int, root counting uses Sturm chains over
Fraction, and the squarefree test runs the Euclidean algorithm.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from ..errors import DomainError, NotSquarefree

# Internal helpers operate on raw ascending coefficient tuples.  The
# IntPolynomial wrapper normalizes (primitive, positive leading
# coefficient); raw tuples skip that, which matters for derivatives used
# in Newton steps.


def _strip(coeffs: Iterable[int]) -> tuple[int, ...]:
    out = list(coeffs)
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def _horner(coeffs: Sequence, x):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _derivative(coeffs: Sequence[int]) -> tuple[int, ...]:
    return tuple(s * coeffs[s] for s in range(1, len(coeffs)))


def _poly_divmod(num: Sequence[Fraction], den: Sequence[Fraction]):
    """Exact division of Fraction-coefficient polynomials."""
    num = list(num)
    dd = len(den) - 1
    lead = den[-1]
    if dd < 0 or lead == 0:
        raise ZeroDivisionError("polynomial division by zero")
    quot = [Fraction(0)] * max(len(num) - dd, 0)
    while len(num) - 1 >= dd and any(num):
        while num and num[-1] == 0:
            num.pop()
        if len(num) - 1 < dd:
            break
        shift = len(num) - 1 - dd
        factor = num[-1] / lead
        quot[shift] = factor
        for i in range(dd + 1):
            num[shift + i] -= factor * den[i]
        num.pop()
    while num and num[-1] == 0:
        num.pop()
    return quot, num


def _sturm_chain(coeffs: Sequence[int]) -> list[tuple[Fraction, ...]]:
    chain = [tuple(Fraction(c) for c in coeffs)]
    deriv = _derivative(coeffs)
    if deriv:
        chain.append(tuple(Fraction(c) for c in deriv))
    while len(chain[-1]) > 1:
        _, rem = _poly_divmod(chain[-2], chain[-1])
        if not rem:
            break
        chain.append(tuple(-c for c in rem))
    return chain


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _sign_variations(chain, x: Fraction) -> int:
    signs = [s for s in (_sign(_horner(p, x)) for p in chain) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots_halfopen(coeffs: Sequence[int], lo: Fraction, hi: Fraction) -> int:
    """Number of distinct real roots in (lo, hi] of a squarefree polynomial."""
    if lo > hi:
        raise DomainError("empty interval: lo > hi")
    chain = _sturm_chain(coeffs)
    return _sign_variations(chain, Fraction(lo)) - _sign_variations(chain, Fraction(hi))


def _content(coeffs: Sequence[int]) -> int:
    g = 0
    for c in coeffs:
        g = gcd(g, abs(c))
    return g


_TERM_RE = re.compile(r"^([+-]?\d*)(?:\*?(x)(?:\^(\d+))?)?$")


def _parse_expression(text: str) -> list[int]:
    cleaned = text.replace("−", "-").replace("**", "^").replace(" ", "")
    if not cleaned:
        raise DomainError("empty polynomial expression")
    # Split into signed terms while keeping each sign attached.
    pieces = re.findall(r"[+-]?[^+-]+", cleaned)
    if "".join(pieces) != cleaned:
        raise DomainError(f"cannot parse polynomial: {text!r}")
    coeffs: dict[int, int] = {}
    for piece in pieces:
        m = _TERM_RE.match(piece)
        if not m or (m.group(1) in ("", "+", "-") and m.group(2) is None):
            raise DomainError(f"cannot parse term {piece!r} in {text!r}")
        raw_coeff, has_x, raw_exp = m.groups()
        if raw_coeff in ("", "+"):
            c = 1
        elif raw_coeff == "-":
            c = -1
        else:
            c = int(raw_coeff)
        if has_x:
            exp = int(raw_exp) if raw_exp else 1
        else:
            exp = 0
        coeffs[exp] = coeffs.get(exp, 0) + c
    out = [0] * (max(coeffs) + 1)
    for exp, c in coeffs.items():
        out[exp] = c
    return out


class IntPolynomial:
    """Primitive integer polynomial with positive leading coefficient.

    Normalization (dividing out the content, flipping the overall sign)
    never moves a root, so downstream root isolation and Pisot checks
    are unaffected by how the input was scaled.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable[int]):
        cs = _strip(int(c) for c in coeffs)
        if len(cs) < 2:
            raise DomainError("polynomial must have degree >= 1")
        content = _content(cs)
        cs = tuple(c // content for c in cs)
        if cs[-1] < 0:
            cs = tuple(-c for c in cs)
        self._coeffs = cs

    @classmethod
    def parse(cls, text: str) -> "IntPolynomial":
        """Parse either ``"x^3 - x - 1"`` or ``"[-1, -1, 0, 1]"`` (ascending)."""
        stripped = text.strip()
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise DomainError(f"unterminated coefficient list: {text!r}")
            body = stripped[1:-1].replace("−", "-").strip()
            if not body:
                raise DomainError("empty coefficient list")
            try:
                return cls([int(part.strip()) for part in body.split(",")])
            except ValueError as exc:
                raise DomainError(f"bad coefficient list {text!r}: {exc}") from None
        return cls(_parse_expression(stripped))

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self._coeffs

    @property
    def degree(self) -> int:
        return len(self._coeffs) - 1

    @property
    def leading(self) -> int:
        return self._coeffs[-1]

    def __call__(self, x):
        """Exact evaluation; accepts int or Fraction and returns the same kind."""
        return _horner(self._coeffs, x)

    def evaluate_at_one(self) -> int:
        return sum(self._coeffs)

    def derivative_coeffs(self) -> tuple[int, ...]:
        """Raw (unnormalized) derivative coefficients, ascending."""
        return _derivative(self._coeffs)

    def is_squarefree(self) -> bool:
        a = [Fraction(c) for c in self._coeffs]
        b = [Fraction(c) for c in _derivative(self._coeffs)]
        while any(b):
            _, rem = _poly_divmod(a, b)
            a, b = b, rem
        return len(_strip(a)) <= 1

    def require_squarefree(self) -> None:
        if not self.is_squarefree():
            raise NotSquarefree(f"{self} has a repeated factor")

    def count_roots(self, lo: Fraction, hi: Fraction) -> int:
        """Distinct real roots in the half-open interval (lo, hi]."""
        return count_roots_halfopen(self._coeffs, lo, hi)

    def root_bound(self) -> Fraction:
        """Cauchy bound: every complex root has modulus < the returned value."""
        lead = abs(self._coeffs[-1])
        biggest = max(abs(c) for c in self._coeffs[:-1])
        return 1 + Fraction(biggest, lead)

    def is_monic(self) -> bool:
        return self._coeffs[-1] == 1

    def __eq__(self, other):
        return isinstance(other, IntPolynomial) and self._coeffs == other._coeffs

    def __hash__(self):
        return hash(self._coeffs)

    def __repr__(self):
        return f"IntPolynomial({list(self._coeffs)})"

    def __str__(self):
        terms = []
        for exp in range(self.degree, -1, -1):
            c = self._coeffs[exp]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if exp == 0:
                body = str(mag)
            else:
                head = "" if mag == 1 else str(mag)
                body = f"{head}x" if exp == 1 else f"{head}x^{exp}"
            terms.append((sign, body))
        first_sign, first_body = terms[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out
