"""Shared container for finite runs of real-valued sequence data.

Both the residual generators and the windowed-combination operations
produce the same shape of result: consecutive terms x_k, each known to a
certified absolute error.  One container serves both, with two storage
modes: a uniform mode (float midpoints plus a single shared error bound,
produced by the batch kernels) and a per-value mode (a PrecisionReal per
term, produced by scalar certified paths).  Either view is materialized
lazily from the other.
"""

from __future__ import annotations

import csv
import math
from fractions import Fraction

import numpy as np

from .algnum import PrecisionReal
from .errors import DomainError, OutOfRange


def float_upper(q: Fraction) -> float:
    """Smallest float >= q; safe for serializing error bounds."""
    f = float(q)
    if Fraction(f) < q:
        f = math.nextafter(f, math.inf)
    return f


def _frac_float(q: Fraction) -> float:
    """float(q % 1) without constructing the reduced Fraction.

    Dyadic midpoints take an all-integer path: one C-level mod, then the
    top 60 bits of the remainder.  Anything else falls back to exact
    Fraction reduction.
    """
    num, den = q.numerator, q.denominator
    j = den.bit_length() - 1
    if den == 1 << j:
        r = num & (den - 1)
        if j <= 60:
            return r / den
        return math.ldexp(r >> (j - 60), -60)
    return float(q % 1)


class Sample:
    """Terms x_{k_start}, ..., x_{k_start+n-1} with certified error data."""

    __slots__ = ("kind", "k_start", "params", "_floats", "_uniform_error", "_values")

    def __init__(self, kind: str, k_start: int, *, floats=None, uniform_error=None,
                 values=None, params=None):
        self.kind = str(kind)
        self.k_start = int(k_start)
        self.params = dict(params) if params else {}
        if values is not None:
            if floats is not None or uniform_error is not None:
                raise DomainError("pass either values or floats, not both")
            values = list(values)
            if not values:
                raise DomainError("sample must be nonempty")
            self._values = values
            self._floats = None
            self._uniform_error = None
        else:
            if floats is None or uniform_error is None:
                raise DomainError("float mode needs floats and uniform_error")
            arr = np.asarray(floats, dtype=np.float64)
            if arr.ndim != 1 or arr.size == 0:
                raise DomainError("sample must be a nonempty 1-d run")
            self._floats = arr
            self._uniform_error = Fraction(uniform_error)
            self._values = None

    @classmethod
    def from_floats(cls, kind, k_start, floats, abs_error, params=None) -> "Sample":
        return cls(kind, k_start, floats=floats, uniform_error=abs_error, params=params)

    @classmethod
    def from_values(cls, kind, k_start, values, params=None) -> "Sample":
        return cls(kind, k_start, values=values, params=params)

    def __len__(self) -> int:
        return len(self._values) if self._floats is None else int(self._floats.size)

    @property
    def k_end(self) -> int:
        return self.k_start + len(self) - 1

    def floats(self) -> np.ndarray:
        """Midpoints as a float64 array (read-only view)."""
        if self._floats is None:
            self._floats = np.fromiter(
                (float(v.value) for v in self._values), np.float64, count=len(self._values)
            )
        self._floats.setflags(write=False)
        return self._floats

    @property
    def values(self) -> list[PrecisionReal]:
        """Per-term certified enclosures."""
        if self._values is None:
            err = self._uniform_error
            self._values = [PrecisionReal(Fraction(float(f)), err) for f in self._floats]
        return self._values

    def fracs(self) -> np.ndarray:
        """Fractional parts of the midpoints as float64 in [0, 1).

        Reduction mod 1 happens on the exact rational midpoints, so terms
        too large for float64 still yield meaningful fractional parts.
        Values within the error bound of an integer may land on either
        side of the wrap; this accessor is for float-level statistics,
        not certified boundary decisions.
        """
        if self._values is not None:
            arr = np.fromiter(
                (_frac_float(v.value) for v in self._values),
                np.float64,
                count=len(self._values),
            )
        else:
            arr = np.mod(self._floats, 1.0)
        arr[arr >= 1.0] = 0.0
        return arr

    @property
    def abs_error(self) -> Fraction:
        """Uniform bound on |float midpoint - true value|, valid for floats()."""
        if self._uniform_error is not None:
            return self._uniform_error
        # Per-value mode: cover both each term's own bound and the float64
        # rounding incurred when the midpoints are viewed through floats().
        worst = max(v.abs_error for v in self._values)
        peak = max(abs(v.value) for v in self._values)
        return worst + (peak + 1) * Fraction(1, 1 << 52)

    def value_at(self, k: int) -> PrecisionReal:
        if not self.k_start <= k <= self.k_end:
            raise OutOfRange(f"k={k} outside [{self.k_start}, {self.k_end}]")
        i = k - self.k_start
        if self._values is not None:
            return self._values[i]
        return PrecisionReal(Fraction(float(self._floats[i])), self._uniform_error)

    @property
    def sup_abs(self) -> PrecisionReal:
        """Certified enclosure of max_k |x_k|."""
        if self._floats is not None and self._uniform_error is not None:
            peak = Fraction(float(np.max(np.abs(self._floats))))
            return PrecisionReal(peak, self._uniform_error)
        best = max(self.values, key=lambda v: abs(v.value))
        return PrecisionReal(abs(best.value), self.abs_error)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "value", "abs_error"])
            if self._values is not None:
                for k, v in zip(range(self.k_start, self.k_end + 1), self._values):
                    w.writerow([k, repr(float(v.value)), repr(float_upper(v.abs_error))])
            else:
                err = repr(float_upper(self._uniform_error))
                for k, f in zip(range(self.k_start, self.k_end + 1), self._floats):
                    w.writerow([k, repr(float(f)), err])

    @classmethod
    def from_csv(cls, path, kind: str = "loaded") -> "Sample":
        ks: list[int] = []
        vals: list[float] = []
        errs: list[float] = []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != ["k", "value", "abs_error"]:
                raise DomainError(f"unexpected sample CSV header: {header}")
            for row in reader:
                ks.append(int(row[0]))
                vals.append(float(row[1]))
                errs.append(float(row[2]))
        if not ks:
            raise DomainError("sample CSV has no rows")
        if ks != list(range(ks[0], ks[0] + len(ks))):
            raise DomainError("sample CSV indices must be consecutive")
        if len(set(errs)) == 1:
            return cls.from_floats(kind, ks[0], vals, Fraction(errs[0]))
        values = [PrecisionReal(Fraction(v), Fraction(e)) for v, e in zip(vals, errs)]
        return cls.from_values(kind, ks[0], values)

    def __repr__(self):
        return (
            f"Sample(kind={self.kind!r}, k={self.k_start}..{self.k_end},"
            f" n={len(self)}, abs_error<={float_upper(self.abs_error):.3g})"
        )
