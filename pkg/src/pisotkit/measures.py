"""Distributional analysis of bounded real sequences.

Empirical (Birkhoff) measures, tail-based cycle detection, limit-set
clustering, star discrepancy, Weyl sums, and CDF distances.  Cycle
detection implements a finite-data proxy for "converges to a cycle of
period l": every residue-class subsequence's tail must have diameter
below an explicit tolerance.  "No cycle" is always a statement relative
to (l_max, tol, N) and ships with per-l diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algnum import PrecisionReal
from .errors import DomainError, InsufficientData, OutOfRange
from .samples import Sample, float_upper


def as_float_array(sample, tol=None) -> np.ndarray:
    """Collapse a sample to float64 midpoints.

    Accepts Sample, PrecisionReal lists, or plain numerics.  When ``tol``
    is given, certified inputs are collapsed only if their error bound is
    below tol/10; otherwise the operation refuses, since conclusions at
    tolerance tol would be meaningless on coarser data.
    """
    if isinstance(sample, Sample):
        err = sample.abs_error
        if tol is not None and err >= Fraction(tol) / 10:
            raise DomainError(
                f"sample error bound {float_upper(err):.3g} is too coarse for"
                f" tolerance {tol:.3g} (needs < tol/10)"
            )
        return np.asarray(sample.floats(), dtype=np.float64)
    if isinstance(sample, (list, tuple)) and sample and isinstance(sample[0], PrecisionReal):
        err = max(v.abs_error for v in sample)
        if tol is not None and err >= Fraction(tol) / 10:
            raise DomainError(
                f"sample error bound {float(err):.3g} is too coarse for"
                f" tolerance {tol:.3g} (needs < tol/10)"
            )
        return np.fromiter((float(v.value) for v in sample), np.float64, count=len(sample))
    arr = np.asarray(sample, dtype=np.float64)
    if arr.ndim != 1:
        raise DomainError("sample must be one-dimensional")
    return arr


class EmpiricalMeasure:
    """Uniform atomic measure on a sample; CDF queries are O(log n)."""

    __slots__ = ("sorted_samples", "n")

    def __init__(self, sample):
        arr = as_float_array(sample)
        if arr.size == 0:
            raise DomainError("empirical measure needs a nonempty sample")
        self.sorted_samples = np.sort(arr)
        self.n = int(arr.size)

    def cdf(self, x):
        """P(X <= x); vectorized."""
        return np.searchsorted(self.sorted_samples, x, side="right") / self.n

    def cdf_left(self, x):
        """P(X < x); the left limit of the CDF."""
        return np.searchsorted(self.sorted_samples, x, side="left") / self.n

    def mean(self) -> float:
        return float(np.mean(self.sorted_samples))

    @property
    def knots(self) -> np.ndarray:
        return self.sorted_samples

    def mass_in(self, lo: float, hi: float) -> float:
        """Mass of the closed interval [lo, hi]."""
        a = np.searchsorted(self.sorted_samples, lo, side="left")
        b = np.searchsorted(self.sorted_samples, hi, side="right")
        return (b - a) / self.n

    def __repr__(self):
        return (
            f"EmpiricalMeasure(n={self.n},"
            f" range=[{self.sorted_samples[0]:.6g}, {self.sorted_samples[-1]:.6g}])"
        )


def empirical_measure(sample) -> EmpiricalMeasure:
    return EmpiricalMeasure(sample)


@dataclass(frozen=True)
class CycleReport:
    """Outcome of residue-class tail-diameter cycle detection."""

    found: bool
    period: int | None
    residue_limits: list[float] | None
    residue_residuals: list[float] | None
    k_tail_start: int
    tolerance: float
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "found": self.found,
            "period": self.period,
            "residue_limits": self.residue_limits,
            "residue_residuals": self.residue_residuals,
            "k_tail_start": self.k_tail_start,
            "tolerance": self.tolerance,
            "diagnostics": {str(k): v for k, v in self.diagnostics.items()},
        }


def detect_cycle(
    sample,
    ell_max: int = 12,
    tol: float = 1e-6,
    tail_fraction: float = 0.5,
    k_start: int | None = None,
) -> CycleReport:
    """Smallest period l <= ell_max whose residue-class tails all converge.

    A residue class j collects the tail values at absolute indices
    k == j (mod l); the class "converges" here when its tail diameter is
    below tol.  Scanning l in increasing order makes the reported period
    minimal among detected ones.
    """
    if ell_max < 1:
        raise DomainError("ell_max must be at least 1")
    if not 0 < tail_fraction <= 1:
        raise DomainError("tail_fraction must be in (0, 1]")
    if k_start is None:
        k_start = sample.k_start if isinstance(sample, Sample) else 1
    arr = as_float_array(sample, tol=tol)
    n = arr.size
    if n * tail_fraction < 10 * ell_max:
        raise InsufficientData(
            f"need length*tail_fraction >= 10*ell_max = {10 * ell_max},"
            f" got {n * tail_fraction:.0f}"
        )
    tail_len = max(int(n * tail_fraction), 1)
    k_tail_start = k_start + n - tail_len
    tail = arr[n - tail_len :]
    diagnostics: dict[int, float] = {}
    for ell in range(1, ell_max + 1):
        worst = 0.0
        limits = []
        diams = []
        for j in range(ell):
            offset = (j - k_tail_start) % ell
            cls = tail[offset::ell]
            lo = float(np.min(cls))
            hi = float(np.max(cls))
            limits.append((lo + hi) / 2)
            diams.append(hi - lo)
            if hi - lo > worst:
                worst = hi - lo
        diagnostics[ell] = worst
        if worst < tol:
            return CycleReport(
                found=True,
                period=ell,
                residue_limits=limits,
                residue_residuals=diams,
                k_tail_start=k_tail_start,
                tolerance=tol,
                diagnostics=diagnostics,
            )
    return CycleReport(
        found=False,
        period=None,
        residue_limits=None,
        residue_residuals=None,
        k_tail_start=k_tail_start,
        tolerance=tol,
        diagnostics=diagnostics,
    )


@dataclass(frozen=True)
class LimitSetEstimate:
    """Single-linkage clusters of a sequence tail."""

    clusters: list[tuple[float, float, float]]  # (center, radius, tail_mass_fraction)
    gap_threshold: float

    @property
    def count(self) -> int:
        return len(self.clusters)

    def to_dict(self) -> dict:
        return {
            "clusters": [
                {"center": c, "radius": r, "tail_mass_fraction": m}
                for c, r, m in self.clusters
            ],
            "gap_threshold": self.gap_threshold,
        }


def limit_set_estimate(
    sample, tail_fraction: float = 0.5, gap_threshold: float = 1e-3
) -> LimitSetEstimate:
    """Cluster the sample tail; clusters separated by gaps > gap_threshold."""
    if not 0 < tail_fraction <= 1:
        raise DomainError("tail_fraction must be in (0, 1]")
    if gap_threshold <= 0:
        raise DomainError("gap_threshold must be positive")
    arr = as_float_array(sample, tol=gap_threshold)
    n = arr.size
    tail_len = max(int(n * tail_fraction), 1)
    tail = np.sort(arr[n - tail_len :])
    splits = np.where(np.diff(tail) > gap_threshold)[0] + 1
    clusters = []
    for chunk in np.split(tail, splits):
        lo, hi = float(chunk[0]), float(chunk[-1])
        clusters.append(((lo + hi) / 2, (hi - lo) / 2, chunk.size / tail_len))
    return LimitSetEstimate(clusters=clusters, gap_threshold=gap_threshold)


def star_discrepancy(sample) -> float:
    """Exact D*_N = max_i max(i/N - x_(i), x_(i) - (i-1)/N) over sorted x."""
    arr = as_float_array(sample)
    if arr.size == 0:
        raise DomainError("star discrepancy needs a nonempty sample")
    if np.min(arr) < 0 or np.max(arr) >= 1:
        raise OutOfRange("star discrepancy requires all values in [0, 1)")
    xs = np.sort(arr)
    n = xs.size
    i = np.arange(1, n + 1, dtype=np.float64)
    return float(np.max(np.maximum(i / n - xs, xs - (i - 1) / n)))


def weyl_sum(sample, h: int) -> float:
    """|(1/N) sum_k exp(2*pi*i*h*x_k)|."""
    h = int(h)
    if h == 0:
        raise DomainError("h must be a nonzero integer")
    arr = as_float_array(sample)
    if arr.size == 0:
        raise DomainError("Weyl sum needs a nonempty sample")
    return float(np.abs(np.exp(2j * np.pi * h * arr).mean()))


def ks_distance(em: EmpiricalMeasure, cdf) -> float:
    """sup |F_em - F_cdf| over sample points and cdf knots, both limits.

    ``cdf`` may be any object with cdf()/knots (piecewise-linear
    predicted CDFs, or another EmpiricalMeasure for step-vs-step
    comparison); left limits use cdf_left when available.
    """
    pts = np.unique(np.concatenate([em.sorted_samples, np.asarray(cdf.knots, dtype=np.float64)]))
    right = np.abs(em.cdf(pts) - cdf.cdf(pts))
    other_left = cdf.cdf_left(pts) if hasattr(cdf, "cdf_left") else cdf.cdf(pts)
    left = np.abs(em.cdf_left(pts) - other_left)
    return float(max(np.max(right), np.max(left)))


def histogram_counts(em: EmpiricalMeasure, bins: int = 32, lo=None, hi=None):
    """Equal-width histogram rows (bin_lo, bin_hi, count)."""
    if bins < 1:
        raise DomainError("bins must be positive")
    data = em.sorted_samples
    lo = float(data[0]) if lo is None else float(lo)
    hi = float(data[-1]) if hi is None else float(hi)
    if hi <= lo:
        hi = lo + 1.0
    counts, edges = np.histogram(data, bins=bins, range=(lo, hi))
    return [
        (float(edges[i]), float(edges[i + 1]), int(counts[i])) for i in range(bins)
    ]


def histogram_csv(em: EmpiricalMeasure, path, bins: int = 32, lo=None, hi=None) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["bin_lo", "bin_hi", "count"])
        for row in histogram_counts(em, bins, lo, hi):
            w.writerow(row)
