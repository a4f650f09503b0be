"""Closed-form limiting distribution of the c_k values for irrational shifts.

The fractional parts {-s*theta}, s = 1..d+1, cut (0,1) into d+2 open
intervals J_j on which the map g (see the annihilation module) is linear
with the j-independent slope (1-alpha)*p(1).  Pushing Lebesgue measure
on (0,1) through g gives the predicted limiting distribution of c_k:
image intervals I_j = g(J_j), each carrying constant density
1/((alpha-1)*|p(1)|).  Overlaps add; total mass is exactly 1 by the
change of variables |I_j| = (alpha-1)*|p(1)|*|J_j|.

Rational shifts are rejected here (the limit object is then a finite
cycle, not a density); the pipeline routes those runs to cycle
detection instead.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algnum import IntPolynomial, PrecisionReal, RealAlgebraic, escalation
from .annihilate import g_eval
from .errors import DegenerateTheta, DomainError, PrecisionExhausted
from .measures import EmpiricalMeasure, empirical_measure, ks_distance
from .samples import Sample
from .theta import Theta


@dataclass(frozen=True)
class PartitionSpec:
    """The d+1 certified breakpoints and the d+2 intervals they cut."""

    breakpoints: list[PrecisionReal]

    @property
    def intervals(self) -> list[tuple[PrecisionReal, PrecisionReal]]:
        ends = [PrecisionReal.exact(0)] + list(self.breakpoints) + [PrecisionReal.exact(1)]
        return list(zip(ends[:-1], ends[1:]))

    def breakpoint_floats(self) -> list[float]:
        return [float(b.value) for b in self.breakpoints]


def breakpoints(theta: Theta, d: int, bits: int = 60) -> list[PrecisionReal]:
    """Sorted certified-distinct fractional parts {-s*theta}, s = 1..d+1.

    Requires a certified-irrational shift: for rational theta the parts
    collide with each other (or the endpoints) and the limiting object
    is a cycle, which is DegenerateTheta here.  A shift known only to
    declared decimal accuracy cannot be certified irrational and is
    rejected the same way.
    """
    if d < 1:
        raise DomainError("degree must be at least 1")
    if theta.is_rational is True:
        raise DegenerateTheta("breakpoints require an irrational shift")
    if theta.is_rational is None:
        raise DegenerateTheta(
            "shift rationality is undeclared (decimal input); cannot certify"
            " distinct breakpoints"
        )
    for work in escalation(bits):
        pts = sorted(
            (theta.frac_multiple(-s, bits=work) for s in range(1, d + 2)),
            key=lambda v: v.value,
        )
        ok = all(a.upper < b.lower for a, b in zip(pts, pts[1:]))
        ok = ok and pts[0].lower > 0 and pts[-1].upper < 1
        if ok:
            return pts
    raise PrecisionExhausted("could not separate the breakpoints pairwise")


@dataclass(frozen=True)
class PredictedDensity:
    """Sum of indicator densities: pieces (lo, hi, height), overlaps add."""

    pieces: list[tuple[PrecisionReal, PrecisionReal, PrecisionReal]]
    height: PrecisionReal
    slope: PrecisionReal
    total_mass: PrecisionReal
    partition: PartitionSpec
    params: dict

    def pieces_float(self) -> list[tuple[float, float, float]]:
        return [
            (float(lo.value), float(hi.value), float(h.value)) for lo, hi, h in self.pieces
        ]

    def support_contains_interval(self) -> bool:
        """True when at least one image interval has certified positive length."""
        return any(hi.lower > lo.upper for lo, hi, _ in self.pieces)

    def support_intervals(self, dilation: float = 0.0) -> list[tuple[float, float]]:
        """Merged float support intervals, each dilated by ``dilation``."""
        spans = sorted(
            (float(lo.value) - dilation, float(hi.value) + dilation)
            for lo, hi, _ in self.pieces
        )
        merged: list[list[float]] = []
        for lo, hi in spans:
            if merged and lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        return [(a, b) for a, b in merged]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["lo", "hi", "height"])
            for lo, hi, h in self.pieces_float():
                w.writerow([repr(lo), repr(hi), repr(h)])


def _require_root_of(p: IntPolynomial, alpha: RealAlgebraic) -> None:
    if alpha.poly == p:
        return
    lo, hi = alpha.bracket
    if alpha.is_exact:
        if p(lo) == 0:
            return
    elif p.count_roots(lo, hi) >= 1 and p(lo) * p(hi) < 0:
        return
    raise DomainError("alpha must be a root of the supplied polynomial")


def predicted_density(
    p: IntPolynomial, alpha: RealAlgebraic, theta: Theta, bits: int = 60
) -> PredictedDensity:
    """Image intervals I_j = g(J_j) with constant height 1/((alpha-1)|p(1)|)."""
    p1 = p.evaluate_at_one()
    if p1 == 0:
        raise DomainError("p(1) = 0: the predicted density is undefined")
    _require_root_of(p, alpha)
    a = alpha.refine(bits + 16)
    if not a.certainly_gt(1):
        a = alpha.refine(bits + 64)
        if not a.certainly_gt(1):
            raise DomainError("alpha must be certified greater than 1")
    d = p.degree
    part = PartitionSpec(breakpoints(theta, d, bits=bits))
    slope = (1 - a) * p1
    height = 1 / ((a - 1) * abs(p1))
    pieces = []
    total = PrecisionReal.exact(0)
    for lo, hi in part.intervals:
        mid = (lo.value + hi.value) / 2
        if not (lo.upper < mid < hi.lower):
            raise PrecisionExhausted("partition interval too narrow to certify")
        g_mid = g_eval(mid, p, alpha, theta, bits=bits)
        end_a = g_mid + slope * (lo - mid)
        end_b = g_mid + slope * (hi - mid)
        if end_a.value <= end_b.value:
            piece = (end_a, end_b, height)
        else:
            piece = (end_b, end_a, height)
        pieces.append(piece)
        total = total + height * (piece[1] - piece[0])
    return PredictedDensity(
        pieces=pieces,
        height=height,
        slope=slope,
        total_mass=total,
        partition=part,
        params={"polynomial": str(p), "theta": theta.describe()},
    )


class PredictedCDF:
    """Piecewise-linear CDF of a PredictedDensity; float precision."""

    __slots__ = ("knots", "values")

    def __init__(self, knots, values):
        self.knots = np.asarray(knots, dtype=np.float64)
        self.values = np.asarray(values, dtype=np.float64)
        if self.knots.ndim != 1 or self.knots.size < 2:
            raise DomainError("a CDF needs at least two knots")
        if np.any(np.diff(self.knots) <= 0):
            raise DomainError("knots must be strictly increasing")
        if np.any(np.diff(self.values) < 0):
            raise DomainError("CDF values must be nondecreasing")

    def cdf(self, x):
        return np.interp(x, self.knots, self.values, left=0.0, right=float(self.values[-1]))

    cdf_left = cdf  # continuous

    @property
    def total(self) -> float:
        return float(self.values[-1])

    def to_csv(self, path, gnuplot: bool = False) -> None:
        with open(path, "w", newline="") as fh:
            if gnuplot:
                for x, v in zip(self.knots, self.values):
                    fh.write(f"{x!r} {v!r}\n")
                return
            w = csv.writer(fh)
            w.writerow(["x", "F"])
            for x, v in zip(self.knots, self.values):
                w.writerow([repr(float(x)), repr(float(v))])


def predicted_cdf(pd: PredictedDensity) -> PredictedCDF:
    """Exact-order integration of the summed piece heights."""
    events: dict[float, float] = {}
    for lo, hi, h in pd.pieces_float():
        events[lo] = events.get(lo, 0.0) + h
        events[hi] = events.get(hi, 0.0) - h
    knots = sorted(events)
    values = [0.0]
    active = 0.0
    for i in range(len(knots) - 1):
        active += events[knots[i]]
        values.append(values[-1] + active * (knots[i + 1] - knots[i]))
    return PredictedCDF(knots, values)


@dataclass(frozen=True)
class DensityComparison:
    """Empirical-vs-predicted distances for a c_k sample."""

    ks: float
    l1_histogram: float
    outside_mass: float
    dilation: float
    per_interval: list[tuple[float, float, float, float]]  # lo, hi, predicted, empirical
    n: int
    params: dict

    def to_dict(self) -> dict:
        return {
            "ks": self.ks,
            "l1_histogram": self.l1_histogram,
            "outside_mass": self.outside_mass,
            "dilation": self.dilation,
            "per_interval": [
                {"lo": lo, "hi": hi, "predicted_mass": pm, "empirical_mass": em}
                for lo, hi, pm, em in self.per_interval
            ],
            "n": self.n,
            "params": self.params,
        }


def density_report(
    p: IntPolynomial,
    alpha: RealAlgebraic,
    theta: Theta,
    c_sample,
    dilation: float = 1e-6,
) -> DensityComparison:
    """KS, L1-histogram, and support distances between c_k data and prediction."""
    pd = predicted_density(p, alpha, theta)
    cdf = predicted_cdf(pd)
    em = empirical_measure(
        c_sample.floats() if isinstance(c_sample, Sample) else c_sample
    )
    ks = ks_distance(em, cdf)

    support = pd.support_intervals(dilation)
    data = em.sorted_samples
    inside = np.zeros(data.size, dtype=bool)
    for lo, hi in support:
        a = np.searchsorted(data, lo, side="left")
        b = np.searchsorted(data, hi, side="right")
        inside[a:b] = True
    outside_mass = float(1.0 - inside.mean())

    # L1 over the knot partition, plus any empirical mass beyond the knots.
    knots = cdf.knots
    pred_cells = np.diff(cdf.values)
    emp_cells = np.diff(em.cdf(knots))
    l1 = float(np.sum(np.abs(pred_cells - emp_cells)))
    l1 += float(em.cdf_left(knots[0]) + (1.0 - em.cdf(knots[-1])))

    per_interval = []
    for lo, hi, h in pd.pieces_float():
        per_interval.append((lo, hi, h * (hi - lo), float(em.mass_in(lo, hi))))

    return DensityComparison(
        ks=ks,
        l1_histogram=l1,
        outside_mass=outside_mass,
        dilation=dilation,
        per_interval=per_interval,
        n=em.n,
        params=dict(pd.params),
    )
