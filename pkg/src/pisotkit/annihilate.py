"""Exact annihilation identities and the combined sequences built on them.

Given an integer sequence m and an integer polynomial p with root alpha,
the window sums e_k = sum_s a_s m_{k+s} are exact integers, and the
combined sequences

    eta_k   = m_{k+1} - alpha*m_k + {(k+1)theta} - alpha*{k theta}
    teta_k  = sum_s a_s eta_{k+s}            (written eta-tilde)
    c_k     = a_d {(k+d+1)theta}
              + sum_{s=1}^d (a_{s-1} - alpha*a_s) {(k+s)theta}
              - alpha*a_0 {k theta}

satisfy the exact identity  teta_k = e_{k+1} - alpha*e_k + c_k.  The
same c_k values arise by evaluating a piecewise-linear map g at {k
theta}, which is what links the eta dynamics to a closed-form limiting
density.  gamma_k = xi*alpha^k - k*theta and its window sum stress the
precision policy: the alpha^k parts cancel algebraically, leaving
-theta * sum_s a_s (k+s).
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from . import _kernels
from .algnum import (
    IntPolynomial,
    PrecisionReal,
    RealAlgebraic,
    bits_for,
    dyadic_fraction,
    escalate_until,
    frac_part,
    power_walk,
)
from .errors import DomainError
from .samples import Sample
from .seqgen import IntegerSequence, eta_arrays, _as_precision
from .theta import Theta

CombinedSample = Sample


class AnnihilatedSequence:
    """Exact window sums e_k = sum_s a_s m_{k+s} of an integer sequence."""

    __slots__ = ("k_start", "e_terms", "window_poly", "_value_set")

    def __init__(self, k_start: int, e_terms, window_poly: IntPolynomial):
        self.k_start = int(k_start)
        self.e_terms = tuple(int(t) for t in e_terms)
        if not self.e_terms:
            raise DomainError("annihilated sequence must be nonempty")
        self.window_poly = window_poly
        self._value_set = None

    def __len__(self) -> int:
        return len(self.e_terms)

    @property
    def k_end(self) -> int:
        return self.k_start + len(self.e_terms) - 1

    def term(self, k: int) -> int:
        return self.e_terms[k - self.k_start]

    @property
    def value_set(self) -> tuple:
        """Sorted distinct values taken by e_k."""
        if self._value_set is None:
            self._value_set = tuple(sorted(set(self.e_terms)))
        return self._value_set

    @property
    def max_abs(self) -> int:
        vs = self.value_set
        return max(abs(vs[0]), abs(vs[-1]))

    def is_identically_zero(self) -> bool:
        return self.value_set == (0,)

    def lemma_bound(self, alpha_upper, residual_sup) -> Fraction:
        """Explicit bound sum_{s=1}^d |a_s| sum_{t<s} alpha^t * B on |e_k|.

        Valid whenever alpha_upper >= alpha and residual_sup bounds
        sup_k |m_{k+1} - alpha*m_k| over the window range.
        """
        a_up = Fraction(alpha_upper)
        b = Fraction(residual_sup)
        coeffs = self.window_poly.coeffs
        total = Fraction(0)
        for s in range(1, len(coeffs)):
            geom = sum(a_up**t for t in range(s))
            total += abs(coeffs[s]) * geom * b
        return total

    def to_csv(self, path) -> None:
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "e"])
            for k, t in zip(range(self.k_start, self.k_end + 1), self.e_terms):
                w.writerow([k, t])

    def __repr__(self):
        vs = self.value_set
        shown = vs if len(vs) <= 8 else f"{len(vs)} distinct values"
        return f"AnnihilatedSequence(k={self.k_start}..{self.k_end}, values={shown})"


def e_sequence(m: IntegerSequence, p: IntPolynomial) -> AnnihilatedSequence:
    """Exact integers e_k = sum_s a_s m_{k+s}, k over the valid windows."""
    d = p.degree
    if len(m) < d + 1:
        raise DomainError(f"need at least {d + 1} terms, got {len(m)}")
    terms = _kernels.annihilated_terms(m.terms, p.coeffs)
    return AnnihilatedSequence(m.start_index, terms, p)


# -- the single audited combination kernels ------------------------------


def weighted_sum(weights, values) -> PrecisionReal:
    """sum_i weights[i] * values[i] in exact interval arithmetic.

    Every dot product in this module (c_direct, g_eval, window sums on
    certified values) funnels through here so the error propagation has
    exactly one implementation.
    """
    if len(weights) != len(values):
        raise DomainError("weights and values must have equal length")
    acc = PrecisionReal.exact(0)
    for w, v in zip(weights, values):
        acc = acc + _as_precision(v) * w
    return acc


def window_combine(sample: Sample, coeffs, kind: str, params=None) -> Sample:
    """out_k = sum_s coeffs[s] * x_{k+s}; integer coefficient window sums.

    Uniform float samples combine vectorized with a propagated uniform
    bound; per-value samples combine through weighted_sum.
    """
    d = len(coeffs) - 1
    n_out = len(sample) - d
    if n_out < 1:
        raise DomainError("sample shorter than the combination window")
    merged = dict(sample.params)
    if params:
        merged.update(params)
    if sample._floats is not None and sample._uniform_error is not None:
        arr = sample.floats()
        out = np.zeros(n_out, dtype=np.float64)
        for s, a in enumerate(coeffs):
            if a:
                out += float(a) * arr[s : s + n_out]
        weight = sum(abs(int(a)) for a in coeffs)
        peak = float(np.max(np.abs(out))) if n_out else 0.0
        slop = (Fraction(peak) + weight * (Fraction(float(np.max(np.abs(arr)))) + 1))
        err = weight * sample.abs_error + slop * (d + 2) * 2 * _kernels.FLOAT_REL
        return Sample.from_floats(kind, sample.k_start, out, err, merged)
    vals = sample.values
    out_vals = [
        weighted_sum(coeffs, vals[i : i + d + 1]) for i in range(n_out)
    ]
    return Sample.from_values(kind, sample.k_start, out_vals, merged)


# -- eta and its window sum ----------------------------------------------


def eta_sequence(
    m: IntegerSequence, alpha: RealAlgebraic, theta: Theta, tau_bits: int = 40
) -> Sample:
    """eta_k = m_{k+1} - alpha*m_k + {(k+1)theta} - alpha*{k theta}.

    Rational theta runs on the exact residue path (bit-identical values
    on each residue class mod q); irrational theta on certified
    fixed-point batches.  Result is a uniform float sample with one
    covering error bound.
    """
    eta, err, _, _, _ = eta_arrays(m, alpha, theta, tau_bits)
    params = {
        "polynomial": str(alpha.poly),
        "theta": theta.describe(),
    }
    return Sample.from_floats("eta", m.start_index, eta, err, params)


def tilde_eta(eta: Sample, p: IntPolynomial) -> Sample:
    """Window sum eta-tilde_k = sum_s a_s eta_{k+s}."""
    return window_combine(eta, p.coeffs, "eta_tilde", {"window": str(p)})


# -- c_k three ways -------------------------------------------------------


def _c_weights(p: IntPolynomial, a: PrecisionReal):
    """Weights for [u_0, ..., u_{d+1}] with u_s = {(k+s)theta}."""
    coeffs = p.coeffs
    d = p.degree
    w = [a * (-coeffs[0])]
    for s in range(1, d + 1):
        w.append(PrecisionReal.exact(coeffs[s - 1]) - a * coeffs[s])
    w.append(PrecisionReal.exact(coeffs[d]))
    return w


def c_direct(
    k: int, p: IntPolynomial, alpha: RealAlgebraic, theta: Theta, bits: int = 60
) -> PrecisionReal:
    """c_k = a_d{(k+d+1)t} + sum_{s=1}^d (a_{s-1} - alpha a_s){(k+s)t} - alpha a_0 {kt}."""
    d = p.degree
    a = alpha.refine(bits + 8)
    weights = _c_weights(p, a)
    us = [theta.frac_multiple(k + s, bits=bits + 8) for s in range(d + 2)]
    return weighted_sum(weights, us)


def c_batch(
    p: IntPolynomial,
    alpha: RealAlgebraic,
    theta: Theta,
    k_start: int,
    count: int,
    tau_bits: int = 40,
) -> Sample:
    """Vectorized c_k for k = k_start .. k_start+count-1."""
    if count < 1:
        raise DomainError("count must be positive")
    d = p.degree
    coeffs = p.coeffs
    batch = theta.frac_batch(k_start, count + d + 1, bits=max(60, tau_bits + 8))
    u = np.asarray(batch.floats(), dtype=np.float64)
    a_pr = alpha.refine(tau_bits + 8)
    a_f = float(a_pr.value)
    a_err = a_pr.abs_error + abs(a_pr.value - Fraction(a_f))
    w_floats = [-a_f * coeffs[0]]
    for s in range(1, d + 1):
        w_floats.append(coeffs[s - 1] - a_f * coeffs[s])
    w_floats.append(float(coeffs[d]))
    out = np.zeros(count, dtype=np.float64)
    for s, w in enumerate(w_floats):
        if w:
            out += w * u[s : s + count]
    # |u| < 1 throughout: alpha's error enters via the a_0..a_d weights,
    # the batch error via the weight magnitudes, plus float slop.
    weight_mag = sum(abs(Fraction(w)) for w in w_floats)
    alpha_sensitivity = sum(abs(c) for c in coeffs[: d + 1])
    err = (
        weight_mag * batch.float_error
        + a_err * alpha_sensitivity
        + (weight_mag + 1) * (d + 3) * 2 * _kernels.FLOAT_REL
    )
    params = {"polynomial": str(p), "theta": theta.describe()}
    return Sample.from_floats("c", k_start, out, err, params)


def c_via_identity(
    eta_tilde: Sample, e: AnnihilatedSequence, alpha: RealAlgebraic, tau_bits: int = 40
) -> Sample:
    """c_k = eta-tilde_k - (e_{k+1} - alpha*e_k), the exact rearrangement."""
    if eta_tilde.k_start != e.k_start:
        raise DomainError("eta-tilde and e must start at the same index")
    n_out = len(eta_tilde)
    if len(e) < n_out + 1:
        raise DomainError("e sequence too short for the identity window")
    a_pr = alpha.refine(tau_bits + 8)
    big = max(abs(t) for t in e.e_terms[: n_out + 1])
    if eta_tilde._floats is not None and big < (1 << 50):
        ef = np.fromiter((float(t) for t in e.e_terms[: n_out + 1]), np.float64)
        a_f = float(a_pr.value)
        a_err = a_pr.abs_error + abs(a_pr.value - Fraction(a_f))
        out = eta_tilde.floats() - (ef[1:] - a_f * ef[:-1])
        peak = Fraction(float(np.max(np.abs(out)))) if n_out else Fraction(0)
        err = (
            eta_tilde.abs_error
            + a_err * big
            + (peak + (2 + Fraction(float(abs(a_f)))) * big) * 3 * 2 * _kernels.FLOAT_REL
        )
        return Sample.from_floats("c", eta_tilde.k_start, out, err, dict(eta_tilde.params))
    vals = eta_tilde.values
    out_vals = [
        vals[i] - e.e_terms[i + 1] + a_pr * e.e_terms[i] for i in range(n_out)
    ]
    return Sample.from_values("c", eta_tilde.k_start, out_vals, dict(eta_tilde.params))


def g_eval(
    x, p: IntPolynomial, alpha: RealAlgebraic, theta: Theta, bits: int = 60
) -> PrecisionReal:
    """The piecewise-linear map g at x in [0,1).

    g(x) = a_d{x+(d+1)t} + sum_{s=1}^d (a_{s-1} - alpha a_s){x+st}
           - alpha a_0 x, with slope (1-alpha)p(1) between breakpoints.
    At a breakpoint the fractional parts are discontinuous; certification
    escalates and ultimately raises (BoundaryAmbiguous for inputs whose
    own uncertainty covers the breakpoint).
    """
    xp = _as_precision(x)
    if xp.lower < 0 or xp.upper >= 1:
        raise DomainError("g is defined on [0, 1)")
    d = p.degree

    def attempt(work_bits: int):
        a = alpha.refine(work_bits + 8)
        weights = _c_weights(p, a)
        # us[0] is x itself (the -alpha*a_0*x term), not a fractional part.
        us = [xp]
        for s in range(1, d + 2):
            us.append(frac_part(xp + theta.frac_multiple(s, bits=work_bits + 8)))
        return weighted_sum(weights, us)

    if xp.abs_error == 0:
        return escalate_until(bits, attempt, describe="g evaluation near a breakpoint")
    return attempt(max(bits, bits_for(xp.abs_error) + 8))


# -- gamma and its window sum ---------------------------------------------


def _theta_times(theta, k: int, target_bits: int) -> PrecisionReal:
    """k*theta as a certified real (exact when theta is rational)."""
    if isinstance(theta, Theta):
        if theta.is_rational:
            return PrecisionReal.exact(k * theta.as_fraction())
        t = theta.refine(Fraction(1, 1 << (target_bits + max(1, abs(k)).bit_length() + 2)))
        return t * k
    return _as_precision(theta) * k


def gamma(
    xi, alpha: RealAlgebraic, theta, k_range, tau_bits: int = 48
) -> Sample:
    """gamma_k = xi*alpha^k - k*theta for k in k_range = (k_min, k_max)."""
    k_min, k_max = int(k_range[0]), int(k_range[1])
    if k_min > k_max or k_min < 0:
        raise DomainError("k_range must satisfy 0 <= k_min <= k_max")
    xi = Fraction(xi)
    if xi == 0:
        raise DomainError("xi must be nonzero")
    walk = power_walk(alpha, k_max, Fraction(1, 1 << (tau_bits + 10)))
    # Bulk construction works on integer mantissas over one shared dyadic
    # grid; per-value Fraction arithmetic at these sizes spends nearly all
    # of its time normalizing multi-kilobit numerators.
    out_bits = tau_bits + 12
    kb = max(1, k_max).bit_length()
    th = _theta_times(theta, 1, out_bits + kb + 4).rounded(out_bits + kb + 4)
    tden_bits = th.value.denominator.bit_length() - 1
    t_man = th.value.numerator << (out_bits + kb + 4 - tden_bits)
    t_err = th.abs_error
    # One shared bound covers every term: the walk error is monotone in k
    # by construction, so the worst case is explicit.
    err = (
        max(w.abs_error for w in walk) * abs(xi)
        + t_err * k_max
        + Fraction(3, 1 << out_bits)
    )
    xin, xid = xi.numerator, xi.denominator
    values = []
    for k in range(k_min, k_max + 1):
        w = walk[k]
        wnum, wden = w.value.numerator, w.value.denominator
        j = wden.bit_length() - 1
        if wden != 1 << j:
            values.append(w * xi - _theta_times(theta, k, tau_bits + 10))
            continue
        if j <= out_bits:
            a_man = (wnum * xin << (out_bits - j)) // xid
        else:
            a_man = (wnum * xin) // (xid << (j - out_bits))
        b_man = (k * t_man) >> (kb + 4)
        values.append(PrecisionReal(dyadic_fraction(a_man - b_man, out_bits), err, out_bits))
    params = {
        "polynomial": str(alpha.poly),
        "xi": str(xi),
        "theta": theta.describe() if isinstance(theta, Theta) else str(_as_precision(theta).value),
    }
    return Sample.from_values("gamma", k_min, values, params)


def tilde_gamma(gamma_sample: Sample, p: IntPolynomial) -> Sample:
    """Window sum over gamma; the alpha^k parts cancel against p."""
    return window_combine(gamma_sample, p.coeffs, "gamma_tilde", {"window": str(p)})


def tilde_gamma_closed(k: int, p: IntPolynomial, theta, bits: int = 48) -> PrecisionReal:
    """Closed form -theta * sum_s a_s (k+s)."""
    coeffs = p.coeffs
    n = sum(a * (k + s) for s, a in enumerate(coeffs))
    return -_theta_times(theta, n, bits)
