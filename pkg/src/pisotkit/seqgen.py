"""Integer sequence constructors and residual diagnostics.

Four sequence families feed the downstream machinery: exact linear
recurrences (the cleanest inputs, annihilated identically), rounded
powers xi*alpha^k (witnesses for the distance-to-integer property),
greedy log-drift sequences n_{k+1} = round(alpha*n_k + beta*ln n_k),
and the floor shift m_k = n_k + floor(k*theta) tying the two pictures
together.  Residuals f_k = m_{k+1} - alpha*m_k (and the log-drift and
eta variants) come back as certified samples.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .algnum import (
    PrecisionReal,
    RealAlgebraic,
    escalate_until,
    exp_prec,
    ln_prec,
    pi_prec,
    round_nearest,
    sqrt_prec,
)
from .errors import (
    BoundaryAmbiguous,
    DomainError,
    NonMonicRecurrence,
    NotIncreasing,
    OutOfRange,
)
from .samples import Sample
from .theta import Theta

# Sequences are materialized eagerly; this guards against runaway sizes
# (terms themselves grow like alpha^k, so memory is the real constraint).
K_MAX_GUARD = 10**6

ResidualSample = Sample

RESIDUAL_KINDS = ("f", "g", "eta")


class IntegerSequence:
    """Eagerly materialized integer sequence plus its provenance descriptor.

    Terms are exact big integers at consecutive indices starting from
    ``start_index``; ``generator`` is a plain-dict descriptor sufficient
    to regenerate or audit the sequence.
    """

    __slots__ = ("start_index", "terms", "generator")

    def __init__(self, start_index: int, terms, generator: dict | None = None):
        terms = tuple(int(t) for t in terms)
        if not terms:
            raise DomainError("sequence must be nonempty")
        if len(terms) > K_MAX_GUARD:
            raise DomainError(f"sequence length {len(terms)} exceeds guard {K_MAX_GUARD}")
        self.start_index = int(start_index)
        self.terms = terms
        self.generator = dict(generator) if generator else {"kind": "explicit"}

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def k_end(self) -> int:
        return self.start_index + len(self.terms) - 1

    def term(self, k: int) -> int:
        if not self.start_index <= k <= self.k_end:
            raise OutOfRange(f"k={k} outside [{self.start_index}, {self.k_end}]")
        return self.terms[k - self.start_index]

    def __iter__(self):
        return iter(self.terms)

    def __eq__(self, other):
        return (
            isinstance(other, IntegerSequence)
            and self.start_index == other.start_index
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.start_index, self.terms))

    def is_strictly_increasing(self) -> bool:
        return all(b > a for a, b in zip(self.terms, self.terms[1:]))

    def to_dict(self) -> dict:
        return {
            "start_index": self.start_index,
            "terms": list(self.terms),
            "generator": self.generator,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "IntegerSequence":
        return cls(data["start_index"], data["terms"], data.get("generator"))

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, sort_keys=True)
            fh.write("\n")

    @classmethod
    def from_json(cls, path) -> "IntegerSequence":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "term"])
            for k, t in zip(range(self.start_index, self.k_end + 1), self.terms):
                w.writerow([k, t])

    @classmethod
    def from_csv(cls, path, generator: dict | None = None) -> "IntegerSequence":
        ks: list[int] = []
        terms: list[int] = []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != ["k", "term"]:
                raise DomainError(f"unexpected sequence CSV header: {header}")
            for row in reader:
                ks.append(int(row[0]))
                terms.append(int(row[1]))
        if not ks:
            raise DomainError("sequence CSV has no rows")
        if ks != list(range(ks[0], ks[0] + len(ks))):
            raise DomainError("sequence CSV indices must be consecutive")
        return cls(ks[0], terms, generator or {"kind": "csv"})

    def __repr__(self):
        shown = ", ".join(str(t) for t in self.terms[:6])
        if len(self.terms) > 6:
            shown += ", ..."
        return f"IntegerSequence(k={self.start_index}..{self.k_end}: {shown})"


@dataclass(frozen=True)
class DynamicsParams:
    """Derived parameters (c, alpha_0, beta_0) of the quadratic-family map."""

    a: object
    b: object
    b_03: object
    c: PrecisionReal
    alpha_0: PrecisionReal
    beta_0: PrecisionReal


def _count_guard(count: int):
    if count > K_MAX_GUARD:
        raise DomainError(f"requested {count} terms exceeds guard {K_MAX_GUARD}")


def recurrence_sequence(
    p, initial_terms, k_max: int, start_index: int = 1
) -> IntegerSequence:
    """Unroll m_{k+d} = -(a_0 m_k + ... + a_{d-1} m_{k+d-1}) / a_d exactly.

    Output satisfies sum_s a_s m_{k+s} = 0 for every window, so the
    annihilated sequence of the result is identically zero.
    """
    coeffs = p.coeffs
    d = p.degree
    a_d = coeffs[-1]
    if abs(a_d) != 1:
        raise NonMonicRecurrence(
            f"leading coefficient {a_d} is not +-1; recurrence is not integral"
        )
    initial = [int(t) for t in initial_terms]
    if len(initial) != d:
        raise DomainError(f"need exactly {d} initial terms, got {len(initial)}")
    count = k_max - start_index + 1
    if count < d:
        raise DomainError("k_max must cover the initial terms")
    _count_guard(count)
    terms = list(initial)
    # a_d is +-1, so dividing by it is multiplying by it; specializing
    # the +-1 window coefficients skips an allocation pass per term,
    # which adds up once the terms reach thousands of bits.
    ops = [(-c * a_d, s) for s, c in enumerate(coeffs[:d]) if c]
    for k in range(count - d):
        acc = 0
        for c, s in ops:
            if c == 1:
                acc += terms[k + s]
            elif c == -1:
                acc -= terms[k + s]
            else:
                acc += c * terms[k + s]
        terms.append(acc)
    return IntegerSequence(
        start_index,
        terms,
        {
            "kind": "recurrence",
            "polynomial": str(p),
            "initial_terms": initial,
            "start_index": start_index,
            "k_max": k_max,
        },
    )


def _round_exact(q: Fraction) -> int:
    """Round an exact rational to the nearest integer; halves are errors."""
    shifted = q + Fraction(1, 2)
    if shifted.denominator == 1:
        raise BoundaryAmbiguous(
            f"{q} is an exact half-integer; rounding is undefined",
            nearest_integer=None,
            distance_bound=Fraction(1, 2),
        )
    return math.floor(shifted)


def rounded_power_sequence(alpha: RealAlgebraic, xi, k_range) -> IntegerSequence:
    """m_k = nearest integer to xi*alpha^k over k_range = (k_min, k_max).

    For exact rational alpha the values are computed exactly and a true
    half-integer raises BoundaryAmbiguous.  Otherwise rounding is
    certified by precision escalation; an exact half-integer value (only
    possible when some alpha^k is rational) exhausts the budget instead,
    with the ambiguity as the chained cause.
    """
    k_min, k_max = int(k_range[0]), int(k_range[1])
    if k_min > k_max:
        raise DomainError("empty k_range")
    if k_min < 0:
        raise DomainError("negative exponents are not supported")
    _count_guard(k_max - k_min + 1)
    xi = Fraction(xi)
    if xi <= 0:
        raise DomainError("xi must be positive")
    generator = {
        "kind": "rounded-power",
        "polynomial": str(alpha.poly),
        "root_bracket": [str(alpha.bracket[0]), str(alpha.bracket[1])],
        "xi": str(xi),
        "k_range": [k_min, k_max],
    }

    if alpha.is_exact:
        r = alpha.bracket[0]
        if xi * r**k_min < 1:
            raise DomainError("xi * alpha^k_min must be at least 1")
        v = xi * r**k_min
        terms = []
        for _ in range(k_min, k_max + 1):
            terms.append(_round_exact(v))
            v *= r
        return IntegerSequence(k_min, terms, generator)

    from .algnum import power_walk

    def attempt(bits: int):
        walk = power_walk(alpha, k_max, Fraction(1, 1 << bits))
        lead = walk[k_min] * xi
        if lead.certainly_lt(1):
            raise DomainError("xi * alpha^k_min must be at least 1")
        if lead.straddles(1) and lead.lower < 1:
            raise BoundaryAmbiguous(
                "cannot certify xi * alpha^k_min >= 1",
                nearest_integer=1,
                distance_bound=abs(lead.value - 1) + lead.abs_error,
            )
        return [round_nearest(walk[k] * xi) for k in range(k_min, k_max + 1)]

    terms = escalate_until(64, attempt, describe="rounded power sequence")
    return IntegerSequence(k_min, terms, generator)


def _require_alpha_gt_one(alpha: RealAlgebraic) -> None:
    for bits in (30, 60, 120):
        r = alpha.refine(bits)
        if r.certainly_gt(1):
            return
        if r.upper < 1 or alpha.is_exact:
            break
    raise DomainError("alpha must be certified greater than 1")


def _as_precision(x) -> PrecisionReal:
    if isinstance(x, PrecisionReal):
        return x
    return PrecisionReal.exact(Fraction(x))


def log_drift_sequence(
    alpha: RealAlgebraic, beta, n_1: int, k_max: int, start_index: int = 1
) -> IntegerSequence:
    """Greedy n_{k+1} = round(alpha*n_k + beta*ln n_k), certified per step.

    By construction |n_{k+1} - alpha*n_k - beta*ln n_k| <= 1/2, which
    makes the drift residual bounded trivially.  Raises NotIncreasing as
    soon as a step fails to grow, and BoundaryAmbiguous when an exactly
    representable step lands on a half-integer.
    """
    n_1 = int(n_1)
    if n_1 < 1:
        raise DomainError("n_1 must be at least 1 (ln n_k needs n_k >= 1)")
    count = k_max - start_index + 1
    if count < 1:
        raise DomainError("k_max must be at least start_index")
    _count_guard(count)
    _require_alpha_gt_one(alpha)
    beta_pr = _as_precision(beta)
    beta_exact = beta_pr.abs_error == 0
    beta_is_zero = beta_exact and beta_pr.value == 0

    terms = [n_1]
    for step in range(count - 1):
        nk = terms[-1]
        # ln(1) = 0 exactly, so beta contributes nothing at nk == 1.
        no_log_term = beta_is_zero or nk == 1
        if alpha.is_exact and beta_exact and no_log_term:
            nxt = _round_exact(alpha.bracket[0] * nk)
        else:
            size = nk.bit_length() + 1

            def attempt(bits: int, nk=nk, no_log=no_log_term, size=size):
                a = alpha.refine(bits + size)
                v = a * nk
                if not no_log:
                    lnv = ln_prec(PrecisionReal.exact(nk), bits + 8)
                    v = v + lnv * beta_pr
                return round_nearest(v)

            nxt = escalate_until(
                48, attempt, describe=f"log-drift step at k={start_index + step}"
            )
        if nxt <= nk:
            raise NotIncreasing(
                f"step k={start_index + step}: next term {nxt} <= {nk};"
                " n_1 too small for this alpha, beta"
            )
        terms.append(nxt)
    return IntegerSequence(
        start_index,
        terms,
        {
            "kind": "log-drift",
            "polynomial": str(alpha.poly),
            "root_bracket": [str(alpha.bracket[0]), str(alpha.bracket[1])],
            "beta": str(beta_pr.value),
            "n_1": n_1,
            "k_max": k_max,
            "start_index": start_index,
            "increasing": True,
        },
    )


def m_from_n(n: IntegerSequence, theta: Theta) -> IntegerSequence:
    """Term-wise m_k = n_k + floor(k*theta) with certified floors."""
    batch = theta.frac_batch(n.start_index, len(n), bits=48)
    terms = [t + fl for t, fl in zip(n.terms, batch.floors)]
    return IntegerSequence(
        n.start_index,
        terms,
        {
            "kind": "shifted-by-floor",
            "base": n.generator,
            "theta": theta.to_dict(),
        },
    )


def n_from_m(m: IntegerSequence, theta: Theta) -> IntegerSequence:
    """Inverse shift n_k = m_k - floor(k*theta)."""
    batch = theta.frac_batch(m.start_index, len(m), bits=48)
    terms = [t - fl for t, fl in zip(m.terms, batch.floors)]
    return IntegerSequence(
        m.start_index,
        terms,
        {"kind": "unshifted-by-floor", "base": m.generator, "theta": theta.to_dict()},
    )


def theta_from_beta(alpha: RealAlgebraic, beta, bits: int = 64) -> PrecisionReal:
    """theta = beta * ln(alpha) / (alpha - 1)."""
    _require_alpha_gt_one(alpha)
    beta_pr = _as_precision(beta)
    a = alpha.refine(bits + 16)
    ln_a = ln_prec(a, bits + 16)
    return ln_a * beta_pr / (a - 1)


def beta_from_theta(alpha: RealAlgebraic, theta, bits: int = 64) -> PrecisionReal:
    """Inverse map beta = theta * (alpha - 1) / ln(alpha)."""
    _require_alpha_gt_one(alpha)
    theta_pr = _as_precision(theta)
    a = alpha.refine(bits + 16)
    ln_a = ln_prec(a, bits + 16)
    return theta_pr * (a - 1) / ln_a


def dynamics_params(a, b, b_03, bits: int = 64) -> DynamicsParams:
    """c = sqrt(4b-1)/2, alpha_0 = exp(pi/c), beta_0 = (b_03 - a)(alpha_0 - 1).

    Inputs may be exact rationals or PrecisionReal enclosures (needed for
    parameters like b = (1 + pi^2)/4 that are not rational).
    """
    a = a if isinstance(a, PrecisionReal) else PrecisionReal.exact(Fraction(a))
    b = b if isinstance(b, PrecisionReal) else PrecisionReal.exact(Fraction(b))
    b_03 = (
        b_03 if isinstance(b_03, PrecisionReal) else PrecisionReal.exact(Fraction(b_03))
    )
    if not b.certainly_gt(Fraction(1, 4)):
        raise DomainError("b must exceed 1/4 (certified)")
    c = sqrt_prec(4 * b - 1, bits + 8) * Fraction(1, 2)
    alpha_0 = exp_prec(pi_prec(bits + 16) / c, bits + 8)
    beta_0 = (alpha_0 - 1) * (b_03 - a)
    if not c.certainly_gt(0) or not alpha_0.certainly_gt(1):
        raise DomainError("derived parameters failed certification (b too close to 1/4?)")
    return DynamicsParams(a=a, b=b, b_03=b_03, c=c, alpha_0=alpha_0, beta_0=beta_0)


def _f_arrays(seq: IntegerSequence, alpha: RealAlgebraic, tau_bits: int):
    """Residual floats for f_k = m_{k+1} - alpha*m_k via the fixed-point kernel."""
    if len(seq) < 2:
        raise DomainError("need at least two terms for residuals")
    coeffs = alpha.poly.coeffs
    if len(seq) < len(coeffs):
        raise DomainError("sequence shorter than the annihilator window")
    max_bits = max(abs(t).bit_length() for t in seq.terms)
    scale = max_bits + tau_bits + 2
    a_man = _kernels.alpha_mantissa(alpha, scale)
    floats, err, e_terms = _kernels.residual_batch(seq.terms, coeffs, a_man, scale)
    return floats, err, e_terms


def eta_arrays(
    seq: IntegerSequence, alpha: RealAlgebraic, theta: Theta, tau_bits: int = 40
):
    """Float arrays for eta_k = f_k + {(k+1)theta} - alpha*{k theta}.

    Returns (eta floats, uniform error, f floats, f error, e_terms).
    Shared by the residual front-end here and the combination operations
    downstream, so the error bookkeeping lives in exactly one place.
    """
    f_floats, f_err, e_terms = _f_arrays(seq, alpha, tau_bits)
    n = len(seq)
    batch = theta.frac_batch(seq.start_index, n, bits=max(60, tau_bits + 8))
    u = np.asarray(batch.floats(), dtype=np.float64)
    a_pr = alpha.refine(tau_bits + 8)
    a_f = float(a_pr.value)
    a_conv = abs(a_pr.value - Fraction(a_f))
    f_arr = np.asarray(f_floats, dtype=np.float64)
    eta = f_arr + u[1:] - a_f * u[:-1]
    # u in [0,1): theta-term error is (1 + alpha)*u_err + alpha rounding,
    # plus float evaluation slop on the three-term combination.
    alpha_up = a_pr.upper
    u_err = batch.float_error
    err = (
        f_err
        + (1 + alpha_up) * u_err
        + (a_pr.abs_error + a_conv)
        + (Fraction(float(np.max(np.abs(eta)))) + alpha_up + 2) * 4 * _kernels.FLOAT_REL
    )
    return eta, err, f_arr, f_err, e_terms


def residuals(
    seq: IntegerSequence,
    alpha: RealAlgebraic,
    kind: str = "f",
    beta=None,
    theta: Theta | None = None,
    tau_bits: int = 40,
) -> Sample:
    """Residual sample of the requested kind.

    kind "f":   f_k = m_{k+1} - alpha*m_k         (fast fixed-point kernel)
    kind "g":   g_k = n_{k+1} - alpha*n_k - beta*ln n_k   (needs beta)
    kind "eta": f_k + {(k+1)theta} - alpha*{k theta}      (needs theta)

    Lengths are len(seq) - 1; indices follow seq.start_index.
    """
    if kind not in RESIDUAL_KINDS:
        raise DomainError(f"unknown residual kind {kind!r}; expected one of {RESIDUAL_KINDS}")
    params = {"polynomial": str(alpha.poly)}
    if kind == "f":
        floats, err, _ = _f_arrays(seq, alpha, tau_bits)
        return Sample.from_floats("f", seq.start_index, floats, err, params)
    if kind == "eta":
        if theta is None:
            raise DomainError("eta residuals need theta")
        eta, err, _, _, _ = eta_arrays(seq, alpha, theta, tau_bits)
        params["theta"] = theta.describe()
        return Sample.from_floats("eta", seq.start_index, eta, err, params)
    if beta is None:
        raise DomainError("g residuals need beta")
    if any(t < 1 for t in seq.terms):
        raise DomainError("g residuals need positive terms (ln n_k)")
    beta_pr = _as_precision(beta)
    beta_is_zero = beta_pr.abs_error == 0 and beta_pr.value == 0
    values: list[PrecisionReal] = []
    for i in range(len(seq) - 1):
        nk = seq.terms[i]
        a = alpha.refine(tau_bits + nk.bit_length() + 1)
        v = PrecisionReal.exact(seq.terms[i + 1]) - a * nk
        if not beta_is_zero and nk > 1:
            v = v - ln_prec(PrecisionReal.exact(nk), tau_bits + 8) * beta_pr
        values.append(v)
    params["beta"] = str(beta_pr.value)
    return Sample.from_values("g", seq.start_index, values, params)
