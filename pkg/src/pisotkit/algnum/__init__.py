"""Certified algebraic-number arithmetic.

Submodules: integer polynomials (``poly``), validated rational-interval
arithmetic (``precision``), and root isolation plus Pisot
classification (``roots``).
"""

from .poly import IntPolynomial
from .precision import (
    DEFAULT_MAX_EXTRA_BITS,
    PrecisionReal,
    dyadic_fraction,
    escalate_until,
    escalation,
    exp_prec,
    frac_part,
    ln_prec,
    max_extra_bits,
    nearest_integer_distance,
    pi_prec,
    precision_budget,
    round_nearest,
    sqrt_lower,
    sqrt_prec,
    sqrt_upper,
)
from .roots import (
    PisotReport,
    RealAlgebraic,
    RootDisk,
    bits_for,
    classify_pisot,
    conjugate_moduli,
    isolate_real_roots,
    largest_real_root,
    power,
    power_walk,
    root_disks,
)

__all__ = [
    "DEFAULT_MAX_EXTRA_BITS",
    "IntPolynomial",
    "PisotReport",
    "PrecisionReal",
    "RealAlgebraic",
    "RootDisk",
    "bits_for",
    "classify_pisot",
    "conjugate_moduli",
    "dyadic_fraction",
    "escalate_until",
    "escalation",
    "exp_prec",
    "frac_part",
    "isolate_real_roots",
    "largest_real_root",
    "ln_prec",
    "max_extra_bits",
    "nearest_integer_distance",
    "pi_prec",
    "power",
    "power_walk",
    "precision_budget",
    "root_disks",
    "round_nearest",
    "sqrt_lower",
    "sqrt_prec",
    "sqrt_upper",
]
