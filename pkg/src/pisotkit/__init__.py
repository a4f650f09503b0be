"""Certified numerics for Pisot numbers, annihilated integer sequences,
and equidistribution experiments.

The package splits into:

* ``algnum``: integer polynomials, validated real arithmetic, root
  isolation, conjugate moduli, Pisot classification;
* ``theta``: exact/certified handling of the shift parameter and its
  fractional multiples;
* ``seqgen``: integer sequence generators and residual diagnostics;
* ``annihilate``: the annihilation identities tying sequences to their
  polynomial window sums;
* ``measures``: empirical measures, cycle detection, discrepancy;
* ``density``: the closed-form limiting density and its CDF;
* ``experiments``/``cli``: orchestration, verdicts, and the command line.
"""

from .algnum import (
    IntPolynomial,
    PisotReport,
    PrecisionReal,
    RealAlgebraic,
    classify_pisot,
    conjugate_moduli,
    isolate_real_roots,
    largest_real_root,
    power,
    power_walk,
    precision_budget,
)
from .errors import (
    BoundaryAmbiguous,
    DegenerateTheta,
    DomainError,
    Inconclusive,
    InsufficientData,
    NonMonicRecurrence,
    NotIncreasing,
    NotSquarefree,
    OutOfRange,
    PisotkitError,
    PrecisionExhausted,
)
from .experiments import ExperimentConfig, VerdictRecord, curated_suite, spectrum_scan, verify_main_theorem
from .samples import Sample
from .seqgen import IntegerSequence
from .theta import Theta

__version__ = "0.1.0"

__all__ = [
    "BoundaryAmbiguous",
    "DegenerateTheta",
    "DomainError",
    "ExperimentConfig",
    "Inconclusive",
    "InsufficientData",
    "IntPolynomial",
    "IntegerSequence",
    "NonMonicRecurrence",
    "NotIncreasing",
    "NotSquarefree",
    "OutOfRange",
    "PisotReport",
    "PisotkitError",
    "PrecisionExhausted",
    "PrecisionReal",
    "RealAlgebraic",
    "Sample",
    "Theta",
    "VerdictRecord",
    "classify_pisot",
    "conjugate_moduli",
    "curated_suite",
    "isolate_real_roots",
    "largest_real_root",
    "power",
    "power_walk",
    "precision_budget",
    "spectrum_scan",
    "verify_main_theorem",
]
