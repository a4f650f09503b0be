"""Fixed-point big-integer batch kernels.

The residual f_k = m_{k+1} - alpha*m_k over a long sequence is the hot
path: terms of m grow like alpha^k, so at k near 10^5 each term holds
tens of thousands of bits.  Computing alpha*m_k per term would cost a
large multiplication each; instead, with A = round(alpha * 2^P), the
products t_k = A*m_k satisfy the exact integer identity

    a_d * t_{k+d} = A*e_k - sum_{s<d} a_s * t_{k+s},
    e_k = sum_s a_s m_{k+s},

for any integer sequence m (both sides equal a_d * A * m_{k+d}).  The
window sums e_k are cheap exact integers, so the whole trajectory of
t_k advances by small-coefficient multiplies and additions: linear cost
per term instead of a big multiplication, with zero error accumulation
because every operation is exact.  The only approximation is the fixed
mantissa A itself: |f_k - (m_{k+1} - t_k*2^-P)| <= |m_k| * 2^-P.

The walk additionally keeps every t_k reduced mod 2^M.  The quantity
actually read out, f_scaled = m_{k+1}*2^P - t_k, is bounded by
2^P*(|f_k| + 1), so once M exceeds P plus a proven bound on the bit
length of sup|f_k| the centered residue mod 2^M recovers f_scaled
exactly.  The bound comes from a float preview of m_{k+1} - alpha*m_k
run over 53-bit mantissa views of the terms, with the preview's own
rounding slack added in, so reduction never silently aliases: a
sequence with genuinely huge residuals just gets a wide M and the walk
degrades to the exact behavior.
"""

from __future__ import annotations

import math
from fractions import Fraction

try:
    from gmpy2 import mpz as _mpz
except ImportError:  # pragma: no cover
    _mpz = int

from .algnum import RealAlgebraic

FLOAT_REL = Fraction(1, 1 << 52)


def scaled_to_float(man, scale_bits: int) -> float:
    """man * 2**-scale_bits as a float; relative error <= 2**-52.

    Works on int and mpz alike; only the top 64 bits are extracted, so
    the cost stays flat however wide the mantissa is.
    """
    if not man:
        return 0.0
    # bit_length ignores sign and a floor shift keeps the magnitude
    # within one last-place unit, so no negation pass is needed.
    shift = man.bit_length() - 64
    if shift > 0:
        man >>= shift
    else:
        shift = 0
    return math.ldexp(float(man), shift - scale_bits)


def alpha_mantissa(alpha: RealAlgebraic, scale_bits: int) -> int:
    """A with |alpha - A * 2**-scale_bits| <= 2**-scale_bits."""
    approx = alpha.refine(Fraction(1, 1 << (scale_bits + 2)))
    return round(approx.value * (1 << scale_bits))


def annihilated_terms(terms, coeffs) -> list[int]:
    """Exact window sums e_k = sum_s coeffs[s] * terms[k+s].

    Unrolled through degree 4: the sums run over every bit of every
    term, so shaving the per-window interpreter overhead matters on
    long runs.
    """
    d = len(coeffs) - 1
    if d == 1:
        c0, c1 = coeffs
        return [c0 * a + c1 * b for a, b in zip(terms, terms[1:])]
    if d == 2:
        c0, c1, c2 = coeffs
        return [c0 * a + c1 * b + c2 * c for a, b, c in zip(terms, terms[1:], terms[2:])]
    if d == 3:
        c0, c1, c2, c3 = coeffs
        return [
            c0 * a + c1 * b + c2 * c + c3 * e
            for a, b, c, e in zip(terms, terms[1:], terms[2:], terms[3:])
        ]
    if d == 4:
        c0, c1, c2, c3, c4 = coeffs
        return [
            c0 * a + c1 * b + c2 * c + c3 * e + c4 * f
            for a, b, c, e, f in zip(terms, terms[1:], terms[2:], terms[3:], terms[4:])
        ]
    n = len(terms)
    return [
        sum(coeffs[s] * terms[k + s] for s in range(d + 1)) for k in range(n - d)
    ]


def _residual_bits_bound(terms, alpha_f: float) -> int:
    """Proven bound on bit_length(sup_k |m_{k+1} - alpha*m_k| + 1).

    Works on 53-bit mantissa views (man, exp) of the terms; the slack
    term covers both mantissa truncation and the error in alpha_f, so
    the returned exponent can only overestimate.
    """
    n = len(terms)
    mans: list[float] = []
    exps: list[int] = []
    for t in terms:
        a = -t if t < 0 else t
        bl = a.bit_length()
        if bl <= 53:
            mans.append(float(t))
            exps.append(0)
        else:
            man = float(a >> (bl - 53))
            mans.append(-man if t < 0 else man)
            exps.append(bl - 53)
    alpha_bits = max(1, math.frexp(alpha_f)[1])
    worst = 1
    for k in range(n - 1):
        e0, e1 = exps[k], exps[k + 1]
        base = e0 if e0 < e1 else e1
        d0, d1 = e0 - base, e1 - base
        if d0 <= 64 and d1 <= 64:
            g = mans[k + 1] * float(1 << d1) - alpha_f * mans[k] * float(1 << d0)
            slack = (
                abs(mans[k + 1]) * float(1 << d1)
                + (alpha_f + 1.0) * abs(mans[k]) * float(1 << d0)
            ) * 2.0**-47
            bound = abs(g) + slack + 2.0
            if math.isfinite(bound):
                fb = base + math.frexp(bound)[1]
                if fb > worst:
                    worst = fb
                continue
        # Wildly jumping magnitudes: fall back to the coarse bound
        # |f| <= |m_{k+1}| + (alpha+1)|m_k|.
        fb = max(exps[k + 1] + 55, exps[k] + 55 + alpha_bits)
        if fb > worst:
            worst = fb
    return worst


def residual_batch(
    terms, coeffs, alpha_man: int, scale_bits: int, e_terms=None
) -> tuple[list[float], Fraction, list[int]]:
    """All residuals f_k = m_{k+1} - alpha*m_k as floats, plus e_k.

    Returns (floats, abs_error, e_terms) where abs_error is a uniform
    bound covering both the fixed-point mantissa truncation and the
    final float conversion.  Requires len(terms) >= degree + 1.  Pass a
    precomputed ``e_terms`` to skip the window-sum pass.
    """
    d = len(coeffs) - 1
    a_d = coeffs[-1]
    n = len(terms)
    if n < d + 1:
        raise ValueError("need at least degree+1 terms")
    if e_terms is None:
        e_terms = annihilated_terms(terms, coeffs)
    max_bits = max((-t if t < 0 else t).bit_length() for t in terms)

    alpha_f = scaled_to_float(alpha_man, scale_bits)
    mod_bits = scale_bits + _residual_bits_bound(terms, alpha_f) + 8
    # No point masking once the modulus exceeds every exact t_k, and
    # the exact division below only commutes with reduction mod 2^M
    # for unit leading coefficients.
    exact_bits = scale_bits + max_bits + 2
    masking = mod_bits < exact_bits and abs(a_d) == 1
    mask = _mpz((1 << mod_bits) - 1) if masking else None
    low_mask = (1 << (mod_bits - scale_bits)) - 1
    half = _mpz(1) << (mod_bits - 1)
    wrap = _mpz(1) << mod_bits

    big_a = _mpz(alpha_man)
    ae_cache: dict[int, object] = {}

    def a_times_e(e: int):
        cached = ae_cache.get(e)
        if cached is None:
            cached = big_a * e
            if masking:
                cached &= mask
            if len(ae_cache) < 1024:
                ae_cache[e] = cached
        return cached

    # num = A*e_k - sum_s a_s t_{k+s} over s < d: dispatch the +-1
    # window coefficients to plain adds, one allocation pass cheaper
    # per term than a multiply.
    add_s = []
    sub_s = []
    gen_ops = []
    for s, c in enumerate(coeffs[:d]):
        if c == -1:
            add_s.append(s)
        elif c == 1:
            sub_s.append(s)
        elif c:
            gen_ops.append((s, _mpz(-c)))

    if masking:
        window = [(big_a * _mpz(terms[i])) & mask for i in range(d)]
    else:
        window = [big_a * _mpz(terms[i]) for i in range(d)]
    floats: list[float] = []
    emit = floats.append
    flip = a_d < 0
    exact_div = abs(a_d) != 1
    last_advance = n - 2 - d
    for k in range(n - 1):
        if masking:
            f_scaled = ((terms[k + 1] & low_mask) << scale_bits) - window[0]
            # Centered residue mod 2^M; the raw value sits in
            # (-2^M, 2^M) already, so one conditional wrap suffices.
            if f_scaled >= half:
                f_scaled -= wrap
            elif f_scaled < -half:
                f_scaled += wrap
        else:
            f_scaled = (_mpz(terms[k + 1]) << scale_bits) - window[0]
        emit(scaled_to_float(f_scaled, scale_bits))
        if k <= last_advance:
            num = a_times_e(e_terms[k])
            for s in add_s:
                num += window[s]
            for s in sub_s:
                num -= window[s]
            for s, c in gen_ops:
                num += c * window[s]
            if exact_div:
                num, rem = divmod(num, a_d)
                if rem != 0:
                    raise AssertionError("inexact advance in residual kernel")
            elif flip:
                num = -num
            if masking:
                num &= mask
            window.pop(0)
            window.append(num)
        else:
            # Tail: t_{k+d} is never used, but window[0] must stay t_{k+1}.
            window.pop(0)
    max_abs_f = max(map(abs, floats))
    fixed_err = Fraction(1 << max_bits, 1 << scale_bits)
    conv_err = (Fraction(max_abs_f) + fixed_err + Fraction(1, 1 << 40)) * 2 * FLOAT_REL
    return floats, fixed_err + conv_err, e_terms
