"""Throwaway full-surface smoke run (not part of the test suite)."""
import time
from fractions import Fraction
t_all = time.perf_counter()
import numpy as np

from pisotkit.algnum import (IntPolynomial, PrecisionReal, classify_pisot, largest_real_root,
                             power, power_walk, nearest_integer_distance, pi_prec, exp_prec)
from pisotkit.theta import Theta
from pisotkit import seqgen, annihilate as A, measures, density
from pisotkit.experiments import ExperimentConfig, verify_main_theorem

assert classify_pisot(IntPolynomial.parse('x^2-x-1')).is_pisot
assert classify_pisot(IntPolynomial.parse('x^3-x-1')).is_pisot
assert not classify_pisot(IntPolynomial.parse('x^2-2')).is_pisot
r = classify_pisot(IntPolynomial.parse('2x-3'))
assert not r.is_pisot and 'algebraic integer' in r.reason

phi = largest_real_root(IntPolynomial.parse('x^2-x-1'))
d = nearest_integer_distance(power(phi, 50, Fraction(1, 1 << 80)))
assert d.upper < Fraction(1, 10**10), float(d.upper)

walk = power_walk(phi, 3000, Fraction(1, 1 << 60))
F = [0, 1]
for _ in range(3001):
    F.append(F[-1] + F[-2])
pr = phi.refine(Fraction(1, 1 << 4400))
for k in (1, 100, 2999):
    exact = F[k] * pr.value + F[k - 1]
    slack = F[k] * pr.abs_error
    assert abs(walk[k].value - exact) <= walk[k].abs_error + slack, k

p = IntPolynomial.parse('x^2-x-1')
lucas = seqgen.recurrence_sequence(p, [1, 3], k_max=400, start_index=1)
assert lucas.terms[:7] == (1, 3, 4, 7, 11, 18, 29)
fib = seqgen.recurrence_sequence(p, [1, 1], k_max=10, start_index=1)
assert fib.terms == (1, 1, 2, 3, 5, 8, 13, 21, 34, 55)
rp = seqgen.rounded_power_sequence(phi, Fraction(1), (0, 7))
assert rp.terms == (1, 2, 3, 4, 7, 11, 18, 29), rp.terms

pi = pi_prec(200)
b = (pi * pi + 1) * Fraction(1, 4)
dp = seqgen.dynamics_params(a=Fraction(0), b=b, b_03=Fraction(1), bits=200)
e2 = exp_prec(PrecisionReal.exact(2), 200)
assert abs(dp.alpha_0.value - e2.value) <= dp.alpha_0.abs_error + e2.abs_error + Fraction(1, 1 << 150)
assert abs(dp.beta_0.value - (e2.value - 1)) <= dp.beta_0.abs_error + e2.abs_error + Fraction(1, 1 << 150)
dp2 = seqgen.dynamics_params(a=Fraction(0), b=Fraction(1, 2), b_03=Fraction(0), bits=200)
assert abs(float(dp2.alpha_0.value) - 535.4916555247646) < 1e-9, float(dp2.alpha_0.value)
assert dp2.beta_0.value == 0
dp3 = seqgen.dynamics_params(a=Fraction(2, 5), b=Fraction(1, 2), b_03=Fraction(2, 5), bits=120)
assert dp3.beta_0.value == 0

th13 = Theta.rational(Fraction(1, 3))
eta = A.eta_sequence(lucas, phi, th13, tau_bits=50)
rep = measures.detect_cycle(eta.floats()[100:], ell_max=12, tol=1e-6)
assert rep.found and rep.period == 3, (rep.found, rep.period)

e = A.e_sequence(lucas, p)
teta = A.tilde_eta(eta, p)
c = A.c_batch(p, phi, th13, k_start=1, count=300)
lhs = teta.floats()[:290]
alpha_f = float(phi.refine(80).value)
earr = np.array(e.e_terms, dtype=float)
rhs = earr[1:291] - alpha_f * earr[:290] + c.floats()[:290]
assert np.max(np.abs(lhs - rhs)) < 1e-9

g1 = A.g_eval(Fraction(1, 3), p, phi, th13, bits=60)
c1 = A.c_direct(1, p, phi, th13, bits=60)
assert abs(g1.value - c1.value) <= g1.abs_error + c1.abs_error + Fraction(1, 1 << 40)

th_s3 = Theta.parse('alg:x^2+2x-2:0,1')  # sqrt(3)-1
p3 = IntPolynomial.parse('x^3-x-1')
gam = A.gamma(1, largest_real_root(p3), th_s3, (1, 520))
gt = A.tilde_gamma(gam, p3)
cf = A.tilde_gamma_closed(500, p3, th_s3)
v = gt.value_at(500)
assert abs(v.value - cf.value) <= v.abs_error + cf.abs_error + Fraction(1, 1 << 40)
assert v.abs_error + cf.abs_error < Fraction(1, 1 << 41), float(v.abs_error + cf.abs_error)

eq = (np.arange(4096) + 0.5) / 4096
assert measures.star_discrepancy(eq) == 1 / (2 * 4096)
ks_arr = np.mod(np.arange(1, 10001) * (2**0.5 - 1), 1.0)
assert measures.star_discrepancy(ks_arr) < 0.01
assert measures.weyl_sum(np.mod(np.arange(1, 10001) * ((1 + 5**0.5) / 2), 1.0), 1) < 0.01

th_s2 = Theta.parse('alg:x^2+2x-1:0,1')
spec_d = density.predicted_density(p, phi, th_s2, bits=60)
assert abs(spec_d.total_mass.value - 1) < Fraction(1, 10**12)
c_big = A.c_batch(p, phi, th_s2, k_start=1, count=4000)
repd = density.density_report(p, phi, th_s2, c_big)
assert repd.ks < 0.02, repd.ks
assert repd.outside_mass < 0.001, repd.outside_mass

cfg = ExperimentConfig(polynomial='x^2-x-1', theta='1/3',
                       generator={'kind': 'recurrence', 'initial_terms': [1, 3], 'start_index': 1}, n=400)
v1 = verify_main_theorem(cfg)
assert v1.verdict == 'CONSISTENT_WITH_THEOREM' and v1.cycle_report.period == 3

cfg2 = ExperimentConfig(polynomial='x^2-x-1', theta='alg:x^2+2x-1:0,1',
                        generator={'kind': 'recurrence', 'initial_terms': [1, 3], 'start_index': 1}, n=3000)
v2 = verify_main_theorem(cfg2)
assert v2.verdict == 'CONSISTENT_WITH_THEOREM' and not v2.cycle_report.found, v2.diagnostics

cfg3 = ExperimentConfig(polynomial='x^2-x-1', theta='1/3',
                        generator={'kind': 'explicit', 'terms': list(range(1, 200))}, n=199)
v3 = verify_main_theorem(cfg3)
assert v3.verdict == 'INCONCLUSIVE' and 'hypothesis' in ' '.join(v3.diagnostics).lower()

cfg4 = ExperimentConfig(polynomial='x^2-x-1', theta={'kind': 'decimal', 'value': '0.333333', 'abs_error': '1e-6'},
                        generator={'kind': 'recurrence', 'initial_terms': [1, 3], 'start_index': 1}, n=400)
v4 = verify_main_theorem(cfg4)
assert v4.verdict == 'INCONCLUSIVE'

print(f"ALL OK  ({time.perf_counter() - t_all:.2f}s)")
