"""
Bounds on restart times and the linear rate
===========================================

``tau3`` bounds every restart time from below, ``tau_upper`` from above, and
each cycle shrinks the gap by at least ``Q``. Together they give
``f - f* <= C exp(-K t) (f(z) - f*)``.
"""

from winrestart import SystemParams, compute_bounds, gamma_for_oscillation

b = compute_bounds(SystemParams(3.0, 1.0, 20.0), L=1.0, mu=1.0)
for name, value in b.as_dict().items():
    print(f"{name:>9s} = {value:.10g}")

# On the ill-conditioned test quadratic (L = 100, mu = 1) the certified
# contraction per cycle is tiny, so K is small even though restarts are fast.
gamma = gamma_for_oscillation(3.0, 6.0, 10.0, 2, 0.1)
b = compute_bounds(SystemParams(3.0, 6.0, gamma), L=100.0, mu=1.0)
print(f"\ngamma = {gamma:g}: tau3 = {b.tau3:.4g}, tau_upper = {b.tau_upper:.4g}, Q = {b.Q:.8f}, K = {b.K:.3g}")
