"""
Speed restart time of a damped oscillator
=========================================

For ``f(x) = x^2/2`` the system reduces to ``x'' + (alpha+beta) x' + gamma x = 0``
and the first time the speed stops growing has a closed form. The integrator
finds it by bisection inside one step.
"""

import math

import numpy as np

from winrestart import SystemParams, integrate_until_restart, make_diagonal_quadratic

obj = make_diagonal_quadratic([1.0])

# under-damped: (2/sqrt(D)) atan(sqrt(D)/c), with c = alpha + beta and D = 4 gamma - c^2
seg = integrate_until_restart(obj, SystemParams(3.0, 1.0, 20.0), np.array([1.0]))
print("under-damped  T =", seg.restart_time, " exact =", 0.25 * math.atan(2.0))

# over-damped: the two real roots k+ > k- give ln(k-/k+)/sqrt(c^2 - 4 gamma)
seg = integrate_until_restart(obj, SystemParams(3.0, 1.0, 1.0), np.array([1.0]))
kp, km = -2 + math.sqrt(3), -2 - math.sqrt(3)
print("over-damped   T =", seg.restart_time, " exact =", math.log(km / kp) / math.sqrt(12))

# the speed grows up to the restart and the energy never increases
print("speeds monotone:", bool(np.all(np.diff(seg.speeds[:-1]) >= 0)))
print("bisection steps:", seg.bisection_iterations)
