"""
A restarted trajectory on an ill-conditioned quadratic
======================================================

Glue cycles together, resetting the velocity each time the speed stops
growing, then fit ``A exp(-B t)`` to the gap and draw it next to the
non-restarted solution.
"""

from pathlib import Path

import numpy as np

from winrestart import (
    PlotStyle,
    PowerQuadraticSpec,
    SystemParams,
    compute_bounds,
    emit_plot,
    fit_trajectory,
    gamma_for_oscillation,
    integrate_trajectory,
    interval_stats,
    make_power_quadratic,
    run_restarted,
)

obj = make_power_quadratic(PowerQuadraticSpec(n=3, rho=10.0))
params = SystemParams(3.0, 6.0, gamma_for_oscillation(3.0, 6.0, 10.0, 2, 0.1))
z = np.ones(3)

traj = run_restarted(obj, params, z, horizon=5.0)
fit = fit_trajectory(traj)
st = interval_stats(traj.intervals)
print(f"{traj.n_restarts} restarts, run ended by {traj.reason}")
print(f"A = {fit.A:.4g}, B = {fit.B:.4g}, r^2 = {fit.r_squared:.4f}")
print(f"interval mean = {st.mean:.4g}, variance = {st.variance:.3g}")

plain = integrate_trajectory(obj, params, z, 5.0)
b = compute_bounds(params, obj.L, obj.mu)
out = Path("demo_output")
out.mkdir(exist_ok=True)
emit_plot(
    {"restart": list(zip(traj.t, traj.f_gap)), "no restart": list(zip(plain.times, plain.values))},
    out / "restarted_trajectory.svg",
    PlotStyle(title="beta=6, eps=0.1", envelope=(b.C, b.K, float(traj.f_gap[0])), restart_times=traj.restart_times),
)
print("wrote", out / "restarted_trajectory.svg")
