"""
Restart policies for the discrete algorithm
===========================================

The same quadratic, now with the inertial gradient algorithm at ``h = 1e-3``.
Speed restarts beat running without restarts; the warm start adds one
function-value restart at the beginning.
"""

from pathlib import Path

import numpy as np

from winrestart import (
    DiscreteConfig,
    PlotStyle,
    PowerQuadraticSpec,
    RestartPolicy,
    SystemParams,
    emit_plot,
    fit_exponential,
    gamma_for_oscillation,
    make_power_quadratic,
    run_algorithm,
)

obj = make_power_quadratic(PowerQuadraticSpec(n=3, rho=10.0))
params = SystemParams(3.0, 6.0, gamma_for_oscillation(3.0, 6.0, 10.0, 2, 0.1))

curves = {}
for policy in RestartPolicy:
    recs = run_algorithm(obj, DiscreteConfig(params, h=1e-3, max_iters=3000, restart_policy=policy), np.ones(3))
    gaps = np.array([r.f_gap for r in recs])
    fit = fit_exponential(np.arange(gaps.size, dtype=float), gaps)
    n_restarts = sum(r.restarted for r in recs)
    print(f"{policy.value:>10s}: {n_restarts:3d} restarts, B = {fit.B:.4g}, final gap = {gaps[-1]:.3g}")
    curves[policy.value] = [(r.k, r.f_gap) for r in recs]

out = Path("demo_output")
out.mkdir(exist_ok=True)
emit_plot(curves, out / "discrete_policies.svg", PlotStyle(title="eps=0.1", xlabel="k"))
