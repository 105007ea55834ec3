"""Speed-restarted inertial dynamics with Hessian-driven damping.

The package integrates ``x'' + alpha x' + beta Hess f(x) x' + gamma grad f(x) = 0``
with speed restarts, evaluates the closed-form bounds on restart times and
linear rates, and runs the matching discrete inertial gradient algorithm.
"""

from .analysis import (
    IntervalStats,
    PlotStyle,
    RegressionFit,
    emit_plot,
    export_csv,
    fit_exponential,
    fit_trajectory,
    interval_stats,
    read_csv,
)
from .discrete import DiscreteConfig, IterateRecord, RestartPolicy, algorithm_step, run_algorithm
from .dynamics import (
    IntegratorOptions,
    PhaseState,
    SegmentResult,
    SystemParams,
    Termination,
    integrate_trajectory,
    integrate_until_restart,
    speed_derivative,
    win_vector_field,
)
from .objectives import (
    Objective,
    PowerQuadraticSpec,
    finite_difference_hvp,
    gamma_for_oscillation,
    make_diagonal_quadratic,
    make_power_quadratic,
)
from .restart import RestartedTrajectory, run_restarted, verify_cycle_contraction
from .theory import (
    TheoreticalBounds,
    compute_bounds,
    convergence_constants,
    eval_G,
    eval_H,
    eval_Psi,
    q_factor,
    solve_tau,
    tau_upper_bound,
)

__version__ = "0.1.0"
