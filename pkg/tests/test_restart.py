import numpy as np
import pytest

from oracles import restart_time_1d
from winrestart.dynamics import IntegratorOptions, SystemParams, Termination
from winrestart.errors import DomainError, NoProgress
from winrestart.objectives import PowerQuadraticSpec, gamma_for_oscillation, make_diagonal_quadratic, make_power_quadratic
from winrestart.restart import run_restarted, verify_cycle_contraction
from winrestart.theory import compute_bounds

QUAD = make_power_quadratic(PowerQuadraticSpec(3, 10.0))


@pytest.fixture(scope="module")
def stiff_run():
    p = SystemParams(3, 6, gamma_for_oscillation(3, 6, 10, 2, 10))
    return p, run_restarted(QUAD, p, np.ones(3), 0.5)


@pytest.fixture(scope="module")
def one_d_run():
    obj = make_diagonal_quadratic([1.0])
    p = SystemParams(3, 1, 20)
    return obj, p, run_restarted(obj, p, np.array([1.0]), 3.0)


def test_minimizer_gives_degenerate_trajectory():
    traj = run_restarted(QUAD, SystemParams(3, 6, 10), np.zeros(3), 5.0)
    assert traj.n_restarts == 0
    assert len(traj.segments) == 1
    assert traj.reason == "GradientBelowTol"
    assert np.all(traj.f_gap == 0)
    assert verify_cycle_contraction(traj).size == 0


def test_horizon_must_be_positive():
    with pytest.raises(DomainError):
        run_restarted(QUAD, SystemParams(3, 6, 10), np.ones(3), 0.0)


def test_1d_cycles_are_identical(one_d_run):
    # every 1-D cycle restarts from rest, so all intervals equal T(z)
    _, _, traj = one_d_run
    np.testing.assert_allclose(traj.intervals, restart_time_1d(3, 1, 20), atol=1e-6)


def test_restart_bookkeeping(stiff_run):
    _, traj = stiff_run
    assert traj.n_restarts > 10
    assert np.all(np.diff(traj.restart_times) > 0)
    assert np.all(traj.intervals > 0)
    np.testing.assert_allclose(np.cumsum(traj.intervals), traj.restart_times, rtol=1e-12)
    assert traj.restarted.sum() == traj.n_restarts
    np.testing.assert_allclose(traj.t[traj.restarted], traj.restart_times, rtol=1e-12)
    assert np.all(np.diff(traj.t) > 0)
    assert traj.t[-1] == pytest.approx(0.5)
    assert traj.reason == "Horizon"


def test_glue_continuity(stiff_run):
    _, traj = stiff_run
    for a, b in zip(traj.segments, traj.segments[1:]):
        assert a.termination is Termination.RESTART_FOUND
        np.testing.assert_array_equal(a.positions[-1], b.positions[0])
        assert np.all(b.velocities[0] == 0)


def test_global_monotonicity(stiff_run):
    _, traj = stiff_run
    assert np.max(np.diff(traj.f_gap)) <= 1e-9 * traj.f_gap[0]


def test_sandwich_and_contraction(stiff_run):
    p, traj = stiff_run
    b = compute_bounds(p, QUAD.L, QUAD.mu)
    full = traj.intervals
    assert np.all(full >= b.tau3 - 1e-7)
    assert np.all(full <= b.tau_upper + 1e-7)
    ratios = verify_cycle_contraction(traj, QUAD)
    assert ratios.size == traj.n_restarts
    assert np.all(ratios < 1)
    assert np.all(ratios <= b.Q)


def test_1d_contraction_against_Q(one_d_run):
    obj, p, traj = one_d_run
    Q = compute_bounds(p, obj.L, obj.mu).Q
    ratios = verify_cycle_contraction(traj)
    assert ratios.size > 0
    assert np.all(ratios <= Q)


def test_deterministic(stiff_run):
    p, traj = stiff_run
    again = run_restarted(QUAD, p, np.ones(3), 0.5)
    np.testing.assert_array_equal(again.t, traj.t)
    np.testing.assert_array_equal(again.f_gap, traj.f_gap)


def test_samples_triples(stiff_run):
    _, traj = stiff_run
    s = traj.samples()
    assert len(s) == traj.t.size
    assert s[0] == (0.0, traj.f_gap[0], 0.0)


def test_restart_gaps_strictly_decrease(stiff_run):
    _, traj = stiff_run
    assert np.all(np.diff(traj.restart_gaps) < 0)


def test_no_progress_raised_at_floor():
    # f_star = -1 hides a 1e-40 decrease below float64 resolution
    obj = make_diagonal_quadratic([1.0])
    obj = type(obj)(**{**obj.__dict__, "f_star": -1.0})
    opts = IntegratorOptions(gradient_stop_tol=0.0)
    with pytest.raises(NoProgress) as info:
        run_restarted(obj, SystemParams(3, 1, 20), np.array([1e-20]), 5.0, opts)
    assert info.value.trajectory.n_restarts >= 2


def test_max_time_reason():
    obj = make_diagonal_quadratic([1.0])
    opts = IntegratorOptions(h_ode=1e-3, event_tolerance=1e-6, max_time=0.1)
    traj = run_restarted(obj, SystemParams(3, 1, 1), np.array([1.0]), 5.0, opts)
    assert traj.reason == "MaxTimeReached"
    assert traj.n_restarts == 0
