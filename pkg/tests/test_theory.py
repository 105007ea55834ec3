import math

import numpy as np
import pytest

from oracles import G_mp, H_mp, Psi_mp, grid_argmin, restart_time_1d
from winrestart.dynamics import SystemParams
from winrestart.errors import DomainError, InvalidContraction
from winrestart.theory import (
    compute_bounds,
    constants_from,
    convergence_constants,
    eval_G,
    eval_H,
    eval_Psi,
    q_factor,
    q_of_tau,
    solve_tau,
    tau_upper_bound,
    upper_bound_objective,
)

P1 = SystemParams(3, 1, 20)
STIFF = SystemParams(3, 6, 909.1225)


def random_sets(n=50, seed=7):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        L = rng.uniform(1, 100)
        out.append((SystemParams(rng.uniform(0.5, 5), rng.uniform(0, 5), rng.uniform(0.5, 50)), L, L * rng.uniform(0.01, 1)))
    return out


@pytest.mark.parametrize("t", [0.1, 0.02, 0.25, 1.5])
def test_H_G_against_extended_precision(t):
    assert eval_H(t, P1, 1.0) == pytest.approx(float(H_mp(t, 3, 1, 20, 1)), abs=1e-12)
    assert eval_G(t, P1, 1.0) == pytest.approx(float(G_mp(t, 3, 1, 20, 1)), abs=1e-12)


def test_H_G_stiff_against_extended_precision():
    for t in (2e-6, 1e-4, 1e-3):
        assert eval_H(t, STIFF, 100) == pytest.approx(float(H_mp(t, 3, 6, 909.1225, 100)), abs=1e-10)
        assert eval_G(t, STIFF, 100) == pytest.approx(float(G_mp(t, 3, 6, 909.1225, 100)), abs=1e-10)


def test_Psi_against_extended_precision():
    tau2 = solve_tau(P1, 1.0)[1]
    t = 0.5 * tau2
    assert eval_Psi(t, P1, 1.0) == pytest.approx(float(Psi_mp(t, 3, 1, 20, 1)), abs=1e-12)


@pytest.mark.parametrize("params, L", [(P1, 1.0), (STIFF, 100.0)])
def test_limits_at_zero(params, L):
    # slopes at 0+ reach a few hundred on the rho=10 quadratic, so probe well below 1e-10
    for t in (1e-11, 1e-13, 1e-15):
        assert eval_H(t, params, L) == pytest.approx(1.0, abs=1e-8)
        assert eval_G(t, params, L) == pytest.approx(1.0, abs=1e-8)
        assert eval_Psi(t, params, L) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("t", [5e-7, 9.99e-7])
def test_series_branch_matches_extended_precision(t):
    assert eval_H(t, STIFF, 100) == pytest.approx(float(H_mp(t, 3, 6, 909.1225, 100)), abs=1e-13)
    assert eval_G(t, STIFF, 100) == pytest.approx(float(G_mp(t, 3, 6, 909.1225, 100)), abs=1e-13)


def test_series_branch_is_continuous():
    # the closed form loses ~1e-12 to cancellation just above the switch
    for f in (eval_H, eval_G):
        below = f(1e-6 * (1 - 1e-12), STIFF, 100)
        above = f(1e-6 * (1 + 1e-12), STIFF, 100)
        assert abs(below - above) < 1e-10


@pytest.mark.parametrize("params, L", [(STIFF, 100.0), (P1, 1.0), (SystemParams(3, 0, 3.25), 100.0)])
def test_strictly_decreasing_on_grid(params, L):
    tau1 = solve_tau(params, L)[0]
    ts = np.linspace(tau1 / 1000, tau1, 1000)
    H = np.array([eval_H(t, params, L) for t in ts])
    G = np.array([eval_G(t, params, L) for t in ts])
    assert np.all(np.diff(H) < 0)
    assert np.all(np.diff(G) < 0)


def test_Psi_domain():
    tau2 = solve_tau(P1, 1.0)[1]
    assert eval_Psi(tau2 - 1e-9, P1, 1.0) == pytest.approx(0.0, abs=1e-6)
    with pytest.raises(DomainError):
        eval_Psi(tau2 * 1.01, P1, 1.0)


def test_domain_errors():
    with pytest.raises(DomainError):
        eval_H(0.0, P1, 1.0)
    with pytest.raises(DomainError):
        eval_G(-1.0, P1, 1.0)
    with pytest.raises(DomainError):
        solve_tau(P1, 0.0)
    with pytest.raises(DomainError):
        tau_upper_bound(P1, 1.0, 0.0)


@pytest.mark.parametrize("params, L, mu", random_sets(50))
def test_roots_residuals_and_ordering(params, L, mu):
    tau1, tau2, tau3 = solve_tau(params, L)
    assert abs(eval_H(tau1, params, L)) <= 1e-10
    assert abs(eval_H(tau2, params, L) - 0.5) <= 1e-10
    assert abs(eval_G(tau3, params, L)) <= 1e-10
    assert tau3 < tau1
    assert tau2 < tau1


@pytest.mark.parametrize("params, L, mu", random_sets(50))
def test_Q_in_unit_interval(params, L, mu):
    b = compute_bounds(params, L, mu)
    assert 0 < b.Q < 1
    assert b.C == pytest.approx(1 / b.Q, rel=1e-15)
    assert b.C > 1 and b.K > 0
    assert b.tau3 <= b.tau_upper


def test_scaling_in_L():
    for params in (P1, STIFF):
        small = solve_tau(params, 1.0)
        big = solve_tau(params, 10.0)
        assert all(b < s for b, s in zip(big, small))


def test_1d_sandwich():
    b = compute_bounds(P1, 1.0, 1.0)
    T = restart_time_1d(3, 1, 20)
    assert b.tau3 <= T <= b.tau_upper


def test_reference_values_1d():
    # regression guard on the (3, 1, 20), L = mu = 1 case
    b = compute_bounds(P1, 1.0, 1.0)
    assert b.tau3 == pytest.approx(0.177234, abs=1e-6)
    assert b.tau_upper == pytest.approx(0.915301, abs=1e-6)
    assert b.Q == pytest.approx(0.908993, abs=1e-6)


@pytest.mark.parametrize("params, L, mu", [(P1, 1.0, 1.0), (STIFF, 100.0, 1.0), (SystemParams(3, 0, 3.25), 100.0, 1.0)])
def test_golden_section_against_dense_grid(params, L, mu):
    _, tau2, tau3 = solve_tau(params, L)
    hi = min(tau2 * (1 - 1e-12), tau3)
    _, grid_upper = grid_argmin(lambda t: upper_bound_objective(t, params, L, mu), 0.0, hi)
    _, upper = tau_upper_bound(params, L, mu)
    assert upper <= grid_upper + 1e-12
    assert upper == pytest.approx(grid_upper, rel=1e-8)
    _, grid_q = grid_argmin(lambda t: q_of_tau(t, params, L, mu), 0.0, hi)
    Q = q_factor(params, L, mu)
    assert Q <= grid_q + 1e-15
    assert Q == pytest.approx(grid_q, rel=1e-8, abs=1e-14)


def test_q_modes():
    assert q_factor(P1, 1.0, 1.0, mode="min") <= q_factor(P1, 1.0, 1.0, mode="tau3")
    with pytest.raises(ValueError):
        q_factor(P1, 1.0, 1.0, mode="bogus")


def test_T_hint_caps_search():
    tau3 = solve_tau(P1, 1.0)[2]
    tau_star, _ = tau_upper_bound(P1, 1.0, 1.0, T_hint=0.5 * tau3)
    assert tau_star <= 0.5 * tau3


def test_constants_from():
    C, K = constants_from(0.5, 1.0)
    assert C == 2.0
    assert K == pytest.approx(math.log(2), rel=1e-15)
    for bad in (0.0, 1.0, 1.5):
        with pytest.raises(InvalidContraction):
            constants_from(bad, 1.0)


def test_inconsistent_mu_is_rejected():
    # mu far above L makes the certified decrease exceed the whole gap
    with pytest.raises(InvalidContraction):
        q_factor(P1, 1.0, 1e6)


def test_convergence_constants_match_bounds():
    b = compute_bounds(STIFF, 100.0, 1.0)
    assert convergence_constants(STIFF, 100.0, 1.0) == (b.C, b.K)
    assert set(b.as_dict()) == {"tau1", "tau2", "tau3", "tau_star", "tau_upper", "Q", "C", "K"}
