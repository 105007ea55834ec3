"""Closed-form restart-time bounds and linear-rate constants.

Everything here depends only on ``(alpha, beta, gamma)`` and on the
constants ``L`` (gradient Lipschitz) and ``mu`` (Polyak-Lojasiewicz) of the
objective, never on the initial point.

``H`` and ``G`` decrease from 1 at ``t = 0+`` to ``-inf``. Their level
crossings give

* ``tau1``: ``H(tau1) = 0``
* ``tau2``: ``H(tau2) = 1/2``
* ``tau3``: ``G(tau3) = 0``; every restart time is at least ``tau3``.

With ``Psi(tau) = (2 - 1/H(tau))**2`` the restart time is at most
``tau + alpha / (2 mu gamma (1 - exp(-alpha tau))**2 Psi(tau))`` for any
admissible ``tau``, and each cycle shrinks the gap by a factor ``Q``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

from ._scalar import bisect_decreasing, bracket_down_crossing, golden_section_min
from .dynamics import SystemParams
from .errors import DomainError, InvalidContraction

SERIES_T = 1e-6
_EXP_MAX = 700.0


def _check_L(L):
    if not L > 0:
        raise DomainError(f"L must be > 0, got {L!r}")


def eval_H(t: float, params: SystemParams, L: float) -> float:
    """``1 + 2 L gamma/alpha^2 - L beta/alpha - L t (gamma/alpha e^{at} + gamma/alpha - beta)/(e^{at} - 1)``."""
    if not t > 0:
        raise DomainError("H is evaluated for t > 0")
    _check_L(L)
    al, be, ga = params.alpha, params.beta, params.gamma
    u = al * t
    a = ga / al**2
    c = be / al
    if t < SERIES_T:
        u2 = u * u
        return 1.0 - L * (a * (u2 / 6 - u2 * u2 / 360) + c * (u / 2 - u2 / 12 + u2 * u2 / 720))
    if u < 1.0:
        frac = (ga / al * math.exp(u) + ga / al - be) / math.expm1(u)
    else:
        em = math.exp(-u)
        frac = (ga / al + (ga / al - be) * em) / (-math.expm1(-u))
    return 1.0 + 2 * L * a - L * c - L * t * frac


def eval_G(t: float, params: SystemParams, L: float) -> float:
    """Lower-bound function whose zero ``tau3`` bounds every restart time from below."""
    if not t > 0:
        raise DomainError("G is evaluated for t > 0")
    _check_L(L)
    al, be, ga = params.alpha, params.beta, params.gamma
    u = al * t
    a = ga / al**2
    c = be / al
    if t < SERIES_T:
        u2 = u * u
        return 1.0 - L * (
            a * (2 * u2 / 3 + u2 * u / 2 + 37 * u2 * u2 / 180)
            + c * (3 * u / 2 + 11 * u2 / 12 + u2 * u / 3 + 61 * u2 * u2 / 720)
        )
    if u > _EXP_MAX:
        return -math.inf
    eu = math.exp(u)
    frac = (ga / al * eu + ga / al - be) / math.expm1(u)
    return (
        1.0
        - L * t * eu * frac
        + 3 * L * a * eu
        - 2 * L * c * eu
        - L * a
        + L * c
        - L * ga / al * t * eu
    )


def eval_Psi(tau: float, params: SystemParams, L: float) -> float:
    """``(2 - 1/H(tau))**2``, defined for ``0 < tau < tau2``."""
    H = eval_H(tau, params, L)
    if not H > 0.5:
        raise DomainError(f"Psi needs tau < tau2 (H(tau)={H:.6g} <= 1/2)")
    return (2.0 - 1.0 / H) ** 2


def solve_tau(params: SystemParams, L: float, max_iter: int = 200) -> Tuple[float, float, float]:
    """Return ``(tau1, tau2, tau3)``.

    Each root is bracketed by doubling from ``t = 1e-8`` and refined by
    bisection to a relative width of ``1e-12``.

    Raises
    ------
    BracketFailure
        If a function stays above its level up to ``t = 1e3``.
    """
    _check_L(L)
    H = lambda t: eval_H(t, params, L)  # noqa: E731
    G = lambda t: eval_G(t, params, L)  # noqa: E731
    tau1, _ = bisect_decreasing(H, 0.0, *bracket_down_crossing(H, 0.0), max_iter=max_iter)
    tau2, _ = bisect_decreasing(H, 0.5, *bracket_down_crossing(H, 0.5), max_iter=max_iter)
    tau3, _ = bisect_decreasing(G, 0.0, *bracket_down_crossing(G, 0.0), max_iter=max_iter)
    return tau1, tau2, tau3


def upper_bound_objective(tau: float, params: SystemParams, L: float, mu: float) -> float:
    """``tau + alpha / (2 mu gamma (1 - e^{-alpha tau})^2 Psi(tau))``."""
    denom = 2 * mu * params.gamma * math.expm1(-params.alpha * tau) ** 2 * eval_Psi(tau, params, L)
    if denom <= 0:
        return math.inf
    return tau + params.alpha / denom


def _feasible_cap(params, L, cap):
    _, tau2, tau3 = solve_tau(params, L)
    hi = min(tau2, tau3 if cap is None else cap)
    if not hi > 0:
        raise DomainError("empty search interval for tau")
    # Psi vanishes at tau2 itself; stay strictly inside.
    at_tau2 = hi >= tau2
    if at_tau2:
        hi = tau2 * (1 - 1e-12)
    return hi, at_tau2


def tau_upper_bound(params: SystemParams, L: float, mu: float, T_hint: Optional[float] = None, tol: float = 1e-10) -> Tuple[float, float]:
    """Minimise the restart-time upper bound over ``(0, min(tau2, cap)]``.

    ``cap`` is ``T_hint`` when given, otherwise ``tau3``, which is a lower
    bound for the restart time from every starting point and therefore keeps
    the result independent of it.

    Returns
    -------
    tau_star : float
        The minimiser.
    tau_upper : float
        The bound itself.
    """
    if not mu > 0:
        raise DomainError(f"mu must be > 0, got {mu!r}")
    hi, at_tau2 = _feasible_cap(params, L, T_hint)
    phi = lambda tau: upper_bound_objective(tau, params, L, mu)  # noqa: E731
    x, fx = golden_section_min(phi, 0.0, hi, tol=tol)
    if not at_tau2:
        f_hi = phi(hi)
        if f_hi <= fx:
            x, fx = hi, f_hi
    return x, fx


def _decrease_bracket(tau, alpha):
    # tau + (2/a) e^{-a tau} - (1/2a) e^{-2 a tau} - 3/(2a), cancellation-free
    u = alpha * tau
    if u < 1e-3:
        u2 = u * u
        s = u2 * u / 3 - u2 * u2 / 4 + 7 * u2 * u2 * u / 60 - u2 * u2 * u2 / 24
    else:
        s = u + 2 * math.expm1(-u) - 0.5 * math.expm1(-2 * u)
    return s / alpha


def q_of_tau(tau: float, params: SystemParams, L: float, mu: float) -> float:
    """Gap contraction certified over ``[0, tau]`` for ``tau <= min(tau2, T(z))``."""
    al, ga = params.alpha, params.gamma
    return 1.0 - (2 * mu * ga / al) * eval_Psi(tau, params, L) * _decrease_bracket(tau, al)


def q_factor(params: SystemParams, L: float, mu: float, mode: str = "min", tol: float = 1e-10) -> float:
    """Per-cycle contraction factor ``Q`` of the gap.

    ``mode="min"`` minimises ``q(tau)`` over ``(0, min(tau2, tau3)]``;
    ``mode="tau3"`` evaluates it at ``min(tau2, tau3)`` (just inside
    ``tau2`` when that is the smaller one).

    Raises
    ------
    InvalidContraction
        If the result is not in ``(0, 1)``, typically because ``mu`` and
        ``L`` are inconsistent.
    """
    if not mu > 0:
        raise DomainError(f"mu must be > 0, got {mu!r}")
    hi, at_tau2 = _feasible_cap(params, L, None)
    q = lambda tau: q_of_tau(tau, params, L, mu)  # noqa: E731
    if mode == "tau3":
        Q = q(hi)
    elif mode == "min":
        _, Q = golden_section_min(q, 0.0, hi, tol=tol)
        if not at_tau2:
            Q = min(Q, q(hi))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if not 0.0 < Q < 1.0:
        raise InvalidContraction(f"Q={Q!r} is not in (0, 1); check mu <= L")
    return Q


def constants_from(Q: float, tau_upper: float) -> Tuple[float, float]:
    """``C = 1/Q`` and ``K = -ln(Q) / tau_upper``."""
    if not 0 < Q < 1:
        raise InvalidContraction(f"Q={Q!r} is not in (0, 1)")
    if not tau_upper > 0:
        raise DomainError("tau_upper must be > 0")
    return 1.0 / Q, -math.log(Q) / tau_upper


def convergence_constants(params: SystemParams, L: float, mu: float) -> Tuple[float, float]:
    """Constants of the envelope ``f - f* <= C exp(-K t) (f(z) - f*)``."""
    Q = q_factor(params, L, mu)
    _, tau_upper = tau_upper_bound(params, L, mu)
    return constants_from(Q, tau_upper)


@dataclass(frozen=True)
class TheoreticalBounds:
    tau1: float
    tau2: float
    tau3: float
    tau_star: float
    tau_upper: float
    Q: float
    C: float
    K: float

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("tau1", "tau2", "tau3", "tau_star", "tau_upper", "Q", "C", "K")}


def compute_bounds(params: SystemParams, L: float, mu: float, q_mode: str = "min") -> TheoreticalBounds:
    """All bounds and constants for ``(params, L, mu)`` at once."""
    tau1, tau2, tau3 = solve_tau(params, L)
    tau_star, tau_upper = tau_upper_bound(params, L, mu)
    Q = q_factor(params, L, mu, mode=q_mode)
    C, K = constants_from(Q, tau_upper)
    return TheoreticalBounds(tau1, tau2, tau3, tau_star, tau_upper, Q, C, K)
