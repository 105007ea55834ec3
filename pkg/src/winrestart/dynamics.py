"""Integration of the inertial system with Hessian-driven damping.

The second order system

    x'' + alpha x' + beta Hess f(x) x' + gamma grad f(x) = 0

is integrated as a first order system in ``(x, v)`` with the classical
fourth-order Runge-Kutta method on a fixed grid. The speed restart event is
the first time ``t > 0`` at which ``d/dt |v|^2 <= 0``; it is bracketed on the
grid and then located by bisection, re-integrating a single partial step from
the left end of the bracket.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import DomainError, NonFiniteState, ZeroSpeedStall
from .objectives import Objective

SPEED_FLOOR = 1e-30
MAX_BISECTIONS = 200


@dataclass(frozen=True)
class SystemParams:
    """Coefficients ``(alpha, beta, gamma)`` of the damped system."""

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"alpha must be > 0, got {self.alpha!r}")
        if not self.beta >= 0:
            raise DomainError(f"beta must be >= 0, got {self.beta!r}")
        if not self.gamma > 0:
            raise DomainError(f"gamma must be > 0, got {self.gamma!r}")


@dataclass(frozen=True)
class PhaseState:
    t: float
    x: np.ndarray
    v: np.ndarray


@dataclass(frozen=True)
class IntegratorOptions:
    """Fixed-step integration and event localisation settings."""

    h_ode: float = 1e-4
    event_tolerance: float = 1e-8
    max_time: float = 100.0
    gradient_stop_tol: float = 1e-13

    def __post_init__(self):
        if not self.h_ode > 0:
            raise DomainError("h_ode must be > 0")
        if not self.max_time > 0:
            raise DomainError("max_time must be > 0")
        if self.h_ode > self.max_time:
            raise DomainError("h_ode must not exceed max_time")
        if not 0 < self.event_tolerance < self.h_ode:
            raise DomainError("event_tolerance must lie in (0, h_ode)")
        if not self.gradient_stop_tol >= 0:
            raise DomainError("gradient_stop_tol must be >= 0")


class Termination(enum.Enum):
    RESTART_FOUND = "RestartFound"
    GRADIENT_BELOW_TOL = "GradientBelowTol"
    MAX_TIME_REACHED = "MaxTimeReached"


@dataclass
class SegmentResult:
    """Grid samples of one solution of the system started at rest.

    ``times``, ``positions``, ``velocities`` and ``values`` are aligned
    arrays; times are local to the segment and start at 0. When a restart is
    found the last sample sits exactly at ``restart_time``.
    """

    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    values: np.ndarray
    restart_time: Optional[float]
    termination: Termination
    bisection_iterations: int = 0

    @property
    def states(self) -> List[PhaseState]:
        return [PhaseState(float(t), x, v) for t, x, v in zip(self.times, self.positions, self.velocities)]

    @property
    def speeds(self) -> np.ndarray:
        return np.linalg.norm(self.velocities, axis=1)

    @property
    def final_position(self) -> np.ndarray:
        return self.positions[-1]

    @property
    def duration(self) -> float:
        return float(self.times[-1])


def win_vector_field(obj: Objective, params: SystemParams, s: PhaseState):
    """Return ``(dx, dv)`` at state ``s``."""
    x = np.asarray(s.x, dtype=float)
    v = np.asarray(s.v, dtype=float)
    if x.shape != (obj.dim,) or v.shape != (obj.dim,):
        raise DomainError(f"state dimension mismatch, expected {obj.dim}")
    dv = -params.alpha * v - params.gamma * np.asarray(obj.grad(x))
    if params.beta != 0:
        dv = dv - params.beta * np.asarray(obj.hessian_vector(x, v))
    return v.copy(), dv


def speed_derivative(obj: Objective, params: SystemParams, s: PhaseState) -> float:
    """``d/dt |v|^2 = 2 <v, dv>``; its first down-crossing defines the restart."""
    _, dv = win_vector_field(obj, params, s)
    return 2.0 * float(np.dot(s.v, dv))


class _Field:
    # Returns dv and grad together so the grid loop can reuse them.
    __slots__ = ("grad", "hvp", "alpha", "beta", "gamma")

    def __init__(self, obj: Objective, params: SystemParams):
        self.grad = obj.grad
        self.hvp = obj.hessian_vector
        self.alpha = params.alpha
        self.beta = params.beta
        self.gamma = params.gamma

    def __call__(self, x, v):
        g = self.grad(x)
        dv = -self.alpha * v - self.gamma * g
        if self.beta != 0:
            dv = dv - self.beta * self.hvp(x, v)
        return dv, g


def _rk4(field_, x, v, a1, s):
    # a1 is dv at (x, v); dx = v at every stage.
    hs = 0.5 * s
    x2 = x + hs * v
    v2 = v + hs * a1
    a2, _ = field_(x2, v2)
    x3 = x + hs * v2
    v3 = v + hs * a2
    a3, _ = field_(x3, v3)
    x4 = x + s * v3
    v4 = v + s * a3
    a4, _ = field_(x4, v4)
    xn = x + (s / 6.0) * (v + 2.0 * v2 + 2.0 * v3 + v4)
    vn = v + (s / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
    return xn, vn


def _integrate(obj, params, z, v0, opts, detect):
    z = np.asarray(z, dtype=float)
    if z.shape != (obj.dim,):
        raise DomainError(f"initial point must have shape ({obj.dim},), got {z.shape}")
    field_ = _Field(obj, params)
    h = opts.h_ode
    t_end = opts.max_time
    stop_tol = opts.gradient_stop_tol
    value = obj.value

    x = z.copy()
    v = np.zeros(obj.dim) if v0 is None else np.asarray(v0, dtype=float).copy()
    a, g = field_(x, v)
    ts = [0.0]
    xs = [x]
    vs = [v]
    fs = [float(value(x))]

    def result(term, restart_time=None, iters=0):
        return SegmentResult(
            times=np.asarray(ts),
            positions=np.asarray(xs),
            velocities=np.asarray(vs),
            values=np.asarray(fs),
            restart_time=restart_time,
            termination=term,
            bisection_iterations=iters,
        )

    if math.sqrt(float(np.dot(g, g))) <= stop_tol:
        return result(Termination.GRADIENT_BELOW_TOL)

    armed = False
    moved = False
    k = 0
    t = 0.0
    while t < t_end:
        t_next = min((k + 1) * h, t_end)
        s = t_next - t
        xn, vn = _rk4(field_, x, v, a, s)
        # inf and nan propagate through the sums; cheaper than isfinite on both
        if not math.isfinite(float(xn.sum()) + float(vn.sum())):
            raise NonFiniteState(f"non-finite state at t={t_next:.6g}; reduce h_ode")
        an, gn = field_(xn, vn)
        sd = 2.0 * float(np.dot(vn, an))
        speed = math.sqrt(float(np.dot(vn, vn)))
        if speed > SPEED_FLOOR:
            moved = True
        if detect and sd <= 0 and speed > SPEED_FLOOR and (armed or k == 0):
            lo, hi = 0.0, s
            iters = 0
            while hi - lo > opts.event_tolerance and iters < MAX_BISECTIONS:
                mid = 0.5 * (lo + hi)
                xm, vm = _rk4(field_, x, v, a, mid)
                am, _ = field_(xm, vm)
                if np.dot(vm, am) > 0:
                    lo = mid
                else:
                    hi = mid
                iters += 1
            if hi < s:
                xn, vn = _rk4(field_, x, v, a, hi)
            t_r = t + hi
            ts.append(t_r)
            xs.append(xn)
            vs.append(vn)
            fs.append(float(value(xn)))
            return result(Termination.RESTART_FOUND, t_r, iters)
        if detect and sd > 0 and speed > SPEED_FLOOR:
            armed = True
        x, v, a = xn, vn, an
        t = t_next
        k += 1
        ts.append(t)
        xs.append(x)
        vs.append(v)
        fs.append(float(value(x)))
        if math.sqrt(float(np.dot(gn, gn))) <= stop_tol:
            return result(Termination.GRADIENT_BELOW_TOL)

    if detect and not moved:
        raise ZeroSpeedStall(f"speed stayed below {SPEED_FLOOR:g} up to t={t_end:g}")
    return result(Termination.MAX_TIME_REACHED)


def integrate_until_restart(obj: Objective, params: SystemParams, z, opts: IntegratorOptions = IntegratorOptions()) -> SegmentResult:
    """Integrate from ``(z, 0)`` until the speed restart event.

    Stops with ``GRADIENT_BELOW_TOL`` when ``|grad f(x)|`` falls to
    ``opts.gradient_stop_tol`` (checked at grid points, including ``t=0``)
    and with ``MAX_TIME_REACHED`` at ``opts.max_time``.

    Raises
    ------
    NonFiniteState
        If the state overflows.
    ZeroSpeedStall
        If the speed never exceeds ``SPEED_FLOOR`` before ``max_time``.
    """
    return _integrate(obj, params, z, None, opts, detect=True)


def integrate_trajectory(obj: Objective, params: SystemParams, z, t_end: float, h: float = 1e-4, v0=None, gradient_stop_tol: float = 0.0) -> SegmentResult:
    """Plain (non-restarted) solution on ``[0, t_end]`` on a fixed RK4 grid."""
    opts = IntegratorOptions(h_ode=h, event_tolerance=h / 2, max_time=t_end, gradient_stop_tol=gradient_stop_tol)
    return _integrate(obj, params, z, v0, opts, detect=False)
