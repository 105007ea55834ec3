"""Inertial gradient algorithm with Hessian-driven damping.

The Hessian term is approximated by a gradient difference, so the method
needs one new gradient at ``x_k`` and one at the extrapolated point ``y_k``
per iteration::

    y_k     = x_k + (1 - alpha h)(x_k - x_{k-1}) - beta h (grad f(x_k) - grad f(x_{k-1}))
    x_{k+1} = y_k - gamma h^2 grad f(y_k)

With ``t = k h`` this is a consistent discretisation of the continuous
system in :mod:`winrestart.dynamics`.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import List

import numpy as np

from .dynamics import SystemParams
from .errors import DomainError, NonFiniteIterate
from .objectives import Objective


class RestartPolicy(enum.Enum):
    NONE = "none"
    SPEED = "speed"
    WARM_START = "warm_start"


@dataclass(frozen=True)
class DiscreteConfig:
    """Settings of one run.

    ``literal=True`` follows the printed pseudocode branch instead of the
    default momentum reset: on a restart the current iterate is replaced by
    the previous one and the iteration is repeated from there.
    """

    params: SystemParams
    h: float = 1e-3
    max_iters: int = 3000
    restart_policy: RestartPolicy = RestartPolicy.SPEED
    stop_grad_tol: float = 1e-13
    literal: bool = False

    def __post_init__(self):
        if not self.h > 0:
            raise DomainError("h must be > 0")
        if int(self.max_iters) != self.max_iters or self.max_iters < 0:
            raise DomainError("max_iters must be a nonnegative integer")
        if not self.stop_grad_tol >= 0:
            raise DomainError("stop_grad_tol must be >= 0")
        if not isinstance(self.restart_policy, RestartPolicy):
            object.__setattr__(self, "restart_policy", RestartPolicy(self.restart_policy))

    def sanity_warnings(self, L: float) -> List[str]:
        out = []
        a = self.params.alpha * self.h
        if not 0 < 1 - a < 1:
            out.append(f"1 - alpha*h = {1 - a:.3g} is outside (0, 1)")
        eff = self.params.gamma * self.h**2 * L
        if eff > 4:
            out.append(f"gamma*h^2*L = {eff:.3g} exceeds 4")
        return out


@dataclass(frozen=True)
class IterateRecord:
    k: int
    x: np.ndarray
    f_gap: float
    step_norm: float
    restarted: bool


def algorithm_step(obj: Objective, cfg: DiscreteConfig, x_prev, x_curr):
    """One iteration; returns ``(y, x_next)``."""
    x_prev = np.asarray(x_prev, dtype=float)
    x_curr = np.asarray(x_curr, dtype=float)
    if x_prev.shape != x_curr.shape:
        raise DomainError("x_prev and x_curr must have the same shape")
    return _step(obj, cfg.params, cfg.h, x_prev, x_curr, obj.grad(x_prev), obj.grad(x_curr))


def _step(obj, p, h, x_prev, x_curr, g_prev, g_curr):
    y = x_curr + (1.0 - p.alpha * h) * (x_curr - x_prev)
    if p.beta != 0:
        y = y - p.beta * h * (g_curr - g_prev)
    return y, y - p.gamma * h * h * obj.grad(y)


def run_algorithm(obj: Objective, cfg: DiscreteConfig, x0) -> List[IterateRecord]:
    """Run the algorithm from ``x_1 = x_0``.

    Record ``k`` holds ``x_k``; record 0 is the starting point. With the
    speed policy, a tentative step shorter than the previous one is thrown
    away, the previous iterate is collapsed onto the current one (zero
    momentum), and the step is recomputed. The test is skipped on the
    iteration right after a restart. The warm start policy first ends one
    cycle at the first increase of ``f`` and then switches to speed restarts.

    Raises
    ------
    NonFiniteIterate
        If an iterate overflows; ``k`` is attached.
    """
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (obj.dim,):
        raise DomainError(f"x0 must have shape ({obj.dim},), got {x0.shape}")
    for msg in cfg.sanity_warnings(obj.L):
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    policy = cfg.restart_policy
    p, h = cfg.params, cfg.h
    grad = obj.grad

    x_prev = x0.copy()
    x = x0.copy()
    g_prev = grad(x_prev)
    g = g_prev
    f = obj.gap(x)
    records = [IterateRecord(0, x, f, 0.0, False)]
    if math.sqrt(float(np.dot(g, g))) <= cfg.stop_grad_tol:
        return records
    warm = policy is RestartPolicy.WARM_START
    refractory = False
    k = 0
    while k < cfg.max_iters:
        _, x_next = _step(obj, p, h, x_prev, x, g_prev, g)
        restarted = False
        if policy is not RestartPolicy.NONE and not refractory:
            if warm:
                trigger = obj.gap(x_next) > f
            else:
                trigger = np.linalg.norm(x_next - x) < np.linalg.norm(x - x_prev)
            if trigger:
                restarted = True
                warm = False
                if cfg.literal:
                    x, g = x_prev, g_prev
                else:
                    x_prev, g_prev = x, g
                _, x_next = _step(obj, p, h, x_prev, x, g_prev, g)
        refractory = restarted
        if not np.all(np.isfinite(x_next)):
            raise NonFiniteIterate(f"non-finite iterate at k={k + 1}; reduce h", k + 1)
        g_next = grad(x_next)
        step = float(np.linalg.norm(x_next - x))
        x_prev, g_prev = x, g
        x, g = x_next, g_next
        k += 1
        f = obj.gap(x)
        records.append(IterateRecord(k, x, f, step, restarted))
        if math.sqrt(float(np.dot(g, g))) <= cfg.stop_grad_tol:
            break
    return records


def gaps(records: List[IterateRecord]) -> np.ndarray:
    return np.array([r.f_gap for r in records])
