"""Objective functions with gradient and Hessian-vector products.

An :class:`Objective` bundles the callables needed by the inertial dynamics
together with the constants the convergence theory is stated in terms of:
the gradient Lipschitz constant ``L``, the Polyak-Lojasiewicz constant ``mu``
and the optimal value ``f_star``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainError

Vector = np.ndarray


@dataclass(frozen=True)
class Objective:
    """A twice differentiable convex function and its metadata.

    Parameters
    ----------
    dim : int
        Dimension of the domain.
    value : callable
        ``value(x) -> float``.
    grad : callable
        ``grad(x) -> ndarray``.
    hvp : callable or None
        ``hvp(x, v) -> ndarray`` computing the Hessian at ``x`` applied to
        ``v``. When ``None`` a central finite difference of ``grad`` is used.
    L : float
        Lipschitz constant of the gradient.
    mu : float
        Polyak-Lojasiewicz constant, ``2 mu (f(x) - f*) <= |grad f(x)|^2``.
    f_star : float
        Minimum value of the function.
    argmin : ndarray or None
        A minimizer, when known.
    name : str
        Label used in reports.
    """

    dim: int
    value: Callable[[Vector], float]
    grad: Callable[[Vector], Vector]
    hvp: Optional[Callable[[Vector, Vector], Vector]]
    L: float
    mu: float
    f_star: float = 0.0
    argmin: Optional[Vector] = None
    name: str = "objective"
    fd_step: float = 1e-6

    def __post_init__(self):
        if self.dim < 1:
            raise DomainError("dim must be a positive integer")
        if not self.L > 0 or not self.mu > 0:
            raise DomainError("L and mu must be positive")

    def hessian_vector(self, x: Vector, v: Vector) -> Vector:
        if self.hvp is not None:
            return self.hvp(x, v)
        return finite_difference_hvp(self, x, v, self.fd_step)

    def gap(self, x: Vector) -> float:
        return float(self.value(x)) - self.f_star


@dataclass(frozen=True)
class PowerQuadraticSpec:
    """``f(x) = 1/2 sum_j rho^(j-1) x_j^2`` on R^n."""

    n: int
    rho: float


def make_diagonal_quadratic(eigenvalues, name: str = "diagonal-quadratic") -> Objective:
    """Quadratic ``1/2 sum_j d_j x_j^2`` with positive diagonal ``d``."""
    d = np.asarray(eigenvalues, dtype=float)
    if d.ndim != 1 or d.size == 0:
        raise DomainError("eigenvalues must be a nonempty 1-D sequence")
    if np.any(d <= 0):
        raise DomainError("eigenvalues must be positive")
    d = d.copy()
    d.setflags(write=False)

    def value(x):
        x = np.asarray(x, dtype=float)
        return 0.5 * float(np.dot(d * x, x))

    def grad(x):
        return d * np.asarray(x, dtype=float)

    def hvp(x, v):
        return d * np.asarray(v, dtype=float)

    return Objective(
        dim=d.size,
        value=value,
        grad=grad,
        hvp=hvp,
        L=float(d.max()),
        mu=float(d.min()),
        f_star=0.0,
        argmin=np.zeros(d.size),
        name=name,
    )


def make_power_quadratic(spec: PowerQuadraticSpec) -> Objective:
    """Build the ill-conditioned diagonal quadratic with ratio ``rho``.

    The result is 1-strongly convex and ``rho**(n-1)``-smooth, with minimum 0
    at the origin.
    """
    if int(spec.n) != spec.n or spec.n < 1:
        raise DomainError(f"n must be a positive integer, got {spec.n!r}")
    if not spec.rho > 1:
        raise DomainError(f"rho must be > 1, got {spec.rho!r}")
    n = int(spec.n)
    eigs = float(spec.rho) ** np.arange(n)
    return make_diagonal_quadratic(eigs, name=f"power-quadratic(n={n}, rho={spec.rho:g})")


def gamma_for_oscillation(alpha: float, beta: float, rho: float, i: int, epsilon: float) -> float:
    """Gradient weight that makes mode ``i`` of the power quadratic oscillate.

    Returns ``(alpha + rho**i * beta)**2 / (4 rho**i) + epsilon``.
    """
    if not alpha > 0:
        raise DomainError("alpha must be > 0")
    if not beta >= 0:
        raise DomainError("beta must be >= 0")
    if not rho > 1:
        raise DomainError("rho must be > 1")
    if int(i) != i or i < 0:
        raise DomainError("i must be a nonnegative integer")
    if not epsilon > 0:
        raise DomainError(f"epsilon must be > 0, got {epsilon!r}")
    ri = float(rho) ** int(i)
    return (alpha + ri * beta) ** 2 / (4.0 * ri) + epsilon


def finite_difference_hvp(obj: Objective, x: Vector, v: Vector, h: float = 1e-6) -> Vector:
    """Central difference ``(grad(x + h v) - grad(x - h v)) / (2h)``."""
    if not h > 0:
        raise DomainError("h must be > 0")
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if not np.any(v):
        return np.zeros_like(x)
    return (np.asarray(obj.grad(x + h * v)) - np.asarray(obj.grad(x - h * v))) / (2.0 * h)


def sample_invariants(obj: Objective, n_samples: int = 100, seed: int = 0, box: float = 2.0) -> dict:
    """Probe the objective's declared constants on random points.

    Points are drawn uniformly from ``[-box, box]^dim``. PL and Lipschitz
    constants can only be checked on samples; a clean report is evidence,
    not proof.

    Returns
    -------
    dict
        Worst observed violations, each of which should be ``<= 0``:
        ``below_f_star``, ``pl``, ``lipschitz`` and ``hvp_asymmetry``.
    """
    rng = np.random.default_rng(seed)
    X = rng.uniform(-box, box, size=(n_samples, obj.dim))
    Y = rng.uniform(-box, box, size=(n_samples, obj.dim))
    U = rng.standard_normal((n_samples, obj.dim))
    V = rng.standard_normal((n_samples, obj.dim))
    below = pl = lip = asym = -np.inf
    for x, y, u, v in zip(X, Y, U, V):
        fx = obj.value(x)
        gx = obj.grad(x)
        below = max(below, obj.f_star - fx)
        pl = max(pl, 2.0 * obj.mu * (fx - obj.f_star) - float(np.dot(gx, gx)) - 1e-12 * abs(fx))
        dg = np.linalg.norm(gx - obj.grad(y))
        lip = max(lip, dg - obj.L * np.linalg.norm(x - y) * (1 + 1e-12))
        a = np.dot(obj.hessian_vector(x, u), v)
        b = np.dot(obj.hessian_vector(x, v), u)
        asym = max(asym, abs(a - b) - 1e-8 * (1 + abs(a)))
    return {"below_f_star": below, "pl": pl, "lipschitz": lip, "hvp_asymmetry": asym}
