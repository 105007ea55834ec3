"""Scalar root bracketing, bisection and golden-section search."""

import math

from .errors import BracketFailure

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def bracket_down_crossing(fn, level, t0=1e-8, t_max=1e3, factor=2.0):
    """Find ``(lo, hi)`` with ``fn(lo) > level >= fn(hi)`` by geometric growth.

    ``fn`` is assumed to start above ``level`` near ``t0``.
    """
    lo = 0.0
    t = t0
    while t <= t_max:
        if fn(t) <= level:
            return lo, t
        lo = t
        t *= factor
    raise BracketFailure(f"no crossing of level {level:g} found before t={t_max:g}")


def bisect_decreasing(fn, level, lo, hi, rtol=1e-12, ftol=1e-10, max_iter=200):
    """Bisect a decreasing ``fn`` for ``fn(t) = level`` on ``[lo, hi]``.

    Stops once the bracket is narrower than ``rtol * hi`` and the better
    endpoint has residual at most ``ftol``, when the bracket cannot shrink
    any further, or after ``max_iter`` halvings.

    Returns
    -------
    root : float
    iterations : int
    """
    f_lo = fn(lo) - level if lo > 0 else math.inf
    f_hi = fn(hi) - level
    it = 0
    while it < max_iter:
        best = min(abs(f_lo), abs(f_hi))
        if hi - lo <= rtol * hi and best <= ftol:
            break
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        f_mid = fn(mid) - level
        it += 1
        if f_mid > 0:
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    root = lo if abs(f_lo) < abs(f_hi) else hi
    return root, it


def golden_section_min(fn, a, b, tol=1e-10, max_iter=500):
    """Minimise a unimodal ``fn`` on ``(a, b)``; only interior points are probed.

    Returns ``(x_min, f_min)``.
    """
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc = fn(c)
    fd = fn(d)
    it = 0
    while b - a > tol and it < max_iter:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INVPHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = fn(d)
        it += 1
    if fc <= fd:
        return c, fc
    return d, fd
