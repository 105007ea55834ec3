"""Restarted trajectories: solution pieces glued at speed restart times."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import List

import numpy as np

from .dynamics import (
    IntegratorOptions,
    SegmentResult,
    SystemParams,
    Termination,
    integrate_until_restart,
)
from .errors import DomainError, NoProgress
from .objectives import Objective

GAP_FLOOR = 1e-30
PROGRESS_RTOL = 1e-16


@dataclass
class RestartedTrajectory:
    """A restarted trajectory and its restart bookkeeping.

    Attributes
    ----------
    segments : list of SegmentResult
        One entry per cycle; only the last one may be incomplete.
    restart_times : ndarray
        Cumulative restart times ``S_1 < S_2 < ...``.
    intervals : ndarray
        Durations of the completed cycles, ``T_i = S_i - S_{i-1}``.
    t, f_gap, speed : ndarray
        Global samples on the integration grid, in time order. The glue
        point between two cycles appears once, carrying the pre-reset speed.
    restarted : ndarray of bool
        True on the samples that sit at a restart time.
    reason : str
        ``"Horizon"``, ``"GradientBelowTol"`` or ``"MaxTimeReached"``.
    """

    segments: List[SegmentResult]
    restart_times: np.ndarray
    intervals: np.ndarray
    t: np.ndarray
    f_gap: np.ndarray
    speed: np.ndarray
    restarted: np.ndarray
    reason: str
    f_star: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def n_restarts(self) -> int:
        return int(self.restart_times.size)

    @property
    def restart_gaps(self) -> np.ndarray:
        """Gap at ``t=0`` followed by the gap at each restart time."""
        return np.concatenate([[self.f_gap[0]], self.f_gap[self.restarted]])

    def samples(self):
        """``(t, f_gap, speed)`` triples."""
        return list(zip(self.t.tolist(), self.f_gap.tolist(), self.speed.tolist()))


def _assemble(segments, restart_times, intervals, reason, f_star):
    ts, fs, sp, fl = [], [], [], []
    offset = 0.0
    for i, seg in enumerate(segments):
        start = 0 if i == 0 else 1
        ts.append(offset + seg.times[start:])
        fs.append(seg.values[start:] - f_star)
        sp.append(seg.speeds[start:])
        flags = np.zeros(seg.times.size - start, dtype=bool)
        if seg.termination is Termination.RESTART_FOUND:
            flags[-1] = True
            offset = float(restart_times[i])
        fl.append(flags)
    return RestartedTrajectory(
        segments=segments,
        restart_times=np.asarray(restart_times, dtype=float),
        intervals=np.asarray(intervals, dtype=float),
        t=np.concatenate(ts),
        f_gap=np.concatenate(fs),
        speed=np.concatenate(sp),
        restarted=np.concatenate(fl),
        reason=reason,
        f_star=f_star,
    )


def run_restarted(obj: Objective, params: SystemParams, z, horizon: float, opts: IntegratorOptions = IntegratorOptions()) -> RestartedTrajectory:
    """Chain speed-restarted cycles from ``z`` up to time ``horizon``.

    Each cycle starts at the previous restart point with zero velocity. The
    run ends at the horizon (the last cycle is truncated there and left out
    of ``intervals``), when the gradient drops below
    ``opts.gradient_stop_tol``, or when a cycle exceeds ``opts.max_time``
    without restarting.

    Raises
    ------
    NoProgress
        If two consecutive cycles each reduce the gap by less than a relative
        ``1e-16``.
    """
    if not horizon > 0:
        raise DomainError("horizon must be > 0")
    z = np.asarray(z, dtype=float)
    segments: List[SegmentResult] = []
    restart_times: List[float] = []
    intervals: List[float] = []
    S = 0.0
    stalled = 0
    reason = "Horizon"
    while True:
        remaining = horizon - S
        if remaining <= 0:
            break
        seg_opts = opts
        if remaining < opts.max_time:
            h = min(opts.h_ode, remaining)
            seg_opts = dataclasses.replace(
                opts,
                max_time=remaining,
                h_ode=h,
                event_tolerance=min(opts.event_tolerance, 0.5 * h),
            )
        seg = integrate_until_restart(obj, params, z, seg_opts)
        segments.append(seg)
        if seg.termination is Termination.GRADIENT_BELOW_TOL:
            reason = "GradientBelowTol"
            break
        if seg.termination is Termination.MAX_TIME_REACHED:
            reason = "MaxTimeReached" if remaining > opts.max_time else "Horizon"
            break
        T = float(seg.restart_time)
        S = S + T
        restart_times.append(S)
        intervals.append(T)
        f0 = float(seg.values[0]) - obj.f_star
        f1 = float(seg.values[-1]) - obj.f_star
        if f0 > GAP_FLOOR and f0 - f1 < PROGRESS_RTOL * f0:
            stalled += 1
        else:
            stalled = 0
        if stalled >= 2:
            traj = _assemble(segments, restart_times, intervals, "NoProgress", obj.f_star)
            raise NoProgress(f"gap stopped decreasing at t={S:.6g}", traj)
        z = seg.final_position
    return _assemble(segments, restart_times, intervals, reason, obj.f_star)


def verify_cycle_contraction(traj: RestartedTrajectory, obj: Objective = None) -> np.ndarray:
    """Gap ratio across each completed cycle.

    Cycles that start with a gap at or below ``1e-30`` are skipped. Every
    ratio is expected to be below 1, and below the theoretical per-cycle
    factor when ``mu`` and ``L`` are exact.
    """
    f_star = traj.f_star if obj is None else obj.f_star
    ratios = []
    for seg in traj.segments:
        if seg.termination is not Termination.RESTART_FOUND:
            continue
        start = float(seg.values[0]) - f_star
        if start <= GAP_FLOOR:
            continue
        ratios.append((float(seg.values[-1]) - f_star) / start)
    return np.asarray(ratios, dtype=float)
