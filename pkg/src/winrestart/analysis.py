"""Rate regression, restart-interval statistics, CSV and SVG export."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np

from .dynamics import SegmentResult
from .errors import EmptyInput, InsufficientData
from .restart import RestartedTrajectory

GAP_FLOOR = 1e-30
CONTINUOUS_HEADER = ("t", "f_gap", "speed", "restarted")
DISCRETE_HEADER = ("k", "f_gap", "step_norm", "restarted")


@dataclass(frozen=True)
class RegressionFit:
    """``gap ~ A exp(-B t)`` fitted by least squares on ``log(gap)``."""

    A: float
    B: float
    r_squared: float
    window: Tuple[float, float]
    n: int

    def predict(self, t):
        return self.A * np.exp(-self.B * np.asarray(t, dtype=float))


@dataclass(frozen=True)
class IntervalStats:
    count: int
    mean: float
    variance: float


def _split(samples, gap):
    if gap is None:
        arr = np.asarray(samples, dtype=float)
        if arr.size == 0:
            return np.empty(0), np.empty(0)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("samples must be a sequence of (t, gap) pairs")
        return arr[:, 0], arr[:, 1]
    return np.asarray(samples, dtype=float), np.asarray(gap, dtype=float)


def fit_exponential(samples, gap=None, window: Optional[Tuple[float, float]] = None, floor: float = GAP_FLOOR) -> RegressionFit:
    """Fit ``A exp(-B t)`` to positive gap samples.

    Parameters
    ----------
    samples : array_like
        Either ``(t, gap)`` pairs, or the times when ``gap`` is given.
    gap : array_like, optional
        Gap values aligned with ``samples``.
    window : (float, float), optional
        Only samples with ``window[0] <= t <= window[1]`` are used.
    floor : float
        Samples from the first one at or below ``floor`` onward are dropped.
    """
    t, y = _split(samples, gap)
    below = np.nonzero(~(y > floor))[0]
    if below.size:
        t, y = t[: below[0]], y[: below[0]]
    if window is not None:
        m = (t >= window[0]) & (t <= window[1])
        t, y = t[m], y[m]
    if t.size < 2:
        raise InsufficientData(f"need at least 2 positive samples, got {t.size}")
    logy = np.log(y)
    tm = t.mean()
    lm = logy.mean()
    dt = t - tm
    sxx = float(np.dot(dt, dt))
    if sxx == 0:
        raise InsufficientData("all samples share one time value")
    slope = float(np.dot(dt, logy - lm)) / sxx
    intercept = lm - slope * tm
    resid = logy - (intercept + slope * t)
    ss_tot = float(np.dot(logy - lm, logy - lm))
    ss_res = float(np.dot(resid, resid))
    r2 = 1.0 if ss_tot == 0 else max(0.0, 1.0 - ss_res / ss_tot)
    return RegressionFit(math.exp(intercept), -slope, r2, (float(t[0]), float(t[-1])), int(t.size))


def fit_trajectory(traj: RestartedTrajectory, mode: str = "all", window=None) -> RegressionFit:
    """Rate fit on all grid samples (``"all"``) or on restart points only (``"restarts"``)."""
    if mode == "all":
        return fit_exponential(traj.t, traj.f_gap, window=window)
    if mode == "restarts":
        t = np.concatenate([[traj.t[0]], traj.t[traj.restarted]])
        return fit_exponential(t, traj.restart_gaps, window=window)
    raise ValueError(f"unknown mode {mode!r}")


def interval_stats(intervals: Sequence[float], ddof: int = 0) -> IntervalStats:
    """Mean and variance (population by default, ``ddof=1`` for sample)."""
    x = np.asarray(intervals, dtype=float)
    if x.size == 0:
        raise EmptyInput("no intervals")
    if ddof >= x.size:
        raise InsufficientData("not enough intervals for the requested ddof")
    return IntervalStats(int(x.size), float(x.mean()), float(x.var(ddof=ddof)))


def _fmt(v) -> str:
    return format(float(v), ".17g")


def _rows(data, f_star):
    if isinstance(data, RestartedTrajectory):
        return CONTINUOUS_HEADER, zip(data.t, data.f_gap, data.speed, data.restarted.astype(int))
    if isinstance(data, SegmentResult):
        return CONTINUOUS_HEADER, zip(data.times, data.values - f_star, data.speeds, [0] * data.times.size)
    records = list(data)
    return DISCRETE_HEADER, ((r.k, r.f_gap, r.step_norm, int(r.restarted)) for r in records)


def export_csv(data, path, f_star: float = 0.0) -> Path:
    """Write a trajectory or an iterate list as CSV.

    Continuous data gets the header ``t,f_gap,speed,restarted`` and discrete
    data ``k,f_gap,step_norm,restarted``. Reals use 17 significant digits so
    that reading the file back is exact.
    """
    path = Path(path)
    header, rows = _rows(data, f_star)
    try:
        with path.open("w", newline="", encoding="ascii") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            integer = [name in ("k", "restarted") for name in header]
            for row in rows:
                w.writerow([str(int(v)) if is_int else _fmt(v) for v, is_int in zip(row, integer)])
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc
    return path


def read_csv(path) -> dict:
    """Read a file written by :func:`export_csv` into numpy arrays."""
    path = Path(path)
    with path.open(newline="", encoding="ascii") as fh:
        r = csv.reader(fh)
        header = next(r)
        cols = [[] for _ in header]
        for row in r:
            for c, v in zip(cols, row):
                c.append(v)
    out = {}
    for name, c in zip(header, cols):
        if name in ("k", "restarted"):
            out[name] = np.array([int(v) for v in c], dtype=int)
        else:
            out[name] = np.array([float(v) for v in c], dtype=float)
    return out


@dataclass
class PlotStyle:
    """Appearance of :func:`emit_plot`.

    ``envelope`` is ``(C, K, gap0)`` and overlays ``C exp(-K t) gap0``.
    """

    title: str = ""
    xlabel: str = "t"
    width: int = 640
    height: int = 420
    envelope: Optional[Tuple[float, float, float]] = None
    restart_times: Sequence[float] = field(default_factory=tuple)
    max_points: int = 4000
    colors: Sequence[str] = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _decimate(t, y, max_points):
    if t.size <= max_points:
        return t, y
    idx = np.unique(np.linspace(0, t.size - 1, max_points).round().astype(int))
    return t[idx], y[idx]


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def emit_plot(samples, path, style: Optional[PlotStyle] = None) -> Path:
    """Write an SVG of ``log10(gap)`` against time.

    ``samples`` is a sequence of ``(t, gap)`` pairs, or a dict mapping a
    legend label to such a sequence. Each curve becomes one ``<polyline>``;
    the optional envelope is a dashed ``<polyline class="envelope">`` and
    restart times are vertical tick marks. Output depends only on the input.
    """
    style = style or PlotStyle()
    series = samples if isinstance(samples, dict) else {"": samples}
    curves = []
    for label, s in series.items():
        t, y = _split(s, None)
        m = y > GAP_FLOOR
        if t.size:
            curves.append((label, t[m], np.log10(y[m])))
    if not curves or all(c[1].size == 0 for c in curves):
        raise EmptyInput("nothing to plot")
    t_all = np.concatenate([c[1] for c in curves])
    y_all = np.concatenate([c[2] for c in curves])
    t0, t1 = float(t_all.min()), float(t_all.max())
    y0, y1 = math.floor(float(y_all.min())), math.ceil(float(y_all.max()))
    env = None
    if style.envelope is not None:
        C, K, g0 = style.envelope
        te = np.linspace(t0, t1, 200)
        ye = np.log10(C * g0) - K * te / math.log(10)
        env = (te, ye)
        y1 = max(y1, math.ceil(float(ye.max())))
        y0 = min(y0, math.floor(float(ye.min())))
    if t1 == t0:
        t1 = t0 + 1.0
    if y1 == y0:
        y1 = y0 + 1

    W, Hh = style.width, style.height
    ml, mr, mt, mb = 60, 20, 30, 45
    pw, ph = W - ml - mr, Hh - mt - mb

    def X(t):
        return ml + (np.asarray(t) - t0) / (t1 - t0) * pw

    def Y(y):
        return mt + (y1 - np.asarray(y)) / (y1 - y0) * ph

    def pts(t, y):
        return " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(X(t), Y(y)))

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{Hh}" viewBox="0 0 {W} {Hh}">',
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="#000"/>',
    ]
    if style.title:
        out.append(f'<text x="{W / 2:.1f}" y="18" text-anchor="middle" font-size="13">{_esc(style.title)}</text>')
    step = max(1, int(math.ceil((y1 - y0) / 10)))
    for e in range(y0, y1 + 1, step):
        yy = float(Y(e))
        out.append(f'<line x1="{ml - 4}" y1="{yy:.2f}" x2="{ml}" y2="{yy:.2f}" stroke="#000"/>')
        out.append(f'<text x="{ml - 6}" y="{yy + 4:.2f}" text-anchor="end" font-size="10">1e{e}</text>')
    for k in range(6):
        tv = t0 + (t1 - t0) * k / 5
        xx = float(X(tv))
        out.append(f'<line x1="{xx:.2f}" y1="{mt + ph}" x2="{xx:.2f}" y2="{mt + ph + 4}" stroke="#000"/>')
        out.append(f'<text x="{xx:.2f}" y="{mt + ph + 16}" text-anchor="middle" font-size="10">{tv:.4g}</text>')
    out.append(f'<text x="{ml + pw / 2:.1f}" y="{Hh - 8}" text-anchor="middle" font-size="11">{_esc(style.xlabel)}</text>')
    for s in style.restart_times:
        if t0 <= s <= t1:
            xx = float(X(s))
            out.append(f'<line class="restart" x1="{xx:.2f}" y1="{mt + ph}" x2="{xx:.2f}" y2="{mt + ph - 6}" stroke="#888"/>')
    if env is not None:
        out.append(f'<polyline class="envelope" fill="none" stroke="#555" stroke-dasharray="5,3" points="{pts(*env)}"/>')
    for i, (label, t, y) in enumerate(curves):
        t, y = _decimate(t, y, style.max_points)
        color = style.colors[i % len(style.colors)]
        out.append(f'<polyline class="curve" fill="none" stroke="{color}" stroke-width="1.2" points="{pts(t, y)}"/>')
        if label:
            ly = mt + 14 + 14 * i
            out.append(f'<text x="{ml + pw - 6}" y="{ly}" text-anchor="end" font-size="11" fill="{color}">{_esc(label)}</text>')
    out.append("</svg>")
    path = Path(path)
    try:
        path.write_text("\n".join(out) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write plot to {path}: {exc}") from exc
    return path
