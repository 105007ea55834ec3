"""Command-line front end.

Commands: ``simulate``, ``theory``, ``discrete`` and ``reproduce-paper``.
Exit status is 0 on success, 1 on a runtime error and 2 on a configuration
error.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import analysis
from .config import ExperimentConfig, apply_overrides, load_config
from .discrete import DiscreteConfig, RestartPolicy, gaps, run_algorithm
from .dynamics import IntegratorOptions, SystemParams, integrate_trajectory
from .errors import ConfigError, DomainError, NonFiniteIterate, WinRestartError
from .experiments import reproduce_paper
from .objectives import PowerQuadraticSpec, make_power_quadratic
from .restart import run_restarted
from .theory import compute_bounds

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG = 0, 1, 2


def _common(p):
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int, help="seed for a random initial point")
    p.add_argument("--format", choices=("csv", "json"), default="json", help="summary format")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="winrestart", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="restarted continuous trajectory")
    _common(s)
    d = sub.add_parser("discrete", help="inertial gradient algorithm under restart policies")
    _common(d)

    t = sub.add_parser("theory", help="restart-time bounds and rate constants")
    t.add_argument("--alpha", type=float, required=True)
    t.add_argument("--beta", type=float, required=True)
    t.add_argument("--gamma", type=float, required=True)
    t.add_argument("--L", type=float, required=True)
    t.add_argument("--mu", type=float, required=True)
    t.add_argument("--format", choices=("text", "csv", "json"), default="text")

    r = sub.add_parser("reproduce-paper", help="run the full experiment grid")
    r.add_argument("--out", default="reproduction")
    r.add_argument("--threads", type=int, help="parallel cells (default: WINRESTART_THREADS or 1)")
    r.add_argument("--format", choices=("csv", "json"), default="json")
    return ap


def _resolve_config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    overrides = list(args.set)
    if args.out is not None:
        overrides.append(("out", args.out))
    if args.seed is not None:
        overrides.extend([("seed", str(args.seed)), ("x0_random", "true")])
    cfg = apply_overrides(cfg, overrides)
    if cfg.gamma is None and cfg.gamma_eps is None:
        cfg = apply_overrides(cfg, [("gamma_eps", "0.1")])
    return cfg.validate()


def _emit(summary: dict, fmt: str, path: Path = None):
    if fmt == "json":
        text = json.dumps(summary, indent=2, sort_keys=True) + "\n"
    else:
        text = "key,value\n" + "".join(f"{k},{v}\n" for k, v in _flatten(summary))
    sys.stdout.write(text)
    if path is not None:
        path.write_text(text, encoding="utf-8")


def _flatten(d, prefix=""):
    for k in sorted(d):
        v = d[k]
        if isinstance(v, dict):
            yield from _flatten(v, f"{prefix}{k}.")
        elif isinstance(v, (list, tuple)):
            yield f"{prefix}{k}", " ".join(str(x) for x in v)
        else:
            yield f"{prefix}{k}", v


def _setup(cfg):
    obj = make_power_quadratic(PowerQuadraticSpec(cfg.n, cfg.rho))
    params = SystemParams(cfg.alpha, cfg.beta, cfg.resolved_gamma())
    return obj, params


def cmd_simulate(cfg: ExperimentConfig, fmt: str = "json") -> int:
    obj, params = _setup(cfg)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    z = cfg.initial_point()
    opts = IntegratorOptions(cfg.h_ode, cfg.event_tolerance, cfg.max_time, cfg.gradient_stop_tol)
    traj = run_restarted(obj, params, z, cfg.horizon, opts)
    analysis.export_csv(traj, out / "trajectory.csv")
    summary = {
        "alpha": params.alpha, "beta": params.beta, "gamma": params.gamma,
        "restarts": traj.n_restarts, "end_reason": traj.reason,
        "f_gap_initial": float(traj.f_gap[0]), "f_gap_final": float(traj.f_gap[-1]),
    }
    if traj.f_gap[0] == 0 or traj.t.size == 1:
        summary["status"] = "already optimal"
        _emit(summary, fmt, out / f"summary.{fmt}")
        return EXIT_OK
    summary["status"] = "ok"
    fit = analysis.fit_trajectory(traj, mode=cfg.fit_mode, window=cfg.fit_window)
    summary["fit"] = {"A": fit.A, "B": fit.B, "r_squared": fit.r_squared, "window": list(fit.window)}
    if traj.intervals.size:
        st = analysis.interval_stats(traj.intervals)
        summary["intervals"] = {"count": st.count, "mean": st.mean, "variance": st.variance}
    envelope = None
    try:
        b = compute_bounds(params, obj.L, obj.mu)
        summary["theory"] = b.as_dict()
        envelope = (b.C, b.K, float(traj.f_gap[0]))
    except WinRestartError as exc:
        summary["theory_error"] = str(exc)
    curves = {"restarted": list(zip(traj.t, traj.f_gap))}
    if cfg.compare_unrestarted:
        plain = integrate_trajectory(obj, params, z, cfg.horizon, h=cfg.h_ode)
        analysis.export_csv(plain, out / "unrestarted.csv", f_star=obj.f_star)
        curves["no restart"] = list(zip(plain.times, plain.values - obj.f_star))
    analysis.emit_plot(curves, out / "plot.svg", analysis.PlotStyle(
        title=f"alpha={params.alpha:g} beta={params.beta:g} gamma={params.gamma:.6g}",
        envelope=envelope, restart_times=traj.restart_times))
    _emit(summary, fmt, out / f"summary.{fmt}")
    return EXIT_OK


def cmd_discrete(cfg: ExperimentConfig, fmt: str = "json") -> int:
    obj, params = _setup(cfg)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    x0 = cfg.initial_point()
    summary = {"alpha": params.alpha, "beta": params.beta, "gamma": params.gamma, "h": cfg.h,
               "max_iters": cfg.max_iters, "policies": {}}
    curves = {}
    for pol in cfg.policies:
        dc = DiscreteConfig(params, h=cfg.h, max_iters=cfg.max_iters, restart_policy=RestartPolicy(pol),
                            stop_grad_tol=cfg.gradient_stop_tol)
        recs = run_algorithm(obj, dc, x0)
        analysis.export_csv(recs if cfg.max_iters > 0 else [], out / f"discrete_{pol}.csv")
        entry = {"iterations": len(recs) - 1, "restarts": int(sum(r.restarted for r in recs)),
                 "f_gap_final": recs[-1].f_gap}
        if cfg.max_iters > 0 and len(recs) > 1:
            try:
                fit = analysis.fit_exponential(np.arange(len(recs), dtype=float), gaps(recs))
                entry["fit"] = {"A": fit.A, "B": fit.B, "r_squared": fit.r_squared}
            except WinRestartError as exc:
                entry["fit_error"] = str(exc)
            curves[pol] = [(r.k, r.f_gap) for r in recs]
        summary["policies"][pol] = entry
    if curves and any(len(c) > 1 for c in curves.values()):
        try:
            analysis.emit_plot(curves, out / "discrete.svg", analysis.PlotStyle(xlabel="k"))
        except WinRestartError:
            pass
    _emit(summary, fmt, out / f"summary.{fmt}")
    return EXIT_OK


def cmd_theory(alpha, beta, gamma, L, mu, fmt="text") -> int:
    if mu > L:
        print(f"warning: mu={mu:g} exceeds L={L:g}; a PL constant cannot exceed L", file=sys.stderr)
    b = compute_bounds(SystemParams(alpha, beta, gamma), L, mu)
    d = b.as_dict()
    if fmt == "json":
        sys.stdout.write(json.dumps(d, indent=2) + "\n")
    elif fmt == "csv":
        sys.stdout.write("key,value\n" + "".join(f"{k},{v!r}\n" for k, v in d.items()))
    else:
        sys.stdout.write("".join(f"{k:>9s} = {v:.12g}\n" for k, v in d.items()))
    return EXIT_OK


def cmd_reproduce_paper(output_dir, threads=None, fmt="json") -> int:
    report = reproduce_paper(output_dir, threads=threads)
    for c in report["checks"]:
        print(f"{'PASS' if c['ok'] else 'MISS'}  {c['check']}: {c['value']:.6g} (reference {c['reference']:.6g})")
    for e in report["errors"]:
        print(f"ERROR {e['cell']}: {e['error']}", file=sys.stderr)
    print(f"{report['passed']} within tolerance, {report['failed']} outside; report in {Path(output_dir) / 'report.json'}")
    return EXIT_RUNTIME if report["errors"] else EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            if args.command == "theory":
                return cmd_theory(args.alpha, args.beta, args.gamma, args.L, args.mu, args.format)
            if args.command == "reproduce-paper":
                return cmd_reproduce_paper(args.out, args.threads, args.format)
            cfg = _resolve_config(args)
            if args.command == "simulate":
                return cmd_simulate(cfg, args.format)
            return cmd_discrete(cfg, args.format)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonFiniteIterate as exc:
        print(f"runtime error at k={exc.k}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except WinRestartError as exc:
        hint = " (try other parameters; the bound functions never crossed their level)" if type(exc).__name__ == "BracketFailure" else ""
        print(f"runtime error: {type(exc).__name__}: {exc}{hint}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
