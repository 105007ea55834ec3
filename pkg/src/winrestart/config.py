"""Plain-text ``key = value`` experiment configuration."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from .discrete import RestartPolicy
from .errors import ConfigError
from .objectives import gamma_for_oscillation

_BOOL = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


@dataclass
class ExperimentConfig:
    """Everything needed to rerun one experiment.

    ``gamma`` is given either directly or through the oscillation rule
    ``(gamma_i, gamma_eps)``; setting both, or neither, is an error.
    ``x0 = None`` means ``(1, ..., 1)``; ``x0_random = true`` draws it from
    ``[-2, 2]^n`` with ``seed``.
    """

    problem: str = "power-quadratic"
    n: int = 3
    rho: float = 10.0
    alpha: float = 3.0
    beta: float = 6.0
    gamma: Optional[float] = None
    gamma_i: int = 2
    gamma_eps: Optional[float] = None
    mode: str = "continuous"
    policies: Tuple[str, ...] = ("speed",)
    h_ode: float = 1e-4
    event_tolerance: float = 1e-8
    max_time: float = 100.0
    gradient_stop_tol: float = 1e-13
    horizon: float = 5.0
    compare_unrestarted: bool = False
    h: float = 1e-3
    max_iters: int = 3000
    x0: Optional[Tuple[float, ...]] = None
    x0_random: bool = False
    seed: int = 0
    fit_mode: str = "all"
    fit_window: Optional[Tuple[float, float]] = None
    out: str = "out"

    def validate(self) -> "ExperimentConfig":
        if self.problem != "power-quadratic":
            raise ConfigError("problem", f"unknown problem {self.problem!r}")
        if self.n < 1:
            raise ConfigError("n", "must be a positive integer")
        if not self.rho > 1:
            raise ConfigError("rho", "must be > 1")
        if not self.alpha > 0:
            raise ConfigError("alpha", "must be > 0")
        if not self.beta >= 0:
            raise ConfigError("beta", "must be >= 0")
        if (self.gamma is None) == (self.gamma_eps is None):
            raise ConfigError("gamma", "give exactly one of gamma or gamma_eps")
        if self.gamma is not None and not self.gamma > 0:
            raise ConfigError("gamma", "must be > 0")
        if self.gamma_eps is not None and not self.gamma_eps > 0:
            raise ConfigError("gamma_eps", "must be > 0")
        if not 0 <= self.gamma_i < self.n:
            raise ConfigError("gamma_i", f"must lie in [0, {self.n - 1}]")
        if self.mode not in ("continuous", "discrete"):
            raise ConfigError("mode", "must be continuous or discrete")
        for p in self.policies:
            try:
                RestartPolicy(p)
            except ValueError:
                raise ConfigError("policies", f"unknown policy {p!r}") from None
        if not self.h_ode > 0:
            raise ConfigError("h_ode", "must be > 0")
        if not 0 < self.event_tolerance < self.h_ode:
            raise ConfigError("event_tolerance", "must lie in (0, h_ode)")
        if not self.horizon > 0:
            raise ConfigError("horizon", "must be > 0")
        if not self.max_time >= self.h_ode:
            raise ConfigError("max_time", "must be >= h_ode")
        if not self.h > 0:
            raise ConfigError("h", "must be > 0")
        if self.max_iters < 0:
            raise ConfigError("max_iters", "must be >= 0")
        if self.x0 is not None and len(self.x0) != self.n:
            raise ConfigError("x0", f"needs {self.n} entries")
        if self.fit_mode not in ("all", "restarts"):
            raise ConfigError("fit_mode", "must be all or restarts")
        return self

    def resolved_gamma(self) -> float:
        if self.gamma is not None:
            return float(self.gamma)
        return gamma_for_oscillation(self.alpha, self.beta, self.rho, self.gamma_i, self.gamma_eps)

    def initial_point(self) -> np.ndarray:
        if self.x0_random:
            return np.random.default_rng(self.seed).uniform(-2.0, 2.0, self.n)
        if self.x0 is None:
            return np.ones(self.n)
        return np.asarray(self.x0, dtype=float)


_FIELDS = {f.name: f for f in fields(ExperimentConfig)}


def _parse_value(name: str, raw: str):
    raw = raw.strip()
    default = _FIELDS[name].default
    try:
        if name in ("gamma", "gamma_eps"):
            return None if raw.lower() in ("", "none") else float(raw)
        if name in ("x0", "fit_window"):
            if raw.lower() in ("", "none"):
                return None
            vals = tuple(float(v) for v in raw.split(","))
            if name == "fit_window" and len(vals) != 2:
                raise ValueError("expected two comma-separated numbers")
            return vals
        if name == "policies":
            return tuple(p.strip() for p in raw.split(",") if p.strip())
        if isinstance(default, bool):
            return _BOOL[raw.lower()]
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        return raw
    except (ValueError, KeyError) as exc:
        raise ConfigError(name, f"cannot parse {raw!r}: {exc}") from None


def apply_overrides(cfg: ExperimentConfig, pairs) -> ExperimentConfig:
    """Return a copy with ``key=value`` strings (or ``(key, value)`` pairs) applied."""
    updates = {}
    for item in pairs:
        if isinstance(item, str):
            if "=" not in item:
                raise ConfigError(item, "expected key=value")
            key, value = item.split("=", 1)
        else:
            key, value = item
        key = key.strip().replace("-", "_")
        if key not in _FIELDS:
            raise ConfigError(key, "unknown configuration key")
        updates[key] = _parse_value(key, str(value))
    return dataclasses.replace(cfg, **updates)


def parse_config(text: str, base: Optional[ExperimentConfig] = None) -> ExperimentConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    pairs = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected key = value, got {line!r}")
        pairs.append(tuple(part.strip() for part in line.split("=", 1)))
    return apply_overrides(base or ExperimentConfig(), pairs)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from None
    return parse_config(text)


def _format_value(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ",".join(_format_value(x) for x in v)
    return str(v)


def serialize_config(cfg: ExperimentConfig) -> str:
    return "".join(f"{f.name} = {_format_value(getattr(cfg, f.name))}\n" for f in fields(cfg))
