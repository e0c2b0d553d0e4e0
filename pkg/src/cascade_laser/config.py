"""Flat ``key=value`` run configuration with validation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .core import SystemParams, threshold_epsilon
from .errors import ConfigError, DomainError

COMMANDS = ("coeffs", "variance", "spectrum", "photon", "power", "mc", "oracle",
            "figure", "sweep", "report")
SWEEPABLE = ("A", "kappa", "beta", "epsilon", "r")

# key -> (parser, default)
_FLOAT, _INT, _STR = float, int, str
DEFAULTS: dict = {
    "command": (_STR, "coeffs"),
    "figure": (_STR, None),
    "kappa": (_FLOAT, 0.8),
    "A": (_FLOAT, 100.0),
    "beta": (_FLOAT, 0.01),
    "epsilon": (_STR, "0.2"),
    "r": (_FLOAT, 1.0),
    "beta_min": (_FLOAT, 0.0),
    "beta_max": (_FLOAT, 1.0),
    "n_beta": (_INT, 400),
    "omega_min": (_FLOAT, -5.0),
    "omega_max": (_FLOAT, 5.0),
    "n_omega": (_INT, 400),
    "t_end": (_FLOAT, 20.0),
    "n_t": (_INT, 400),
    "n_traj": (_INT, 10_000),
    "dt": (_FLOAT, None),
    "mc_t_end": (_FLOAT, None),
    "n_records": (_INT, 100),
    "seed": (_INT, 0),
    "sweep_var": (_STR, "beta"),
    "sweep_min": (_FLOAT, 0.0),
    "sweep_max": (_FLOAT, 1.0),
    "sweep_n": (_INT, 400),
    "quantity": (_STR, "cavity_minus"),
    "workers": (_INT, 1),
    "n_points": (_INT, 400),
    "report_sets": (_INT, 10),
    "out": (_STR, None),
}
ALIASES = {"linear_gain": "A", "squeeze_r": "r", "ntraj": "n_traj", "eps": "epsilon"}


@dataclass(frozen=True)
class Grid:
    start: float
    stop: float
    n: int

    def __post_init__(self):
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ConfigError("grid bounds must be finite")
        if self.n < 2:
            raise ConfigError(f"grid needs at least 2 points, got {self.n}")
        if not self.stop > self.start:
            raise ConfigError(f"grid stop {self.stop} must exceed start {self.start}")


@dataclass(frozen=True)
class SweepSpec:
    """Scan of one parameter with the others held at ``fixed``."""

    variable: str
    start: float
    stop: float
    n_points: int
    fixed: SystemParams
    epsilon_at_threshold: bool = False

    def __post_init__(self):
        if self.variable not in SWEEPABLE:
            raise ConfigError(f"sweep_var must be one of {SWEEPABLE}, got {self.variable!r}")
        if self.variable == "epsilon" and self.epsilon_at_threshold:
            raise ConfigError("sweep_var=epsilon conflicts with epsilon=threshold")
        Grid(self.start, self.stop, self.n_points)

    def points(self):
        import numpy as np
        return np.linspace(self.start, self.stop, self.n_points)

    def params_at(self, value: float) -> SystemParams:
        p = self.fixed.replace(**{_FIELD[self.variable]: float(value)})
        return p.at_threshold() if self.epsilon_at_threshold else p


_FIELD = {"A": "linear_gain", "kappa": "kappa", "beta": "beta", "epsilon": "epsilon",
          "r": "squeeze_r"}


@dataclass(frozen=True)
class MonteCarloConfig:
    n_traj: int
    dt: Optional[float]
    t_end: Optional[float]
    seed: int
    n_records: int


@dataclass(frozen=True)
class RunConfig:
    params: SystemParams
    command: str
    figure: Optional[str] = None
    epsilon_at_threshold: bool = False
    beta_grid: Grid = None
    omega_grid: Grid = None
    t_grid: Grid = None
    mc: MonteCarloConfig = None
    sweep: Optional[SweepSpec] = None
    quantity: str = "cavity_minus"
    workers: int = 1
    n_points: int = 400
    report_sets: int = 10
    out: Optional[str] = None
    raw: Mapping[str, object] = field(default_factory=dict)


def parse_lines(text: str) -> dict:
    """Split ``key=value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


def _canonical(key: str) -> str:
    key = ALIASES.get(key, key)
    if key not in DEFAULTS:
        raise ConfigError(f"unknown key {key!r}")
    return key


def _convert(key: str, value):
    parser = DEFAULTS[key][0]
    if value is None or isinstance(value, parser) and not isinstance(value, bool):
        return value
    text = str(value).strip()
    if parser is not _STR and text.lower() in ("none", ""):
        return None
    try:
        return parser(text)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {text!r} as {parser.__name__}")


def parse_config(text: str = "", overrides: Optional[Mapping[str, object]] = None) -> RunConfig:
    """Build a validated :class:`RunConfig`.

    ``overrides`` (typically from command-line flags) win over ``text``.
    ``epsilon=threshold`` resolves to the threshold value for the other
    parameters.  Every problem raises :class:`ConfigError` naming the key.
    """
    merged = {}
    for source in (parse_lines(text or ""), dict(overrides or {})):
        for k, v in source.items():
            if v is not None:
                merged[_canonical(k)] = v
    values = {k: _convert(k, merged.get(k, d)) for k, (_, d) in DEFAULTS.items()}

    command = values["command"]
    if command not in COMMANDS:
        raise ConfigError(f"command: unknown command {command!r}; choose from {COMMANDS}")

    eps_text = str(values["epsilon"]).strip().lower()
    at_threshold = eps_text == "threshold"
    try:
        epsilon = 0.0 if at_threshold else float(eps_text)
    except ValueError:
        raise ConfigError(f"epsilon: expected a number or 'threshold', got {values['epsilon']!r}")

    for key in ("kappa", "A", "beta", "r"):
        if not math.isfinite(values[key]):
            raise ConfigError(f"{key}: must be finite")
    try:
        params = SystemParams(values["A"], values["kappa"], values["beta"], epsilon, values["r"])
        if at_threshold:
            if threshold_epsilon(params) < 0:
                raise ConfigError("epsilon=threshold: threshold epsilon is negative for "
                                  "these parameters (requires eps_th >= 0)")
            params = params.at_threshold()
    except DomainError as exc:
        raise ConfigError(_name_invariant(str(exc)))

    for key in ("n_traj", "n_records", "workers", "n_points", "report_sets"):
        if values[key] < 1:
            raise ConfigError(f"{key}: must be >= 1, got {values[key]}")
    if values["n_traj"] < 2:
        raise ConfigError("n_traj: must be >= 2 to estimate standard errors")
    if values["n_points"] < 2:
        raise ConfigError("n_points: must be >= 2")
    for key in ("dt", "mc_t_end", "t_end"):
        v = values[key]
        if v is not None and not (math.isfinite(v) and v > 0):
            raise ConfigError(f"{key}: must be finite and > 0, got {v}")
    if values["seed"] < 0 or values["seed"] >= 2**64:
        raise ConfigError("seed: must be an unsigned 64-bit integer")
    if values["quantity"] not in _quantities():
        raise ConfigError(f"quantity: unknown quantity {values['quantity']!r}; "
                          f"choose from {sorted(_quantities())}")

    def grid(prefix, lo, hi, n):
        try:
            return Grid(values[lo], values[hi], values[n])
        except ConfigError as exc:
            raise ConfigError(f"{prefix} grid: {exc}")

    beta_grid = grid("beta", "beta_min", "beta_max", "n_beta")
    if beta_grid.start < 0:
        raise ConfigError("beta_min: must be >= 0")
    omega_grid = grid("omega", "omega_min", "omega_max", "n_omega")
    t_grid = Grid(0.0, values["t_end"], values["n_t"]) if values["n_t"] >= 2 else None
    if t_grid is None:
        raise ConfigError("n_t: must be >= 2")

    sweep = None
    if command == "sweep":
        try:
            sweep = SweepSpec(values["sweep_var"], values["sweep_min"], values["sweep_max"],
                              values["sweep_n"], params, at_threshold)
        except ConfigError as exc:
            raise ConfigError(f"sweep: {exc}")

    mc = MonteCarloConfig(values["n_traj"], values["dt"], values["mc_t_end"], values["seed"],
                          values["n_records"])
    return RunConfig(params=params, command=command, figure=values["figure"],
                     epsilon_at_threshold=at_threshold, beta_grid=beta_grid,
                     omega_grid=omega_grid, t_grid=t_grid, mc=mc, sweep=sweep,
                     quantity=values["quantity"], workers=values["workers"],
                     n_points=values["n_points"], report_sets=values["report_sets"],
                     out=values["out"], raw=dict(merged))


def _quantities():
    from .analytics import QUANTITIES
    return QUANTITIES


_PARAM_KEYS = {"linear_gain": "A", "kappa": "kappa", "beta": "beta", "epsilon": "epsilon",
               "squeeze_r": "r"}


def _name_invariant(message: str) -> str:
    # prefix the config key so the diagnostic names it
    for fld, key in _PARAM_KEYS.items():
        if message.startswith(fld) or message.startswith(key + " "):
            return f"{key}: {message}"
    return message
