"""Experiment configuration: INI-style files with built-in defaults.

Sections and keys (all optional)::

    [experiment]   id, seed, n_slots, replications, horizon, workers,
                   power_rule, far_field, tail_fraction
    [sweep]        variable, grid (comma list) or start/stop/num/spacing
    [params]       any SystemParams field; ``<name>_db`` for thresholds and
                   ``<name>_dbm`` (or ``_db``) for powers are converted to
                   linear units
    [bandit]       policies, gamma, etc_m, canonical_discount, static_oracle
    [output]       dir

Unknown sections or keys are rejected so typos do not silently fall back to
defaults.
"""

import configparser
from dataclasses import dataclass, field, fields, replace
import math

import numpy as np

from .bandit import DEFAULT_ETC_M, DEFAULT_GAMMA, POLICIES
from .params import ParamError, SystemParams, db_to_linear, dbm_to_watts
from .relay_sim import POWER_RULES

POWER_FIELDS = {"P_T", "Ptilde_T", "P_S"}
FIG4_POLICIES = ("ucb", "etc", "random", "kl-ucb", "d-ucb", "d-kl-ucb")


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending key."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


def default_grid(variable):
    if variable == "zeta":
        return tuple(np.logspace(-4, -2, 7).tolist())
    if variable == "E_C":
        return tuple(np.linspace(5e-4, 5e-3, 7).tolist())
    return ()


_DEFAULT_SWEEP = {"fig2": "zeta", "fig3": "E_C", "fig4": None, "custom": None}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = "fig2"
    params: SystemParams = field(default_factory=SystemParams)
    sweep_variable: str = None
    grid: tuple = ()
    n_slots: int = 200_000
    replications: int = 20
    horizon: int = 10_000
    policies: tuple = FIG4_POLICIES
    gamma: float = DEFAULT_GAMMA
    etc_m: int = DEFAULT_ETC_M
    canonical_discount: bool = False
    static_oracle: bool = False
    power_rule: str = "transmit"
    far_field: bool = True
    tail_fraction: float = 0.5
    seed: int = 1
    workers: int = 1
    out_dir: str = "results"

    def __post_init__(self):
        if self.experiment not in _DEFAULT_SWEEP:
            raise ConfigError("experiment.id", f"unknown experiment {self.experiment!r}")
        if self.sweep_variable is None and _DEFAULT_SWEEP[self.experiment]:
            object.__setattr__(self, "sweep_variable", _DEFAULT_SWEEP[self.experiment])
        if self.sweep_variable is not None and not self.grid:
            object.__setattr__(self, "grid", default_grid(self.sweep_variable))
        object.__setattr__(self, "grid", tuple(float(g) for g in self.grid))
        self.validate()

    def validate(self):
        if self.seed is None or int(self.seed) < 0:
            raise ConfigError("experiment.seed", "a nonnegative master seed is required")
        if self.experiment in ("fig2", "fig3"):
            if self.sweep_variable not in {f.name for f in fields(SystemParams)}:
                raise ConfigError("sweep.variable", f"unknown parameter {self.sweep_variable!r}")
            if not self.grid:
                raise ConfigError("sweep.grid", "grid must be nonempty")
            if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
                raise ConfigError("sweep.grid", "grid must be strictly increasing")
            for v in self.grid:
                try:
                    self.params.replace(**{self.sweep_variable: v})
                except ParamError as exc:
                    raise ConfigError("sweep.grid", f"value {v!r} invalid: {exc}") from None
            if self.sweep_variable == "E_C" and self.grid[0] <= self.params.E_A:
                raise ConfigError("sweep.grid", "E_C grid values must exceed E_A")
        if self.n_slots < 1:
            raise ConfigError("experiment.n_slots", "must be >= 1")
        if self.replications < 1:
            raise ConfigError("experiment.replications", "must be >= 1")
        if self.horizon < 2:
            raise ConfigError("experiment.horizon", "must be >= 2")
        if self.workers < 1:
            raise ConfigError("experiment.workers", "must be >= 1")
        if not 0.0 < self.tail_fraction <= 1.0:
            raise ConfigError("experiment.tail_fraction", "must lie in (0, 1]")
        if self.power_rule not in POWER_RULES:
            raise ConfigError("experiment.power_rule", f"must be one of {POWER_RULES}")
        if not 0.0 < self.gamma <= 1.0:
            raise ConfigError("bandit.gamma", "must lie in (0, 1]")
        if self.etc_m < 1:
            raise ConfigError("bandit.etc_m", "must be >= 1")
        bad = [p for p in self.policies if p not in POLICIES]
        if bad or not self.policies:
            raise ConfigError("bandit.policies", f"unknown or empty policy list {bad}")

    def replace(self, **changes):
        return replace(self, **changes)

    @property
    def n_chunks(self):
        """Slot chunks per grid point: enough for both the estimates and the bandit runs."""
        return max(self.replications, math.ceil(self.n_slots / self.horizon))

    def point_params(self, value):
        return self.params.replace(**{self.sweep_variable: value})


_SECTIONS = {
    "experiment": {"id", "seed", "n_slots", "replications", "horizon", "workers",
                   "power_rule", "far_field", "tail_fraction"},
    "sweep": {"variable", "grid", "start", "stop", "num", "spacing"},
    "bandit": {"policies", "gamma", "etc_m", "canonical_discount", "static_oracle"},
    "output": {"dir"},
}


def _number(section, key, raw, kind=float):
    try:
        v = float(raw)
        if kind is int:
            if v != int(v):
                raise ValueError
            return int(v)
        return v
    except ValueError:
        raise ConfigError(f"{section}.{key}", f"expected a number, got {raw!r}") from None


def _bool(section, key, raw):
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{section}.{key}", f"expected a boolean, got {raw!r}")


def parse_params(items, base=None):
    """SystemParams from ``(key, value)`` pairs, converting dB-suffixed keys."""
    names = {f.name for f in fields(SystemParams)}
    lower = {n.lower(): n for n in names}
    out = {}
    for key, raw in items:
        k = key.strip()
        unit = None
        for suffix in ("_dbm", "_db"):
            if k.lower().endswith(suffix):
                k, unit = k[: -len(suffix)], suffix
                break
        name = lower.get(k.lower())
        if name is None:
            raise ConfigError(f"params.{key}", "unknown parameter")
        v = _number("params", key, raw)
        if unit is not None:
            v = dbm_to_watts(v) if name in POWER_FIELDS else db_to_linear(v)
        if name in out:
            raise ConfigError(f"params.{key}", "given twice")
        out[name] = v
    try:
        return (base or SystemParams()).replace(**out)
    except ParamError as exc:
        raise ConfigError(f"params.{exc.field}", str(exc).split(": ", 1)[-1]) from None


def _grid(sec):
    if "grid" in sec:
        vals = [v for v in sec["grid"].replace("\n", ",").split(",") if v.strip()]
        return tuple(_number("sweep", "grid", v) for v in vals)
    if "start" in sec or "stop" in sec:
        try:
            start, stop = sec["start"], sec["stop"]
        except KeyError as exc:
            raise ConfigError(f"sweep.{exc.args[0]}", "start and stop go together") from None
        a, b = _number("sweep", "start", start), _number("sweep", "stop", stop)
        num = _number("sweep", "num", sec.get("num", "7"), int)
        spacing = sec.get("spacing", "linear").strip()
        if num < 1:
            raise ConfigError("sweep.num", "must be >= 1")
        if spacing == "log":
            if a <= 0 or b <= 0:
                raise ConfigError("sweep.start", "log spacing needs positive endpoints")
            return tuple(np.logspace(math.log10(a), math.log10(b), num).tolist())
        if spacing == "linear":
            return tuple(np.linspace(a, b, num).tolist())
        raise ConfigError("sweep.spacing", "must be 'linear' or 'log'")
    return ()


def load_config(path=None, text=None, experiment=None):
    """Build an :class:`ExperimentConfig` from a file, a string, or defaults only."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        if path is not None:
            with open(path, encoding="utf-8") as fh:
                cp.read_file(fh)
        elif text is not None:
            cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("file", f"malformed configuration: {exc}") from None
    for name in cp.sections():
        if name not in _SECTIONS and name != "params":
            raise ConfigError(name, "unknown section")
        if name in _SECTIONS:
            for key in cp[name]:
                if key not in _SECTIONS[name]:
                    raise ConfigError(f"{name}.{key}", "unknown key")

    kw = {}
    ex = cp["experiment"] if cp.has_section("experiment") else {}
    exp_id = experiment or ex.get("id", "fig2").strip()
    kw["experiment"] = exp_id
    for key, kind in (("seed", int), ("n_slots", int), ("replications", int), ("horizon", int),
                      ("workers", int), ("tail_fraction", float)):
        if key in ex:
            kw[key] = _number("experiment", key, ex[key], kind)
    if "power_rule" in ex:
        kw["power_rule"] = ex["power_rule"].strip()
    if "far_field" in ex:
        kw["far_field"] = _bool("experiment", "far_field", ex["far_field"])
    if cp.has_section("params"):
        kw["params"] = parse_params(cp.items("params"))
    if cp.has_section("sweep"):
        sw = cp["sweep"]
        if "variable" in sw:
            kw["sweep_variable"] = sw["variable"].strip()
        kw["grid"] = _grid(sw)
    if cp.has_section("bandit"):
        b = cp["bandit"]
        if "policies" in b:
            kw["policies"] = tuple(p.strip() for p in b["policies"].split(",") if p.strip())
        if "gamma" in b:
            kw["gamma"] = _number("bandit", "gamma", b["gamma"])
        if "etc_m" in b:
            kw["etc_m"] = _number("bandit", "etc_m", b["etc_m"], int)
        for key in ("canonical_discount", "static_oracle"):
            if key in b:
                kw[key] = _bool("bandit", key, b[key])
    if cp.has_section("output") and "dir" in cp["output"]:
        kw["out_dir"] = cp["output"]["dir"].strip()
    try:
        return ExperimentConfig(**kw)
    except ParamError as exc:
        raise ConfigError(f"params.{exc.field}", str(exc)) from None
