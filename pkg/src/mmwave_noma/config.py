"""Scenario configuration: strict JSON with defaults for everything but users."""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

SWEEP_VARIABLES = ("snr_db", "beta", "g2")
BEAM_MODES = ("ideal", "physical")


@dataclass(frozen=True)
class UserConfig:
    avg_power_db: float
    direction_cos: float

    def __post_init__(self):
        if not -1.0 <= self.direction_cos <= 1.0:
            raise ConfigError(f"direction_cos {self.direction_cos} outside [-1, 1]")
        if not np.isfinite(self.avg_power_db):
            raise ConfigError("avg_power_db must be finite")

    @property
    def avg_power(self) -> float:
        return float(10.0 ** (self.avg_power_db / 10.0))


@dataclass(frozen=True)
class SweepSpec:
    """Either an explicit value list or start/stop/points with a spacing."""

    variable: str
    start: float = None
    stop: float = None
    points: int = None
    spacing: str = "linear"
    values: tuple = None

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigError(f"sweep variable must be one of {SWEEP_VARIABLES}")
        if self.values is not None:
            object.__setattr__(self, "values", tuple(float(v) for v in self.values))
            if not self.values:
                raise ConfigError("sweep values list is empty")
            if any(x is not None for x in (self.start, self.stop, self.points)):
                raise ConfigError("give either values or start/stop/points, not both")
        else:
            if None in (self.start, self.stop, self.points):
                raise ConfigError("sweep needs start, stop and points (or a values list)")
            if int(self.points) < 1:
                raise ConfigError("sweep needs at least one point")
            if self.spacing not in ("linear", "log"):
                raise ConfigError("sweep spacing must be linear or log")
            if self.spacing == "log" and (self.start <= 0 or self.stop <= 0):
                raise ConfigError("log spacing needs positive endpoints")

    def grid(self) -> np.ndarray:
        if self.values is not None:
            return np.asarray(self.values, dtype=float)
        if self.spacing == "log":
            return np.geomspace(self.start, self.stop, int(self.points))
        return np.linspace(self.start, self.stop, int(self.points))


@dataclass(frozen=True)
class ScenarioConfig:
    users: tuple
    n_antennas: int = 32
    noise_power: float = 1.0
    power_split: tuple = (0.25, 0.75)   # (strong, weak)
    beam_mode: str = "ideal"
    sweep: SweepSpec = None
    seed: int = 0
    snr_db: float = 20.0
    beta: float = 3.0                   # channel-gain ratio for the gain-split sweep
    beam_widths_over_min: tuple = (1.0, 2.0, 4.0, 8.0)

    def __post_init__(self):
        object.__setattr__(self, "users", tuple(self.users))
        object.__setattr__(self, "power_split", tuple(float(x) for x in self.power_split))
        object.__setattr__(self, "beam_widths_over_min",
                           tuple(float(x) for x in self.beam_widths_over_min))
        if not self.users:
            raise ConfigError("config needs at least one user")
        if self.n_antennas < 1:
            raise ConfigError("n_antennas must be positive")
        if self.noise_power <= 0:
            raise ConfigError("noise_power must be positive")
        if self.beam_mode not in BEAM_MODES:
            raise ConfigError(f"beam_mode must be one of {BEAM_MODES}")
        split = self.power_split
        if len(split) != 2 or any(s < 0 for s in split) or abs(sum(split) - 1.0) > 1e-9:
            raise ConfigError("power_split must be two nonnegative fractions summing to 1")
        if any(m <= 0 for m in self.beam_widths_over_min):
            raise ConfigError("beam width multipliers must be positive")
        if self.beta <= 0:
            raise ConfigError("beta must be positive")

    def to_dict(self) -> dict:
        out = {
            "n_antennas": self.n_antennas,
            "noise_power": self.noise_power,
            "users": [{"avg_power_db": u.avg_power_db, "direction_cos": u.direction_cos}
                      for u in self.users],
            "power_split": list(self.power_split),
            "beam_mode": self.beam_mode,
            "seed": self.seed,
            "snr_db": self.snr_db,
            "beta": self.beta,
            "beam_widths_over_min": list(self.beam_widths_over_min),
        }
        if self.sweep is not None:
            sw = {"variable": self.sweep.variable}
            if self.sweep.values is not None:
                sw["values"] = list(self.sweep.values)
            else:
                sw.update(start=self.sweep.start, stop=self.sweep.stop,
                          points=self.sweep.points, spacing=self.sweep.spacing)
            out["sweep"] = sw
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _reject_unknown(data, allowed, where):
    unknown = set(data) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where}")


def _parse_sweep(data) -> SweepSpec:
    _reject_unknown(data, ("variable", "start", "stop", "points", "spacing", "values"),
                    "sweep")
    if "variable" not in data:
        raise ConfigError("sweep needs a variable")
    return SweepSpec(
        variable=data["variable"],
        start=data.get("start"), stop=data.get("stop"),
        points=data.get("points"), spacing=data.get("spacing", "linear"),
        values=tuple(data["values"]) if "values" in data else None,
    )


def from_dict(data: dict) -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    allowed = ("n_antennas", "noise_power", "users", "power_split", "beam_mode",
               "sweep", "seed", "snr_db", "beta", "beam_widths_over_min")
    _reject_unknown(data, allowed, "config")
    if "users" not in data or not isinstance(data["users"], list):
        raise ConfigError("config needs a users list")
    users = []
    for i, entry in enumerate(data["users"]):
        if not isinstance(entry, dict):
            raise ConfigError(f"users[{i}] must be an object")
        _reject_unknown(entry, ("avg_power_db", "direction_cos"), f"users[{i}]")
        try:
            users.append(UserConfig(float(entry["avg_power_db"]),
                                    float(entry["direction_cos"])))
        except KeyError as missing:
            raise ConfigError(f"users[{i}] missing key {missing}") from None
    kwargs = {}
    for key in ("n_antennas", "noise_power", "seed", "snr_db", "beta"):
        if key in data:
            kwargs[key] = data[key]
    if "power_split" in data:
        kwargs["power_split"] = tuple(data["power_split"])
    if "beam_mode" in data:
        kwargs["beam_mode"] = data["beam_mode"]
    if "beam_widths_over_min" in data:
        kwargs["beam_widths_over_min"] = tuple(data["beam_widths_over_min"])
    if "sweep" in data and data["sweep"] is not None:
        kwargs["sweep"] = _parse_sweep(data["sweep"])
    try:
        return ScenarioConfig(users=tuple(users), **kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def loads(text: str) -> ScenarioConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config parse error at line {exc.lineno}, column {exc.colno}: "
                          f"{exc.msg}") from None
    return from_dict(data)


def load_config(path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())
