"""Scenario configuration files (TOML).

Schema::

    scenario = "brick_incline"   # one of scenarios.SCENARIOS
    dt = 1e-4                    # time step (s)
    duration = 2.0               # simulated time (s)
    output_every = 1             # record every n-th step

    [params]     # keyword arguments of the scenario builder (alpha, v0, m_top, ...)
    [friction]   # FrictionParams overrides (mu_s, k_e, damping_mode, roll_model, ...)
    [sweep]      # grid for `frictionlab sweep`
    [compare]    # legacy model settings for `frictionlab compare-roll-models`

Sweep axes are explicit lists or inline ranges such as
``{ start = 2.0, stop = 30.0, count = 10 }`` (inclusive, evenly spaced).
The sphere phase map uses ``alpha_deg`` and ``eta_r``; the stacking table
uses ``eta_r`` together with optional ``lo``, ``hi`` and ``tol`` for the
critical-mass bisection.
"""

from __future__ import annotations

import dataclasses
import inspect
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Union

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import scenarios
from .friction import FrictionParams

log = logging.getLogger(__name__)

DT_BAND = (1e-6, 1e-3)
_TOP_KEYS = {"scenario", "dt", "duration", "output_every", "params", "friction", "sweep", "compare"}
_RESERVED = {"dt", "duration", "every", "friction"}
_COMPARE_KEYS = {"mu_r", "legacy_guard"}


class ConfigError(ValueError):
    """Raised for unreadable or invalid configuration."""


@dataclass
class ScenarioConfig:
    scenario: str
    dt: float = 1e-4
    duration: float = 1.0
    output_every: int = 1
    params: Dict[str, Any] = field(default_factory=dict)
    friction: Dict[str, Any] = field(default_factory=dict)
    sweep: Dict[str, Any] = field(default_factory=dict)
    compare: Dict[str, Any] = field(default_factory=dict)

    def builder(self):
        return getattr(scenarios, self.scenario)

    def build(self, **overrides) -> "scenarios.Setup":
        """Fresh :class:`scenarios.Setup` for this config; ``overrides`` patch ``params``."""
        kwargs = dict(self.params)
        friction = dict(self.friction)
        friction.update(overrides.pop("friction", {}))
        kwargs.update(overrides)
        return self.builder()(dt=self.dt, duration=self.duration, every=self.output_every,
                              friction=friction, **kwargs)


def _number(raw: dict, key: str, default, kind=float):
    value = raw.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    if kind is int and value != int(value):
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    return kind(value)


def _table(raw: dict, key: str) -> dict:
    value = raw.get(key, {})
    if not isinstance(value, dict):
        raise ConfigError(f"[{key}] must be a table")
    return dict(value)


def grid_values(spec: Union[list, dict], name: str) -> List[float]:
    """Values of a sweep axis: an explicit list or ``{start, stop, count}`` (inclusive)."""
    if isinstance(spec, dict):
        if set(spec) != {"start", "stop", "count"}:
            raise ConfigError(f"sweep.{name} range needs exactly start, stop and count")
        start, stop = float(spec["start"]), float(spec["stop"])
        count = spec["count"]
        if isinstance(count, bool) or not isinstance(count, int) or count < 1:
            raise ConfigError(f"sweep.{name}.count must be a positive integer")
        if count == 1:
            return [start]
        return [start + (stop - start) * k / (count - 1) for k in range(count)]
    if not isinstance(spec, list) or not spec:
        raise ConfigError(f"sweep.{name} must be a non-empty list or a range table")
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in spec):
        raise ConfigError(f"sweep.{name} must contain numbers only")
    return [float(v) for v in spec]


def validate(cfg: ScenarioConfig) -> ScenarioConfig:
    if cfg.scenario not in scenarios.SCENARIOS:
        raise ConfigError(f"unknown scenario {cfg.scenario!r}; "
                          f"choose from {', '.join(scenarios.SCENARIOS)}")
    if not (math.isfinite(cfg.dt) and cfg.dt > 0):
        raise ConfigError(f"dt must be positive and finite, got {cfg.dt!r}")
    if not DT_BAND[0] <= cfg.dt <= DT_BAND[1]:
        log.warning("dt = %g lies outside the usual band [%g, %g]", cfg.dt, *DT_BAND)
    if not (math.isfinite(cfg.duration) and cfg.duration > 0):
        raise ConfigError(f"duration must be positive and finite, got {cfg.duration!r}")
    if cfg.output_every < 1:
        raise ConfigError("output_every must be at least 1")

    accepted = set(inspect.signature(cfg.builder()).parameters) - _RESERVED
    unknown = set(cfg.params) - accepted
    if unknown:
        raise ConfigError(f"unknown [params] keys for {cfg.scenario}: {sorted(unknown)}; "
                          f"accepted: {sorted(accepted)}")
    fields = {f.name for f in dataclasses.fields(FrictionParams)}
    unknown = set(cfg.friction) - fields
    if unknown:
        raise ConfigError(f"unknown [friction] keys: {sorted(unknown)}")
    unknown = set(cfg.compare) - _COMPARE_KEYS
    if unknown:
        raise ConfigError(f"unknown [compare] keys: {sorted(unknown)}")
    for name in ("alpha_deg", "eta_r"):
        if name in cfg.sweep:
            grid_values(cfg.sweep[name], name)

    # building once surfaces value errors from the builders and FrictionParams
    try:
        cfg.build()
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid {cfg.scenario} configuration: {exc}") from exc
    return cfg


def from_dict(raw: dict) -> ScenarioConfig:
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    if "scenario" not in raw:
        raise ConfigError("missing 'scenario'")
    cfg = ScenarioConfig(
        scenario=str(raw["scenario"]),
        dt=_number(raw, "dt", 1e-4),
        duration=_number(raw, "duration", 1.0),
        output_every=_number(raw, "output_every", 1, int),
        params=_table(raw, "params"),
        friction=_table(raw, "friction"),
        sweep=_table(raw, "sweep"),
        compare=_table(raw, "compare"),
    )
    return validate(cfg)


def load(path: Union[str, Path]) -> ScenarioConfig:
    """Read and validate a TOML config file."""
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    return from_dict(raw)
