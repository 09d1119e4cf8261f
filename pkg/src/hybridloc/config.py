"""
JSON scenario files.

Distances are meters and angles degrees in the file; ``to_scenario`` converts
to the radians used internally. Loading then dumping a config reproduces the
same values, because the file-unit numbers are kept as parsed.

Example::

    {
      "schema": 1,
      "sensors": {"s1": [0, 0, 0], "s2": [500, 100, 2000]},
      "target": [1000, 200, 100],
      "noise": {"sigma_r_m": 10, "sigma_az_deg": 1, "sigma_el_deg": 1},
      "estimator": {"iterations": 2},
      "ml": {"max_iterations": 50, "step_tolerance_m": 1e-8},
      "runs": 10000,
      "seed": 1
    }
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ConfigError
from .estimator import EstimatorOptions
from .geometry import NoiseModel, SensorPair
from .montecarlo import SWEEP_SIGMA_ANGLE_PER_RHO, SWEEP_SIGMA_R_PER_RHO, Scenario
from .reference import MlOptions

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ScenarioConfig:
    s1: tuple[float, float, float]
    s2: tuple[float, float, float]
    target: tuple[float, float, float]
    sigma_r_m: float
    sigma_az: float
    sigma_el: float
    iterations: int = 2
    ml_max_iterations: int = 50
    ml_step_tolerance_m: float = 1e-8
    runs: int = 10_000
    seed: int = 0
    sweep_sigma_r_m_per_rho: float = SWEEP_SIGMA_R_PER_RHO
    sweep_sigma_angle_rad_per_rho: float = SWEEP_SIGMA_ANGLE_PER_RHO
    radians: bool = False  # sigma_az / sigma_el given in radians instead of degrees

    def angle_to_rad(self, value: float) -> float:
        return value if self.radians else math.radians(value)

    def noise(self) -> NoiseModel:
        return NoiseModel(self.sigma_r_m, self.angle_to_rad(self.sigma_az), self.angle_to_rad(self.sigma_el))

    def sensors(self) -> SensorPair:
        return SensorPair(np.array(self.s1), np.array(self.s2))

    def to_scenario(self, runs: int | None = None, seed: int | None = None) -> Scenario:
        return Scenario(
            sensors=self.sensors(),
            target=np.array(self.target),
            noise=self.noise(),
            estimator_opts=EstimatorOptions(refinement_iterations=self.iterations),
            ml_opts=MlOptions(self.ml_max_iterations, self.ml_step_tolerance_m),
            runs=self.runs if runs is None else runs,
            master_seed=self.seed if seed is None else seed,
        )

    def to_dict(self) -> dict[str, Any]:
        """File representation; angle units follow ``radians``."""
        unit = "rad" if self.radians else "deg"
        return {
            "schema": SCHEMA_VERSION,
            "sensors": {"s1": list(self.s1), "s2": list(self.s2)},
            "target": list(self.target),
            "noise": {
                "sigma_r_m": self.sigma_r_m,
                f"sigma_az_{unit}": self.sigma_az,
                f"sigma_el_{unit}": self.sigma_el,
            },
            "estimator": {"iterations": self.iterations},
            "ml": {"max_iterations": self.ml_max_iterations, "step_tolerance_m": self.ml_step_tolerance_m},
            "sweep": {
                "sigma_r_m_per_rho": self.sweep_sigma_r_m_per_rho,
                "sigma_angle_rad_per_rho": self.sweep_sigma_angle_rad_per_rho,
            },
            "runs": self.runs,
            "seed": self.seed,
        }


_MISSING = object()


def _get(d: dict, path: str, default=_MISSING):
    cur: Any = d
    for key in path.split("."):
        if not isinstance(cur, dict) or key not in cur:
            if default is _MISSING:
                raise ConfigError(f"missing required field '{path}'")
            return default
        cur = cur[key]
    return cur


def _number(d: dict, path: str, default=_MISSING) -> float:
    v = _get(d, path, default)
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"field '{path}' must be a finite number, got {v!r}")
    return float(v)


def _integer(d: dict, path: str, default=_MISSING) -> int:
    v = _get(d, path, default)
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"field '{path}' must be an integer, got {v!r}")
    return v


def _vec3(d: dict, path: str) -> tuple[float, float, float]:
    v = _get(d, path)
    if not isinstance(v, list) or len(v) != 3:
        raise ConfigError(f"field '{path}' must be an array of 3 numbers, got {v!r}")
    out = []
    for i, x in enumerate(v):
        if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
            raise ConfigError(f"field '{path}[{i}]' must be a finite number, got {x!r}")
        out.append(float(x))
    return tuple(out)


def parse_config(data: dict, radians: bool = False) -> ScenarioConfig:
    """Validate a decoded config document.

    With ``radians=True`` the angular sigmas may be given as ``sigma_az_rad`` /
    ``sigma_el_rad`` (or under the ``_deg`` names, read as radians).
    """
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    schema = _get(data, "schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema {schema!r}; expected {SCHEMA_VERSION}")
    noise = _get(data, "noise")
    if radians:
        az_key = "noise.sigma_az_rad" if isinstance(noise, dict) and "sigma_az_rad" in noise else "noise.sigma_az_deg"
        el_key = "noise.sigma_el_rad" if isinstance(noise, dict) and "sigma_el_rad" in noise else "noise.sigma_el_deg"
    else:
        az_key, el_key = "noise.sigma_az_deg", "noise.sigma_el_deg"
    cfg = ScenarioConfig(
        s1=_vec3(data, "sensors.s1"),
        s2=_vec3(data, "sensors.s2"),
        target=_vec3(data, "target"),
        sigma_r_m=_number(data, "noise.sigma_r_m"),
        sigma_az=_number(data, az_key),
        sigma_el=_number(data, el_key),
        iterations=_integer(data, "estimator.iterations", 2),
        ml_max_iterations=_integer(data, "ml.max_iterations", 50),
        ml_step_tolerance_m=_number(data, "ml.step_tolerance_m", 1e-8),
        runs=_integer(data, "runs", 10_000),
        seed=_integer(data, "seed", 0),
        sweep_sigma_r_m_per_rho=_number(data, "sweep.sigma_r_m_per_rho", SWEEP_SIGMA_R_PER_RHO),
        sweep_sigma_angle_rad_per_rho=_number(data, "sweep.sigma_angle_rad_per_rho", SWEEP_SIGMA_ANGLE_PER_RHO),
        radians=radians,
    )
    # surface range/consistency errors at load time
    cfg.to_scenario()
    return cfg


def load_config(path: str | Path, radians: bool = False) -> ScenarioConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return parse_config(data, radians=radians)


def dump_config(cfg: ScenarioConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2) + "\n"
