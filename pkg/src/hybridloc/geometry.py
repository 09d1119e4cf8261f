"""
Forward measurement model for one ground sensor and one UAV relay.

The ground sensor ``s1`` measures the azimuth/elevation of the source, and the
pair (s1, s2) yields one range difference ``r = ||u - s2|| - ||u - s1||``.
Ranges are in meters and angles in radians throughout; time differences must be
multiplied by the propagation speed before they reach this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, DegenerateGeometry, NearSingularElevation

COINCIDENCE_TOL = 1e-9  # m, source/sensor coincidence
HORIZONTAL_TOL = 1e-6  # m, horizontal offset below which azimuth is undefined


def as_position(u, name: str = "position") -> np.ndarray:
    """Coerce ``u`` to a finite float 3-vector."""
    arr = np.asarray(u, dtype=float)
    if arr.shape != (3,):
        raise ConfigError(f"{name} must have 3 coordinates, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ConfigError(f"{name} must be finite, got {arr.tolist()}")
    return arr


def wrap_angle(a: float) -> float:
    """Map an angle onto (-pi, pi]. In-range input is returned unchanged."""
    a = float(a)
    if -np.pi < a <= np.pi:
        return a
    return float(np.pi - np.mod(np.pi - a, 2.0 * np.pi))


@dataclass(frozen=True)
class SensorPair:
    """Ground sensor ``s1`` (takes the AOA) and UAV ``s2``, meters."""

    s1: np.ndarray
    s2: np.ndarray

    def __post_init__(self):
        s1 = as_position(self.s1, "s1")
        s2 = as_position(self.s2, "s2")
        if np.linalg.norm(s1 - s2) <= COINCIDENCE_TOL:
            raise ConfigError("s1 and s2 must be distinct")
        object.__setattr__(self, "s1", s1)
        object.__setattr__(self, "s2", s2)

    @property
    def baseline(self) -> float:
        return float(np.linalg.norm(self.s1 - self.s2))


class MeasurementVector(NamedTuple):
    """Range difference ``r`` (m), azimuth ``phi`` and elevation ``theta`` (rad)."""

    r: float
    phi: float
    theta: float

    def as_array(self) -> np.ndarray:
        return np.array([self.r, self.phi, self.theta], dtype=float)


@dataclass(frozen=True)
class NoiseModel:
    """Independent zero-mean Gaussian noise on (r, phi, theta).

    Standard deviations must be finite and non-negative. A zero sigma means
    that component is exact; the estimators then fall back to the limiting
    form of their covariance expressions (see ``linalg.information_inverse``).
    """

    sigma_r: float
    sigma_phi: float
    sigma_theta: float

    def __post_init__(self):
        for name in ("sigma_r", "sigma_phi", "sigma_theta"):
            v = float(getattr(self, name))
            if not np.isfinite(v) or v < 0.0:
                raise ConfigError(f"{name} must be finite and >= 0, got {v}")
            object.__setattr__(self, name, v)

    @property
    def sigmas(self) -> np.ndarray:
        return np.array([self.sigma_r, self.sigma_phi, self.sigma_theta])

    @property
    def covariance(self) -> np.ndarray:
        return np.diag(self.sigmas**2)

    @property
    def is_positive(self) -> bool:
        return bool(np.all(self.sigmas > 0.0))

    def scaled(self, factor: float) -> NoiseModel:
        return NoiseModel(self.sigma_r * factor, self.sigma_phi * factor, self.sigma_theta * factor)


def true_measurement(u, sensors: SensorPair) -> MeasurementVector:
    """Noise-free range difference and AOA of source ``u``.

    Raises:
        DegenerateGeometry: ``u`` coincides with a sensor.
        NearSingularElevation: ``u`` lies on the vertical through ``s1``.
    """
    u = np.asarray(u, dtype=float)
    d1 = u - sensors.s1
    n1 = np.linalg.norm(d1)
    n2 = np.linalg.norm(u - sensors.s2)
    if n1 <= COINCIDENCE_TOL or n2 <= COINCIDENCE_TOL:
        raise DegenerateGeometry("source coincides with a sensor")
    horiz = np.hypot(d1[0], d1[1])
    if horiz < HORIZONTAL_TOL:
        raise NearSingularElevation("source is vertically aligned with the ground sensor")
    phi = np.arctan2(d1[1], d1[0])
    # projection onto the azimuth direction is >= 0 by construction of phi
    theta = np.arctan2(d1[2], d1[0] * np.cos(phi) + d1[1] * np.sin(phi))
    return MeasurementVector(float(n2 - n1), wrap_angle(phi), float(theta))


def direction_vector(phi: float, theta: float) -> np.ndarray:
    """Unit line-of-sight vector for azimuth ``phi`` and elevation ``theta``."""
    ct = np.cos(theta)
    return np.array([ct * np.cos(phi), ct * np.sin(phi), np.sin(theta)])


def aoa_basis(phi: float, theta: float) -> tuple[np.ndarray, np.ndarray]:
    """Unit normals ``alpha`` (azimuth plane) and ``beta`` (elevation plane).

    Both are orthogonal to ``direction_vector(phi, theta)``, so
    ``alpha @ (u - s1) == 0`` and ``beta @ (u - s1) == 0`` at the true angles.
    """
    sp, cp = np.sin(phi), np.cos(phi)
    st, ct = np.sin(theta), np.cos(theta)
    alpha = np.array([sp, -cp, 0.0])
    beta = np.array([st * cp, st * sp, -ct])
    return alpha, beta


def sample_measurement(u, sensors: SensorPair, noise: NoiseModel, rng: np.random.Generator) -> MeasurementVector:
    """Draw one noisy measurement; consumes exactly three standard normals from ``rng``."""
    m = true_measurement(u, sensors)
    z = rng.standard_normal(3)
    dm = z * noise.sigmas
    return MeasurementVector(float(m.r + dm[0]), wrap_angle(m.phi + dm[1]), float(m.theta + dm[2]))
