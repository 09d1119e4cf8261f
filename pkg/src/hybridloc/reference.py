"""CRLB and a Gauss-Newton maximum likelihood baseline."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, LocalizationError, NearSingularElevation, SingularSystem
from .estimator import COS_ELEVATION_TOL, PositionEstimate
from .geometry import MeasurementVector, NoiseModel, SensorPair, aoa_basis, as_position, true_measurement, wrap_angle
from .linalg import RCOND_TOL, check_conditioning, information_inverse, row_equilibration, symmetrize


@dataclass(frozen=True)
class CrlbResult:
    """Fisher information, its inverse, and ``sqrt(trace(crlb))`` in meters.

    ``fim`` is None when a noise sigma is zero (infinite information); the
    bound itself is still finite in that case.
    """

    fim: np.ndarray | None
    crlb: np.ndarray
    rmse_bound: float


@dataclass(frozen=True)
class MlOptions:
    max_iterations: int = 50
    step_tolerance: float = 1e-8
    initial_guess: np.ndarray | None = None

    def __post_init__(self):
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise ConfigError(f"max_iterations must be an integer >= 1, got {self.max_iterations}")
        if not (np.isfinite(self.step_tolerance) and self.step_tolerance > 0):
            raise ConfigError(f"step_tolerance must be positive, got {self.step_tolerance}")
        if self.initial_guess is not None:
            object.__setattr__(self, "initial_guess", as_position(self.initial_guess, "initial_guess"))


def measurement_jacobian(u, sensors: SensorPair) -> np.ndarray:
    """Rows are the gradients of (r, phi, theta) with respect to ``u``.

    The azimuth row is ``-alpha / (R cos(theta))``, the exact gradient of
    ``atan2``; flipping its sign leaves the Fisher information unchanged.
    """
    u = np.asarray(u, dtype=float)
    m = true_measurement(u, sensors)
    ct = np.cos(m.theta)
    if ct < COS_ELEVATION_TOL:
        raise NearSingularElevation(f"cos(elevation) below {COS_ELEVATION_TOL:g}")
    d1 = u - sensors.s1
    d2 = u - sensors.s2
    dist1 = np.linalg.norm(d1)
    alpha, beta = aoa_basis(m.phi, m.theta)
    grad_r = d2 / np.linalg.norm(d2) - d1 / dist1
    grad_phi = -alpha / (dist1 * ct)
    grad_theta = -beta / dist1
    return np.vstack([grad_r, grad_phi, grad_theta])


def crlb(u, sensors: SensorPair, noise: NoiseModel, singular_tolerance: float = RCOND_TOL) -> CrlbResult:
    J = measurement_jacobian(u, sensors)
    q = noise.covariance
    fim = None
    if noise.is_positive:
        fim = symmetrize(J.T @ (J / np.diag(q)[:, None]))
        check_conditioning(fim, singular_tolerance, "Fisher information")
    bound = information_inverse(J, q, singular_tolerance)
    return CrlbResult(fim, bound, float(np.sqrt(max(np.trace(bound), 0.0))))


def measurement_residual(m: MeasurementVector, u, sensors: SensorPair) -> np.ndarray:
    """``m - h(u)`` with the azimuth component wrapped onto (-pi, pi]."""
    pred = true_measurement(u, sensors)
    res = m.as_array() - pred.as_array()
    res[1] = wrap_angle(res[1])
    return res


def weighted_cost(m: MeasurementVector, u, sensors: SensorPair, noise: NoiseModel) -> float:
    res = measurement_residual(m, u, sensors)
    return float(np.sum(res**2 / noise.sigmas**2))


def ml_locate(
    m: MeasurementVector,
    sensors: SensorPair,
    noise: NoiseModel,
    opts: MlOptions,
    singular_tolerance: float = RCOND_TOL,
) -> PositionEstimate:
    """Undamped Gauss-Newton on the Gaussian log-likelihood.

    Iterates ``u <- u + (J^T W J)^-1 J^T W res(u)`` with ``W = Q_m^-1`` until the
    step norm drops below ``opts.step_tolerance``. Hitting ``max_iterations``
    is reported through ``converged=False``, not raised.
    """
    if opts.initial_guess is None:
        raise ConfigError("ml_locate needs an initial_guess")
    u = opts.initial_guess.copy()
    var = noise.sigmas**2
    positive = noise.is_positive
    worst_cond = 0.0
    converged = False
    k = 0
    try:
        for k in range(1, opts.max_iterations + 1):
            J = measurement_jacobian(u, sensors)
            res = measurement_residual(m, u, sensors)
            # zero-variance components: any weight gives the same step for square J
            Jw = J / var[:, None] if positive else row_equilibration(J) @ J
            A = J.T @ Jw
            worst_cond = max(worst_cond, check_conditioning(A, singular_tolerance, "Gauss-Newton normal matrix"))
            step = np.linalg.solve(A, Jw.T @ res)
            u = u + step
            if np.linalg.norm(step) < opts.step_tolerance:
                converged = True
                break
        cov = information_inverse(measurement_jacobian(u, sensors), noise.covariance, singular_tolerance)
    except LocalizationError as exc:
        if exc.iteration is None:
            exc.iteration = k
        raise
    if not np.all(np.isfinite(u)):
        raise SingularSystem("Gauss-Newton iterate diverged", iteration=k)
    return PositionEstimate(u, cov, k, worst_cond, converged)

