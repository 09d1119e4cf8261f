"""
Closed-form TDOA/AOA weighted least squares localization.

The squared range-difference equation becomes linear in the source position
once the unknown ``||u - s1||`` is replaced via the AOA line of sight
``u - s1 = ||u - s1|| d``. Together with the two AOA plane equations this gives
a square 3x3 system ``h = G u``. The first solve weights with ``Q_m^-1``; each
later solve reweights with ``W = (B Q_m B^T)^-1`` where ``B`` maps raw
measurement noise onto the equation error to first order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegenerateGeometry, LocalizationError, NearSingularElevation, SingularSystem
from .geometry import MeasurementVector, NoiseModel, SensorPair, aoa_basis, direction_vector
from .linalg import RCOND_TOL, check_conditioning, information_inverse, row_equilibration, symmetrize

COS_ELEVATION_TOL = 1e-9


@dataclass(frozen=True)
class PseudoLinearSystem:
    h: np.ndarray
    G: np.ndarray

    def residual(self, u) -> np.ndarray:
        return self.h - self.G @ np.asarray(u, dtype=float)


@dataclass(frozen=True)
class PositionEstimate:
    """Position estimate with its predicted covariance.

    ``condition_number`` is the worst 2-norm condition number of the normal
    matrix seen across the solves. ``converged`` is only ever False for the
    iterative ML estimator.
    """

    u_hat: np.ndarray
    covariance: np.ndarray
    iterations_used: int
    condition_number: float
    converged: bool = True


@dataclass(frozen=True)
class EstimatorOptions:
    refinement_iterations: int = 2
    singular_tolerance: float = RCOND_TOL

    def __post_init__(self):
        if int(self.refinement_iterations) != self.refinement_iterations or self.refinement_iterations < 1:
            raise ConfigError(f"refinement_iterations must be an integer >= 1, got {self.refinement_iterations}")
        if not self.singular_tolerance > 0:
            raise ConfigError("singular_tolerance must be positive")


def _check_elevation(theta: float) -> None:
    if np.cos(theta) < COS_ELEVATION_TOL:
        raise NearSingularElevation(f"cos(elevation) below {COS_ELEVATION_TOL:g} (theta={theta!r})")


def build_system(m: MeasurementVector, sensors: SensorPair, singular_tolerance: float = RCOND_TOL) -> PseudoLinearSystem:
    """Stack the pseudo-linear range equation and the two AOA plane equations."""
    _check_elevation(m.theta)
    s1, s2 = sensors.s1, sensors.s2
    d = direction_vector(m.phi, m.theta)
    alpha, beta = aoa_basis(m.phi, m.theta)
    r = m.r
    h_r = r * r + s1 @ s1 - s2 @ s2 - 2.0 * r * (d @ s1)
    g_r = 2.0 * (s1 - s2 - r * d)
    h = np.array([h_r, alpha @ s1, beta @ s1])
    G = np.vstack([g_r, alpha, beta])
    check_conditioning(G, singular_tolerance, "stacked system G", exc=DegenerateGeometry)
    return PseudoLinearSystem(h, G)


def b_matrix(m: MeasurementVector, sensors: SensorPair, u_current) -> np.ndarray:
    """Diagonal first-order map from measurement noise to equation error.

    The range entry is ``2 (r - s1.d + d.u)``, which equals ``2 ||u - s2||`` at
    the truth; it is the derivative of the range equation error with respect
    to ``r``. Only ``B Q_m B^T`` is used downstream, so signs of the entries do
    not matter.
    """
    _check_elevation(m.theta)
    u_current = np.asarray(u_current, dtype=float)
    d = direction_vector(m.phi, m.theta)
    s1 = sensors.s1
    dist = np.linalg.norm(u_current - s1)
    b_r = 2.0 * (m.r - s1 @ d + d @ u_current)
    return np.diag([b_r, dist * np.cos(m.theta), dist])


def _solve_normal(system: PseudoLinearSystem, W: np.ndarray, tol: float) -> tuple[np.ndarray, float]:
    G = system.G
    A = G.T @ W @ G
    cond = check_conditioning(A, tol, "normal matrix G^T W G")
    return np.linalg.solve(A, G.T @ W @ system.h), cond


def wls_solve(system: PseudoLinearSystem, W: np.ndarray, singular_tolerance: float = RCOND_TOL) -> np.ndarray:
    """Minimize ``(h - G u)^T W (h - G u)`` through the normal equations.

    ``G`` is square, so for invertible ``G`` the minimizer is ``G^-1 h`` for
    every SPD ``W``; the weight only matters for the covariance.
    """
    return _solve_normal(system, W, singular_tolerance)[0]


def estimate_covariance(system: PseudoLinearSystem, W: np.ndarray, singular_tolerance: float = RCOND_TOL) -> np.ndarray:
    """``(G^T W G)^-1``, symmetrized."""
    A = system.G.T @ W @ system.G
    check_conditioning(A, singular_tolerance, "normal matrix G^T W G")
    return symmetrize(np.linalg.inv(A))


def _equation_covariance(B: np.ndarray, noise: NoiseModel) -> np.ndarray:
    return B @ noise.covariance @ B.T


def _weight(cov_eq: np.ndarray) -> np.ndarray:
    var = np.diag(cov_eq)
    if not np.all(np.isfinite(var) & (var > 0.0)):
        raise SingularSystem(f"equation error covariance not positive definite: {var.tolist()}")
    return np.diag(1.0 / var)


def locate(
    m: MeasurementVector,
    sensors: SensorPair,
    noise: NoiseModel,
    opts: EstimatorOptions | None = None,
) -> PositionEstimate:
    """Closed-form hybrid TDOA/AOA position estimate.

    Solve 1 uses ``W = Q_m^-1``; every further solve rebuilds ``B`` at the
    latest estimate and uses ``W = (B Q_m B^T)^-1``. The returned covariance
    is ``(G^T W G)^-1`` with the last weight matrix, so a single solve reports
    the unrefined ``(G^T Q_m^-1 G)^-1``.

    If any noise sigma is zero, ``W`` does not exist. Because ``G`` is square
    the solution does not depend on ``W``, so rows are equilibrated instead
    (``W_ii = 1 / ||G_i||^2``) and the covariance is taken in its limiting form ``G^-1 B Q_m B^T G^-T``.

    Raises:
        DegenerateGeometry, NearSingularElevation, SingularSystem: with
        ``iteration`` set to the failing solve.
    """
    opts = opts or EstimatorOptions()
    tol = opts.singular_tolerance
    iteration = 1
    try:
        system = build_system(m, sensors, tol)
        positive = noise.is_positive
        cov_eq = noise.covariance
        worst_cond = 0.0
        u_hat = None
        for iteration in range(1, opts.refinement_iterations + 1):
            if iteration > 1:
                cov_eq = _equation_covariance(b_matrix(m, sensors, u_hat), noise)
            W = _weight(cov_eq) if positive else row_equilibration(system.G)
            u_hat, cond = _solve_normal(system, W, tol)
            worst_cond = max(worst_cond, cond)
        covariance = information_inverse(system.G, cov_eq, tol)
    except LocalizationError as exc:
        if exc.iteration is None:
            exc.iteration = iteration
        raise
    return PositionEstimate(u_hat, covariance, opts.refinement_iterations, worst_cond)
