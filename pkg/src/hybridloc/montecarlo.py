"""
Seeded Monte Carlo ensembles: RMSE/bias against the CRLB, noise and target
sweeps, and paired WLS-vs-ML error CDFs.

Every run ``l`` (1-based) draws from its own generator seeded with
``substream_seed(master_seed, l)``, so results do not depend on execution order
and the WLS and ML estimators in one run see the same measurement.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import ConfigError, LocalizationError
from .estimator import EstimatorOptions, locate
from .geometry import NoiseModel, SensorPair, as_position, sample_measurement, true_measurement
from .reference import MlOptions, crlb, ml_locate

log = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1
SWEEP_SIGMA_R_PER_RHO = 40.0  # m
SWEEP_SIGMA_ANGLE_PER_RHO = 0.1  # rad
DEFAULT_RHO_VALUES = (0.05, 0.1, 0.2, 0.4, 0.8, 1.0)
DEFAULT_X_VALUES = tuple(np.linspace(200.0, 2000.0, 10).tolist())

ESTIMATORS = ("wls", "ml")


def splitmix64(x: int) -> int:
    """One splitmix64 step: add the golden-ratio increment, then avalanche."""
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def substream_seed(master_seed: int, run_index: int) -> int:
    """64-bit seed for run ``run_index``: ``splitmix64(splitmix64(master) + run_index)``."""
    return splitmix64((splitmix64(master_seed & MASK64) + run_index) & MASK64)


def substream(master_seed: int, run_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(substream_seed(master_seed, run_index)))


@dataclass(frozen=True)
class Scenario:
    sensors: SensorPair
    target: np.ndarray
    noise: NoiseModel
    estimator_opts: EstimatorOptions = field(default_factory=EstimatorOptions)
    ml_opts: MlOptions | None = None
    runs: int = 10_000
    master_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "target", as_position(self.target, "target"))
        if int(self.runs) != self.runs or self.runs < 1:
            raise ConfigError(f"runs must be an integer >= 1, got {self.runs}")
        if int(self.master_seed) != self.master_seed or not 0 <= self.master_seed <= MASK64:
            raise ConfigError(f"master_seed must be an unsigned 64-bit integer, got {self.master_seed}")

    def with_noise(self, noise: NoiseModel) -> Scenario:
        return replace(self, noise=noise)

    def with_target(self, target) -> Scenario:
        return replace(self, target=np.asarray(target, dtype=float))


@dataclass(frozen=True)
class EnsembleStats:
    """Per-estimator ensemble summary.

    ``errors`` holds one position error norm per run in run order, NaN for
    failed runs; ``rmse`` and ``bias`` use successful runs only.
    """

    rmse: float
    bias: np.ndarray
    failure_count: int
    errors: np.ndarray
    estimates: np.ndarray

    @property
    def runs(self) -> int:
        return len(self.errors)

    @property
    def mean_estimate(self) -> np.ndarray:
        return np.nanmean(self.estimates, axis=0)


@dataclass
class SweepResult:
    axis_values: list[float]
    rmse_wls: list[float]
    crlb_bound: list[float]
    rmse_ml: list[float] | None = None
    failures: list[int] = field(default_factory=list)


def _summarize(target: np.ndarray, estimates: np.ndarray) -> EnsembleStats:
    ok = np.all(np.isfinite(estimates), axis=1)
    diffs = estimates - target
    errors = np.linalg.norm(diffs, axis=1)
    errors[~ok] = np.nan
    n_ok = int(ok.sum())
    if n_ok:
        rmse = float(np.sqrt(np.mean(errors[ok] ** 2)))
        bias = diffs[ok].mean(axis=0)
    else:
        rmse = float("nan")
        bias = np.full(3, np.nan)
    return EnsembleStats(rmse, bias, int((~ok).sum()), errors, estimates)


def _check_estimators(estimators: Sequence[str], sc: Scenario) -> tuple[str, ...]:
    est = tuple(estimators)
    unknown = [e for e in est if e not in ESTIMATORS]
    if unknown or not est:
        raise ConfigError(f"estimators must be drawn from {ESTIMATORS}, got {list(est)}")
    if "ml" in est and sc.ml_opts is None:
        raise ConfigError("ML estimator requested but scenario has no ml options")
    return est


def run_ensemble(sc: Scenario, estimators: Sequence[str] = ("wls",)) -> dict[str, EnsembleStats]:
    """Run ``sc.runs`` seeded trials and summarize each requested estimator.

    The ML estimator always starts from the true target. Estimator failures
    are counted per run and never abort the ensemble.
    """
    est = _check_estimators(estimators, sc)
    # fail fast on a target the forward model cannot handle
    true_measurement(sc.target, sc.sensors)
    ml_opts = replace(sc.ml_opts, initial_guess=sc.target) if "ml" in est else None

    estimates = {name: np.full((sc.runs, 3), np.nan) for name in est}
    for i in range(sc.runs):
        rng = substream(sc.master_seed, i + 1)
        m = sample_measurement(sc.target, sc.sensors, sc.noise, rng)
        for name in est:
            try:
                if name == "wls":
                    estimates[name][i] = locate(m, sc.sensors, sc.noise, sc.estimator_opts).u_hat
                else:
                    estimates[name][i] = ml_locate(m, sc.sensors, sc.noise, ml_opts).u_hat
            except LocalizationError as exc:
                log.debug("run %d, %s failed: %s", i + 1, name, exc)
    return {name: _summarize(sc.target, estimates[name]) for name in est}


def _sweep(scenarios: Sequence[Scenario], axis: Sequence[float], estimators: Sequence[str]) -> SweepResult:
    with_ml = "ml" in estimators
    out = SweepResult(list(map(float, axis)), [], [], [] if with_ml else None)
    for value, sc in zip(axis, scenarios):
        bound = float("nan")
        try:
            bound = crlb(sc.target, sc.sensors, sc.noise).rmse_bound
            stats = run_ensemble(sc, estimators)
        except (LocalizationError, ConfigError) as exc:
            log.warning("sweep point %r failed: %s", value, exc)
            out.rmse_wls.append(float("nan"))
            out.crlb_bound.append(bound)
            if with_ml:
                out.rmse_ml.append(float("nan"))
            out.failures.append(sc.runs)
            continue
        out.rmse_wls.append(stats["wls"].rmse)
        out.crlb_bound.append(bound)
        if with_ml:
            out.rmse_ml.append(stats["ml"].rmse)
        out.failures.append(sum(s.failure_count for s in stats.values()))
    return out


def sweep_noise(rho: float, sigma_r_per_rho: float = SWEEP_SIGMA_R_PER_RHO,
                sigma_angle_per_rho: float = SWEEP_SIGMA_ANGLE_PER_RHO) -> NoiseModel:
    return NoiseModel(sigma_r_per_rho * rho, sigma_angle_per_rho * rho, sigma_angle_per_rho * rho)


def noise_sweep(
    base: Scenario,
    rho_values: Sequence[float] = DEFAULT_RHO_VALUES,
    estimators: Sequence[str] = ("wls",),
    sigma_r_per_rho: float = SWEEP_SIGMA_R_PER_RHO,
    sigma_angle_per_rho: float = SWEEP_SIGMA_ANGLE_PER_RHO,
) -> SweepResult:
    """RMSE and CRLB versus noise scale ``rho`` with sigmas ``(40 rho m, 0.1 rho rad, 0.1 rho rad)``.

    All points reuse ``base.master_seed``, so each point sees the same
    standard-normal draws scaled by ``rho``.
    """
    rho = [float(v) for v in rho_values]
    if not rho or any(not np.isfinite(v) or v <= 0 for v in rho):
        raise ConfigError(f"rho values must be positive, got {rho}")
    if any(b < a for a, b in zip(rho, rho[1:])):
        raise ConfigError(f"rho values must be ascending, got {rho}")
    _check_estimators(estimators, base)
    scenarios = [base.with_noise(sweep_noise(v, sigma_r_per_rho, sigma_angle_per_rho)) for v in rho]
    return _sweep(scenarios, rho, estimators)


def target_sweep(
    base: Scenario,
    x_values: Sequence[float] = DEFAULT_X_VALUES,
    estimators: Sequence[str] = ("wls",),
) -> SweepResult:
    """RMSE and CRLB for targets ``[x, y0, z0]`` with y0, z0 taken from ``base.target``."""
    xs = [float(v) for v in x_values]
    if not xs or not all(np.isfinite(xs)):
        raise ConfigError(f"x values must be finite, got {xs}")
    _check_estimators(estimators, base)
    y0, z0 = base.target[1], base.target[2]
    scenarios = [base.with_target([x, y0, z0]) for x in xs]
    return _sweep(scenarios, xs, estimators)


def empirical_cdf(errors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sorted errors and CDF levels ``l / n``. Failed (NaN) runs count against the CDF."""
    errors = np.asarray(errors, dtype=float)
    n = len(errors)
    finite = np.sort(errors[np.isfinite(errors)])
    levels = np.arange(1, len(finite) + 1) / n
    return finite, levels


def error_cdf(sc: Scenario) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """Paired WLS and ML error CDFs from one ensemble."""
    if sc.ml_opts is None:
        raise ConfigError("error_cdf needs ml options in the scenario")
    stats = run_ensemble(sc, ESTIMATORS)
    return {name: empirical_cdf(stats[name].errors) for name in ESTIMATORS}


def merged_cdf_table(cdfs: dict[str, tuple[np.ndarray, np.ndarray]], runs: int) -> list[tuple[float, ...]]:
    """Evaluate each step CDF at every distinct observed error (ascending)."""
    names = list(cdfs)
    grid = np.unique(np.concatenate([cdfs[n][0] for n in names]))
    cols = [np.searchsorted(cdfs[n][0], grid, side="right") / runs for n in names]
    return [(float(e), *(float(c[i]) for c in cols)) for i, e in enumerate(grid)]
