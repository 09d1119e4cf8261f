"""Hybrid TDOA/AOA 3-D source localization with one ground sensor and a UAV relay."""

from .errors import (
    ConfigError,
    DegenerateGeometry,
    LocalizationError,
    NearSingularElevation,
    SingularSystem,
)
from .estimator import (
    EstimatorOptions,
    PositionEstimate,
    PseudoLinearSystem,
    b_matrix,
    build_system,
    estimate_covariance,
    locate,
    wls_solve,
)
from .geometry import (
    MeasurementVector,
    NoiseModel,
    SensorPair,
    aoa_basis,
    direction_vector,
    sample_measurement,
    true_measurement,
)
from .montecarlo import (
    EnsembleStats,
    Scenario,
    SweepResult,
    error_cdf,
    noise_sweep,
    run_ensemble,
    target_sweep,
)
from .reference import CrlbResult, MlOptions, crlb, measurement_jacobian, ml_locate

__version__ = "0.1.0"
