"""Exception hierarchy shared by the estimators and the CLI."""

from __future__ import annotations


class LocalizationError(Exception):
    """Base class for numerical or geometric failures.

    ``iteration`` is set when the failure happened inside an iterative
    estimator, counting solves from 1.
    """

    def __init__(self, message: str, iteration: int | None = None):
        super().__init__(message)
        self.iteration = iteration

    def __str__(self) -> str:
        msg = super().__str__()
        if self.iteration is not None:
            msg = f"{msg} (iteration {self.iteration})"
        return f"{type(self).__name__}: {msg}"


class DegenerateGeometry(LocalizationError):
    """Source coincides with a sensor, or the stacked system is rank deficient."""


class NearSingularElevation(LocalizationError):
    """Source (nearly) straight above or below the ground sensor; azimuth undefined."""


class SingularSystem(LocalizationError):
    """Normal equations numerically singular."""


class ConfigError(ValueError):
    """Invalid scenario or configuration input."""
