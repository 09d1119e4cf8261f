"""Full 10^4-run ensembles at the published settings. Deselect with ``-m "not slow"``."""

import math

import numpy as np
import pytest

from hybridloc import MlOptions, NoiseModel, Scenario, crlb, error_cdf, noise_sweep, run_ensemble
from oracles import U1

pytestmark = pytest.mark.slow

RUNS = 10_000


def test_scenario_rmse_near_bound(sensors, noise_deg):
    sc = Scenario(sensors, U1, noise_deg, runs=RUNS, master_seed=21)
    s = run_ensemble(sc)["wls"]
    bound = crlb(U1, sensors, noise_deg).rmse_bound
    assert s.failure_count == 0
    assert abs(s.rmse / bound - 1) < 0.10
    assert np.linalg.norm(s.bias) < 0.05 * s.rmse


def test_small_rho_ratio_band(sensors):
    base = Scenario(sensors, U1, NoiseModel(40, 0.1, 0.1), runs=RUNS, master_seed=22)
    res = noise_sweep(base, [0.05, 0.1, 0.2, 0.25])
    for ratio in np.array(res.rmse_wls) / np.array(res.crlb_bound):
        assert 0.95 <= ratio <= 1.10
    assert all(b >= a for a, b in zip(res.rmse_wls, res.rmse_wls[1:]))


def test_cdf_medians_agree(sensors, noise_deg):
    sc = Scenario(sensors, U1, noise_deg, ml_opts=MlOptions(), runs=RUNS, master_seed=23)
    cdfs = error_cdf(sc)
    med = {name: float(np.median(errs)) for name, (errs, _) in cdfs.items()}
    assert math.isclose(med["wls"], med["ml"], rel_tol=0.05)
