import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybridloc import (
    ConfigError,
    DegenerateGeometry,
    NearSingularElevation,
    NoiseModel,
    SensorPair,
    aoa_basis,
    direction_vector,
    sample_measurement,
    true_measurement,
)
from hybridloc.geometry import wrap_angle
from oracles import S1, S2, U1, forward

coord = st.floats(-3000, 3000, allow_nan=False)
angle_phi = st.floats(-math.pi, math.pi, allow_nan=False)
angle_theta = st.floats(-1.5, 1.5, allow_nan=False)


def test_true_measurement_paper_geometry(sensors):
    m = true_measurement(U1, sensors)
    # r = ||[500,100,-1900]|| - ||[1000,200,100]||, phi = atan(0.2), theta = asin(100/||u||)
    assert m.r == pytest.approx(math.sqrt(3_870_000) - math.sqrt(1_050_000), abs=1e-9)
    assert m.r == pytest.approx(942.53, abs=0.01)
    assert m.phi == pytest.approx(0.197396, abs=1e-6)
    assert m.theta == pytest.approx(math.asin(100 / math.sqrt(1_050_000)), abs=1e-12)
    np.testing.assert_allclose(m.as_array(), forward(U1, S1, S2), rtol=1e-12)


def test_true_measurement_on_axis():
    sensors = SensorPair([0, 0, 0], [0, 0, 100])
    m = true_measurement([100, 0, 0], sensors)
    assert m.phi == 0.0
    assert m.theta == 0.0
    assert m.r == pytest.approx(100 * (math.sqrt(2) - 1), rel=1e-14)


def test_true_measurement_vertical_is_flagged(sensors):
    with pytest.raises(NearSingularElevation):
        true_measurement([0, 0, 50], sensors)


def test_true_measurement_at_sensor(sensors):
    with pytest.raises(DegenerateGeometry):
        true_measurement(S2, sensors)
    with pytest.raises(DegenerateGeometry):
        true_measurement(S1, sensors)


def test_sensor_pair_validation():
    with pytest.raises(ConfigError):
        SensorPair([0, 0, 0], [0, 0, 0])
    with pytest.raises(ConfigError):
        SensorPair([0, 0], [1, 0, 0])
    with pytest.raises(ConfigError):
        SensorPair([0, 0, np.nan], [1, 0, 0])


def test_noise_model_validation():
    with pytest.raises(ConfigError):
        NoiseModel(-1, 0.1, 0.1)
    with pytest.raises(ConfigError):
        NoiseModel(1, math.inf, 0.1)
    q = NoiseModel(2, 0.1, 0.3).covariance
    np.testing.assert_allclose(q, np.diag([4, 0.01, 0.09]))


@pytest.mark.parametrize(
    "phi, theta, expected",
    [(0.0, 0.0, [1, 0, 0]), (math.pi / 2, 0.0, [0, 1, 0]), (0.0, math.pi / 2, [0, 0, 1])],
)
def test_direction_vector_axes(phi, theta, expected):
    np.testing.assert_allclose(direction_vector(phi, theta), expected, atol=1e-15)


def test_direction_vector_matches_target():
    d = direction_vector(0.197396, 0.097733)
    np.testing.assert_allclose(d, U1 / np.linalg.norm(U1), atol=2e-5)
    m = true_measurement(U1, SensorPair(S1, S2))
    np.testing.assert_allclose(direction_vector(m.phi, m.theta), U1 / np.linalg.norm(U1), atol=1e-12)


def test_aoa_basis_zero():
    alpha, beta = aoa_basis(0.0, 0.0)
    np.testing.assert_allclose(alpha, [0, -1, 0], atol=1e-15)
    np.testing.assert_allclose(beta, [0, 0, -1], atol=1e-15)


def test_aoa_basis_annihilates_true_offset(sensors):
    m = true_measurement(U1, sensors)
    alpha, beta = aoa_basis(m.phi, m.theta)
    assert abs(alpha @ (U1 - S1)) < 1e-9
    assert abs(beta @ (U1 - S1)) < 1e-9


@given(angle_phi, angle_theta)
def test_orthonormal_triad(phi, theta):
    d = direction_vector(phi, theta)
    alpha, beta = aoa_basis(phi, theta)
    for v in (d, alpha, beta):
        assert abs(np.linalg.norm(v) - 1) < 1e-12
    assert abs(alpha @ d) < 1e-12
    assert abs(beta @ d) < 1e-12
    assert abs(alpha @ beta) < 1e-12


@settings(max_examples=300)
@given(st.tuples(coord, coord, coord))
def test_forward_model_properties(u):
    u = np.array(u)
    sensors = SensorPair(S1, S2)
    d = u - S1
    if math.hypot(d[0], d[1]) < 1e-3 or np.linalg.norm(u - S2) < 1e-3:
        return
    m = true_measurement(u, sensors)
    assert -math.pi < m.phi <= math.pi
    assert -math.pi / 2 < m.theta < math.pi / 2
    assert abs(m.r) <= sensors.baseline + 1e-9
    np.testing.assert_allclose(direction_vector(m.phi, m.theta), d / np.linalg.norm(d), atol=1e-9)
    ref = forward(u, S1, S2)
    assert m.r == pytest.approx(ref[0], rel=1e-9, abs=1e-9)
    assert abs(wrap_angle(m.phi - ref[1])) < 1e-9
    assert m.theta == pytest.approx(ref[2], abs=1e-9)


def test_below_sensor_elevation_negative(sensors):
    m = true_measurement([300, -400, -100], sensors)
    assert m.theta == pytest.approx(-math.atan2(100, 500))
    assert m.phi == pytest.approx(math.atan2(-400, 300))


def test_sample_zero_noise_is_identity(sensors, rng):
    m0 = true_measurement(U1, sensors)
    m = sample_measurement(U1, sensors, NoiseModel(0, 0, 0), rng)
    assert tuple(m) == tuple(m0)


def test_sample_deterministic(sensors, noise_deg):
    a = sample_measurement(U1, sensors, noise_deg, np.random.default_rng(5))
    b = sample_measurement(U1, sensors, noise_deg, np.random.default_rng(5))
    assert a == b


def test_sample_statistics(sensors, noise_deg):
    rng = np.random.default_rng(11)
    m0 = true_measurement(U1, sensors).as_array()
    draws = np.array([sample_measurement(U1, sensors, noise_deg, rng).as_array() for _ in range(100_000)])
    std = (draws - m0).std(axis=0)
    np.testing.assert_allclose(std, noise_deg.sigmas, rtol=0.02)
    mean = (draws - m0).mean(axis=0)
    assert np.all(np.abs(mean) < 4 * noise_deg.sigmas / math.sqrt(1e5))


def test_sample_wraps_azimuth():
    sensors = SensorPair([0, 0, 0], [0, 0, 100])
    u = [-1000, 1e-3, 0]  # azimuth just below +pi
    rng = np.random.default_rng(0)
    for _ in range(200):
        m = sample_measurement(u, sensors, NoiseModel(1, 0.1, 0.01), rng)
        assert -math.pi < m.phi <= math.pi


@pytest.mark.parametrize("a, expected", [(math.pi, math.pi), (-math.pi, math.pi), (3 * math.pi / 2, -math.pi / 2), (0.3, 0.3)])
def test_wrap_angle(a, expected):
    assert wrap_angle(a) == pytest.approx(expected, abs=1e-15)
