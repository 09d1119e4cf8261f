import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hybridloc import NoiseModel, SensorPair  # noqa: E402
from oracles import S1, S2, U1  # noqa: E402

REPO = Path(__file__).resolve().parents[1]


@pytest.fixture
def sensors():
    return SensorPair(S1, S2)


@pytest.fixture
def target():
    return U1.copy()


@pytest.fixture
def noise_deg():
    """(10 m, 1 deg, 1 deg)"""
    return NoiseModel(10.0, math.radians(1.0), math.radians(1.0))


@pytest.fixture
def scenario_dir():
    return REPO / "scenarios"


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
