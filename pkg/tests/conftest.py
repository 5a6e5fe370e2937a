import numpy as np
import pytest

from pilotc import PROFILES, TrajectoryRecord, synthetic_trajectory


@pytest.fixture
def geolife():
    return PROFILES["geolife"]


@pytest.fixture
def smooth_2d():
    return synthetic_trajectory(3000, dim=2, seed=101)


@pytest.fixture
def linear_2d():
    t = np.arange(400.0)
    points = np.stack([3.0 * t + 10.0, -1.5 * t + 7.0], axis=1)
    return TrajectoryRecord(t, points)
