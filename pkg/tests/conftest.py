import numpy as np
import pytest

from frequency import Event, total_frequency

REFERENCE_R = 2.9
REFERENCE_RR = 3.6


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def thresholds():
    return REFERENCE_R, REFERENCE_RR


@pytest.fixture(scope='session')
def reference_report():
    return total_frequency(REFERENCE_R, REFERENCE_RR, Event.BOTH_GREATER)
