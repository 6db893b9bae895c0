import numpy as np
import pytest

from fpeps.gaussian import GaussianChannel

VACUUM_CM = np.array([[0.0, 1.0], [-1.0, 0.0]])


@pytest.fixture
def vacuum_channel():
    """B = 0 channel with one input mode; output is the single-mode vacuum."""
    return GaussianChannel(
        VACUUM_CM.copy(), np.zeros((2, 2)), np.array([[0.0, 1.0], [-1.0, 0.0]])
    )


@pytest.fixture
def vacuum_site_channel():
    """B = 0 one-site channel (4 virtual modes); output is the vacuum."""
    D = np.block([
        [np.zeros((4, 4)), np.eye(4)],
        [-np.eye(4), np.zeros((4, 4))],
    ])
    return GaussianChannel(VACUUM_CM.copy(), np.zeros((2, 8)), D)
