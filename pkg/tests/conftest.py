import numpy as np
import pytest

from nmrgrover import SpinSystem


@pytest.fixture
def system():
    return SpinSystem()


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
