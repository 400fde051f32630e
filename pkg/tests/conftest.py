import numpy as np
import pytest

from etclab import lorenz_loop, tabuada_loop


@pytest.fixture(scope="session")
def tabuada():
    """(system, certificate) for the planar state-feedback benchmark."""
    return tabuada_loop()


@pytest.fixture(scope="session")
def lorenz():
    """(system, certificate) for the Lorenz output-feedback benchmark."""
    return lorenz_loop()


@pytest.fixture()
def rng():
    return np.random.default_rng(20260809)
