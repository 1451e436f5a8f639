import numpy as np
import pytest

from spectra_lab.frequency import FrequencySet, GeneratorBasis, freq


@pytest.fixture(scope="session")
def rational_basis():
    return GeneratorBasis(None)


@pytest.fixture(scope="session")
def surd2_basis():
    return GeneratorBasis(2)


@pytest.fixture(scope="session")
def axes2d(rational_basis):
    """Theta = {0, +-e1, +-e2} in d = 2."""
    e1 = freq([1, 0], rational_basis)
    e2 = freq([0, 1], rational_basis)
    return FrequencySet.build(2, rational_basis, [e1, e2])


@pytest.fixture(scope="session")
def mathieu1d(rational_basis):
    """Theta = {0, +-1} in d = 1."""
    return FrequencySet.build(1, rational_basis, [freq([1], rational_basis)])


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(12345)
