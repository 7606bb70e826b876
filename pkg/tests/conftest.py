import numpy as np
import pytest

from teichforge.surface_atlas import build_atlas


@pytest.fixture(scope="session")
def atlas():
    return build_atlas()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
