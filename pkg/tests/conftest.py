import numpy as np
import pytest

from bbbvpa.model import BvpaParams, sample_bb

TRUTH_A = BvpaParams(0.3, 0.4, 0.6, 0.7, 1.7, 1.2, 1.4)


@pytest.fixture
def truth():
    return TRUTH_A


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def sample_a():
    return sample_bb(TRUTH_A, 400, np.random.default_rng(7))


def random_params(rng, n):
    """Random valid parameter vectors with moderate shapes."""
    out = []
    for _ in range(n):
        mu = rng.normal(0.0, 2.0, 2)
        sigma = rng.uniform(0.2, 3.0, 2)
        alpha = rng.uniform(0.2, 4.0, 3)
        out.append(BvpaParams(*mu, *sigma, *alpha))
    return out
