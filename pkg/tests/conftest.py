import numpy as np
import pytest
from scipy.stats import unitary_group

from bosonic_classifier import circuit as circ
from bosonic_classifier.data import gen_circle


@pytest.fixture
def reference():
    return circ.reference_circuit()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def small_data():
    return gen_circle(12, seed=3)


def random_unitary(rng) -> np.ndarray:
    return unitary_group.rvs(2, random_state=rng)
