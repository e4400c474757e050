import numpy as np
import pytest

from sepnet import is_npt, random_two_qubit


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def sample_npt_two_qubit(rng):
    """Rejection-sample a random two-qubit state with negative partial transpose."""
    while True:
        state = random_two_qubit(rng)
        if is_npt(state.matrix, (2, 2)):
            return state
