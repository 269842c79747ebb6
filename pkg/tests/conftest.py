import numpy as np
import pytest

from monogrid.core import DesignState
from monogrid.oracles import IllustrationOracle, StaircaseOracle


@pytest.fixture(scope="session")
def illustration():
    return IllustrationOracle()


@pytest.fixture()
def staircase_factory():
    def make(p=2, resolution=6, seed=0):
        return StaircaseOracle(p, resolution, seed)

    return make


def build_state(dim, observations):
    state = DesignState(dimension=dim)
    for point, label in observations:
        state.insert(np.asarray(point, dtype=float), label)
    return state


@pytest.fixture()
def state_builder():
    return build_state
