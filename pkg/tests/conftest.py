import numpy as np
import pytest

from aifml.dataio import demo_dataset, demo_system


@pytest.fixture(scope="session")
def demo_sys():
    return demo_system()


@pytest.fixture(scope="session")
def demo_data():
    return demo_dataset()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
