import numpy as np
import pytest

from kerrcomb.config import load_config


@pytest.fixture(scope="session")
def cfg():
    return load_config()


@pytest.fixture(scope="session")
def resonator(cfg):
    return cfg.resonator


@pytest.fixture(scope="session")
def te00(resonator):
    return resonator.family("TE00")


@pytest.fixture()
def rng():
    return np.random.default_rng(20260808)
