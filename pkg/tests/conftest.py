import os
import sys

import numpy as np
import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

import Wct_Utils
from Wct_Utils.model import ChainSpec, NoiseField


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run the full-scale reproductions")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-scale reproduction, skipped unless --runslow is given")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(autouse=True)
def quiet_progress():
    old = Wct_Utils.config.show_progress
    Wct_Utils.config.show_progress = False
    yield
    Wct_Utils.config.show_progress = old


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


def make_random_spec(rng, m, n, mb) -> ChainSpec:
    return ChainSpec(n, m, mb, rng.uniform(0.5, 1.5, m), rng.uniform(0.5, 1.5, mb), rng.uniform(0.5, 1.5, n - 1))


def make_random_noise(rng, spec: ChainSpec, scale: float = 0.5) -> NoiseField:
    return NoiseField.from_arrays(spec, rng.uniform(-scale, scale, spec.n_bonds), rng.uniform(-scale, scale, spec.dim))


def random_unit_vector(rng, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


@pytest.fixture
def small_spec(rng):
    return make_random_spec(rng, 2, 3, 2)


@pytest.fixture
def small_noise(rng, small_spec):
    return make_random_noise(rng, small_spec)
