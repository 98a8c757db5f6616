"""
Shared fixtures and the --runslow switch.
"""
import os

import numpy as np
import pytest

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow Monte-Carlo tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="slow Monte-Carlo test; use --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(20240101)


@pytest.fixture
def synthetic_csv():
    """400 rows: y = sin(2 pi x1) + x2 + small noise."""
    return os.path.join(DATA_DIR, "synthetic.csv")
