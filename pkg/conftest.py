"""
Shared fixtures; ``--runslow`` enables the checks on the 24/48-bit codes.
"""

import numpy as np
import pytest


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow", default=False):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def ext_hamming():
    from spaelc.codes import extended_hamming

    return extended_hamming()


@pytest.fixture(scope="session")
def golay():
    from spaelc.codes import eqr_code

    return eqr_code(23)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
