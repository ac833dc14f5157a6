import numpy as np
import pytest

from texwarp import codec


@pytest.fixture(scope="session")
def weight_store():
    """One random-but-valid WeightStore shared by the whole session."""
    return codec.random_weight_store(seed=0)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in RESULTS:
        terminalreporter.write_line(f"{status:<6} {name}")
