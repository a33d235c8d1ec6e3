import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from evarkit import from_weighted


def random_law(rng, n_max=50, low=-10.0, high=10.0, n_min=2):
    n = int(rng.integers(n_min, n_max + 1))
    return from_weighted(zip(rng.uniform(low, high, n), rng.uniform(0.05, 1.0, n)))


@pytest.fixture
def rng():
    return np.random.default_rng(20131106)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
