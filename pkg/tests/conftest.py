from __future__ import annotations

import pytest

from procshap.datasets import load_running_example, running_example_path
from procshap.miner import MinerConfig, discover


@pytest.fixture(scope="session")
def running_example_log():
    return load_running_example()


@pytest.fixture(scope="session")
def running_example_file():
    return running_example_path()


@pytest.fixture(scope="session")
def running_example_tree(running_example_log):
    return discover(running_example_log, MinerConfig(noise=0.0))
