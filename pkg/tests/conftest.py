import pathlib

import pytest

from cyclecert.linalg import make_family

A1 = [[0.86, 0.05], [-0.07, 0.89]]
A2 = [[0.81, -0.07], [-0.74, 0.73]]

CONFIG_DIR = pathlib.Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture(scope="session")
def exp1_family():
    return make_family([A1, A2], edges=[(1, 2), (2, 1)],
                       stable={1}, unstable={2})


@pytest.fixture(scope="session")
def exp1_config_path():
    return CONFIG_DIR / "experiment1.json"
