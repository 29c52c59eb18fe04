import numpy as np
import pytest

from minsurf.catalog import get_entry


@pytest.fixture(scope="session")
def enneper():
    return get_entry("enneper")


@pytest.fixture(scope="session")
def catenoid():
    return get_entry("catenoid")


@pytest.fixture(scope="session")
def helicoid():
    return get_entry("helicoid")


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)


def angle_between(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    return float(np.arccos(np.clip(a @ b, -1.0, 1.0)))
