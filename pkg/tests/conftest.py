import numpy as np
import pytest

from signalwaste import TypeDomain


@pytest.fixture(scope="session")
def grid():
    return TypeDomain(1.0, 1024)


@pytest.fixture(scope="session")
def coarse():
    return TypeDomain(1.0, 256)


def rel_err(x, y):
    x, y = np.asarray(x, float), np.asarray(y, float)
    return float(np.max(np.abs(x - y) / np.abs(y)))
