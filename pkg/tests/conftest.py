import numpy as np
import pytest

from wienerhopf import core


@pytest.fixture(scope="session")
def lorentzian_grid():
    """1/(t^2+1) on the real line; inverse transform sqrt(pi/2) e^{-|t|}."""
    return core.make_grid("1/(t*t+1)", 0.0, 100.0, 2**14)


@pytest.fixture(scope="session")
def twopole_grid():
    """1/((t-2i)(t+i)): poles at 2i and -i, strip (-1, 2)."""
    return core.make_grid("1/((t-2*i)*(t+i))", 0.0, 100.0, 2**14)


def twopole_plus(z):
    """Exact plus part of 1/((t-2i)(t+i)) on Im z = 0, from the partial
    fractions 1/((t-2i)(t+i)) = (1/3i)(1/(t-2i) - 1/(t+i)): the pole
    below the line goes to the plus part."""
    z = np.asarray(z, dtype=complex)
    return -(1.0 / 3j) / (z + 1j)


def twopole_minus(z):
    z = np.asarray(z, dtype=complex)
    return (1.0 / 3j) / (z - 2j)


@pytest.fixture(scope="session")
def rational_kernel_grid():
    """((t+i)(t-2i))/((t+3i)(t-i)): index 0, factors (t+i)/(t+3i) and
    (t-2i)/(t-i)."""
    return core.make_grid(
        "((t+i)*(t-2*i))/((t+3*i)*(t-i))", 0.0, 200.0, 2**16)
