import numpy as np
import pytest

from rbclab.params import make_params


@pytest.fixture
def p30():
    """Default-geometry parameters at r = 30, Lorenz truncation."""
    return make_params(30.0, 1, 2)


@pytest.fixture
def p30_m6():
    return make_params(30.0, 6, 6)


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(1234))


def random_state(rng, L, M, scale=1.0):
    """Random half-spectrum state with the l = 0 row real."""
    from rbclab.state import SpectralState

    shape = (L + 1, M)
    ps = scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    th = scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    s = SpectralState(ps, th, 0.0)
    s.enforce_reality()
    return s
