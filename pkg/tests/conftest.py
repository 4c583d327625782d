import cmath
import math

import numpy as np
import pytest
from hypothesis import strategies as st

from ionpair.simcore import StateVector

finite = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False, allow_infinity=False)
angles = st.floats(min_value=-20.0, max_value=20.0, allow_nan=False, allow_infinity=False)


@st.composite
def states(draw, dim=4):
    re = draw(st.lists(finite, min_size=dim, max_size=dim))
    im = draw(st.lists(finite, min_size=dim, max_size=dim))
    amps = np.array(re) + 1j * np.array(im)
    norm = np.linalg.norm(amps)
    if norm < 1e-3:
        amps = np.zeros(dim, dtype=complex)
        amps[0] = 1.0
        norm = 1.0
    return StateVector(amps / norm)


def random_state(rng, dim):
    amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return StateVector(amps / np.linalg.norm(amps))


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


def phase(phi):
    return cmath.exp(1j * phi)


HALF_PI = math.pi / 2
