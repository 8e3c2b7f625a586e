import numpy as np
import pytest

from gowers.measures import trig_density


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def random_trig(rng, degree, real=False):
    coeffs = {k: complex(rng.normal(), rng.normal()) for k in range(-degree, degree + 1)}
    if real:
        for k in range(1, degree + 1):
            coeffs[-k] = np.conj(coeffs[k])
        coeffs[0] = complex(coeffs[0].real)
    return trig_density(coeffs)
