from itertools import product
from math import gcd

import numpy as np
import pytest

from gkp_crosstalk.channel import CrosstalkParams


def sweep_params():
    """Admissible parameter sets with d1, d2, q, p in {1, 2, 3}."""
    out = []
    for d1, d2, q, p in product((1, 2, 3), repeat=4):
        if gcd(q, p * d1 * d2) == 1:
            out.append(CrosstalkParams.from_qp(q, p, d1, d2))
    return out


SWEEP = sweep_params()


@pytest.fixture
def qubit_params():
    """d1 = d2 = 2 at eta = 1/5, the worked example."""
    return CrosstalkParams.from_eta("1/5", 2, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
