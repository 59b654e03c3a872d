import math

import numpy as np
import pytest

from entropic_context.quantum import build_pentagon_family, build_symmetric_pentagram

THETA_OPT = 0.2366
PHI_OPT = 0.1698


@pytest.fixture
def optimal():
    return build_pentagon_family((THETA_OPT, PHI_OPT))


@pytest.fixture
def pentagram():
    return build_symmetric_pentagram()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


SQRT5 = math.sqrt(5)
