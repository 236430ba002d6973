from __future__ import annotations

import numpy as np
import pytest

from apathkit import oracle
from apathkit.algebroid import lie_algebra, tangent


@pytest.fixture
def so3():
    return lie_algebra("so3")


@pytest.fixture
def r2():
    return tangent(2)


@pytest.fixture
def su2():
    return oracle.su2_model()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
