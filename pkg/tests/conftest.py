import os
import sys

import numpy as np
import pytest

# Make sure the package is importable from a plain checkout
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from hodgeforge.core.linalg import RationalMatrix  # noqa: E402


def random_matrix(rng, rows, cols, lo=-3, hi=4, density=1.0):
    vals = rng.integers(lo, hi, size=(rows, cols))
    if density < 1.0:
        mask = rng.random(size=(rows, cols)) < density
        vals = vals * mask
    return RationalMatrix.from_rows([[int(x) for x in row] for row in vals], cols=cols)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def mat():
    def _m(rows):
        return RationalMatrix.from_rows(rows)
    return _m
