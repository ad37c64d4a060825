import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


def random_sparse_symmetric(rng, dim, nnz_factor=4):
    """Random sparse SymmetricMatrix helper shared by several suites."""
    from qptscale import SymmetricMatrix

    nnz = nnz_factor * dim
    rows = rng.integers(0, dim, nnz)
    cols = rng.integers(0, dim, nnz)
    lo = np.minimum(rows, cols)
    hi = np.maximum(rows, cols)
    vals = rng.standard_normal(nnz)
    return SymmetricMatrix.from_upper(dim, lo, hi, vals)
