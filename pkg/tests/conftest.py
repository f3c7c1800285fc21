import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_shapes(rng, count, max_rows=64, max_cols=48):
    """Seeded stream of (rows, cols) pairs covering small and skinny cases."""
    rows = rng.integers(1, max_rows + 1, size=count)
    cols = rng.integers(1, max_cols + 1, size=count)
    return list(zip(rows.tolist(), cols.tolist()))
