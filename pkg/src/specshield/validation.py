"""Input validation helpers.

Every public entry point funnels its array arguments through these, so the
numerical code below can assume dense, finite, two-dimensional float64 data.
"""

from __future__ import annotations

import numpy as np


def check_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a validated float64 matrix.

    Parameters
    ----------
    a : array-like
        Dense real matrix. Anything ``np.asarray`` accepts.
    name : str
        Argument name used in error messages.

    Returns
    -------
    np.ndarray
        C-contiguous float64 array of shape (rows, cols).

    Raises
    ------
    ValueError
        If the input is not 2-D, is empty, or contains NaN/Inf.
    """
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must have at least one row and one column, got {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite entries")
    return np.ascontiguousarray(arr)


def check_same_shape(a: np.ndarray, b: np.ndarray, a_name: str = "a", b_name: str = "b") -> None:
    if a.shape != b.shape:
        raise ValueError(
            f"shape mismatch: {a_name} is {a.shape[0]}x{a.shape[1]}, "
            f"{b_name} is {b.shape[0]}x{b.shape[1]}"
        )


def check_fraction(x: float, name: str, *, allow_zero: bool, allow_one: bool) -> float:
    """Validate a scalar that must lie in the unit interval."""
    x = float(x)
    lo_ok = x > 0.0 or (allow_zero and x == 0.0)
    hi_ok = x < 1.0 or (allow_one and x == 1.0)
    if not (lo_ok and hi_ok) or not np.isfinite(x):
        lo = "[0" if allow_zero else "(0"
        hi = "1]" if allow_one else "1)"
        raise ValueError(f"{name} must lie in {lo}, {hi}, got {x}")
    return x


def check_indices(indices, rank: int, name: str = "indices") -> np.ndarray:
    """Validate a collection of 0-based spectral component indices.

    Returns the sorted, deduplicated indices as an int array (possibly empty).
    """
    idx = np.unique(np.asarray(list(indices), dtype=np.int64)) if indices is not None else np.empty(0, np.int64)
    if idx.size and (idx[0] < 0 or idx[-1] >= rank):
        bad = idx[0] if idx[0] < 0 else idx[-1]
        raise ValueError(f"{name} out of range: {bad} not in [0, {rank})")
    return idx
