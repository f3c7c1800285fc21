"""Dense SVD with a deterministic sign convention, plus shared primitives.

All computation is double precision. Factorizations are immutable and safe
to share across threads; every function here is pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import NumericalError
from .validation import check_indices, check_matrix, check_same_shape

#: Absolute tolerance on ||U^T U - I||_max and ||V^T V - I||_max.
ORTHONORMALITY_TOL = 1e-8

#: Relative Frobenius tolerance for full reconstruction round-trips.
RECONSTRUCTION_TOL = 1e-10

#: Consecutive singular values closer than this (relative to the largest)
#: make individual singular vectors ill-determined; the factorization is
#: flagged so consumers can fall back to subspace-level quantities.
DEGENERACY_GAP_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class SvdFactorization:
    """Full singular value decomposition of a real matrix.

    Attributes
    ----------
    u : np.ndarray
        (m, m) orthonormal matrix; column i is the i-th left singular vector.
    s : np.ndarray
        min(m, n) singular values, sorted descending, all >= 0.
    v : np.ndarray
        (n, n) orthonormal matrix; column j is the j-th right singular vector.
    degenerate : bool
        True when the spectrum has (near-)repeated values, in which case
        individual singular vectors are not uniquely determined.
    """

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray
    degenerate: bool

    @property
    def shape(self) -> tuple[int, int]:
        return (self.u.shape[0], self.v.shape[0])

    @property
    def rank(self) -> int:
        """Number of singular values, min(m, n). Not the numerical rank."""
        return self.s.size


def _apply_sign_convention(u: np.ndarray, v: np.ndarray, r: int) -> None:
    # Flip each (u_i, v_i) pair so the largest-magnitude entry of u_i is
    # positive (argmax breaks ties at the lowest index). Columns beyond the
    # paired range get the same rule applied to themselves alone.
    m, n = u.shape[1], v.shape[1]
    peak = np.argmax(np.abs(u), axis=0)
    u_signs = np.where(u[peak, np.arange(m)] < 0.0, -1.0, 1.0)
    u *= u_signs
    v_signs = np.empty(n)
    v_signs[:r] = u_signs[:r]
    if n > r:
        peak_v = np.argmax(np.abs(v[:, r:]), axis=0)
        v_signs[r:] = np.where(v[peak_v, np.arange(r, n)] < 0.0, -1.0, 1.0)
    v *= v_signs


def svd(w) -> SvdFactorization:
    """Factor ``w`` as U diag(s) V^T with deterministic vector signs.

    Parameters
    ----------
    w : array-like
        Real matrix with finite entries.

    Returns
    -------
    SvdFactorization
        Full factorization (square U and V), singular values descending.

    Raises
    ------
    ValueError
        For non-finite or non-2-D input.
    NumericalError
        If the underlying iteration fails to converge.
    """
    w = check_matrix(w, "w")
    m, n = w.shape
    try:
        u, s, vt = np.linalg.svd(w, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge for {m}x{n} matrix") from exc
    v = vt.T.copy()
    r = s.size
    _apply_sign_convention(u, v, r)

    gaps = s[:-1] - s[1:]
    degenerate = bool(s[0] == 0.0 or (gaps.size and (gaps < DEGENERACY_GAP_TOL * s[0]).any()))

    for arr in (u, s, v):
        arr.setflags(write=False)
    return SvdFactorization(u=u, s=s, v=v, degenerate=degenerate)


def reconstruct(f: SvdFactorization, indices) -> np.ndarray:
    """Sum the rank-one components ``s_i u_i v_i^T`` over ``indices``.

    ``indices`` are 0-based component positions (0 is the largest singular
    value); the empty set gives the zero matrix.
    """
    idx = check_indices(indices, f.rank)
    m, n = f.shape
    if idx.size == 0:
        return np.zeros((m, n))
    return (f.u[:, idx] * f.s[idx]) @ f.v[:, idx].T


def frobenius_inner(a, b) -> float:
    """Frobenius inner product trace(a^T b) = sum_ij a_ij b_ij."""
    a = check_matrix(a, "a")
    b = check_matrix(b, "b")
    check_same_shape(a, b, "a", "b")
    return float(np.vdot(a, b))


def frobenius_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))
