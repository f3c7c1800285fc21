"""Coordinates of update matrices in a factorization's outer-product basis.

The outer products ``u_i v_j^T`` of the left/right singular vectors of a base
matrix form an orthonormal basis of the full matrix space, so any update has
a unique coefficient grid in that basis. The grid is computed as the dense
congruence ``U^T delta V`` rather than the mn individual rank-one inner
products it equals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import SvdFactorization
from .rng import CounterStream
from .validation import check_matrix

_ORTHONORMALITY_STREAM = 71


@dataclass(frozen=True, eq=False)
class SpectralCoefficients:
    """Coefficient grid of an update expressed in an outer-product basis.

    ``alpha[i, j]`` is the Frobenius inner product of the update with
    ``u_i v_j^T``; by orthonormality ``||alpha||_F`` equals the Frobenius
    norm of the update it represents.
    """

    alpha: np.ndarray
    basis: SvdFactorization


def decompose(delta, basis: SvdFactorization) -> SpectralCoefficients:
    """Express ``delta`` in the outer-product basis of ``basis``.

    Parameters
    ----------
    delta : array-like
        Update matrix with the same shape as the basis source.
    basis : SvdFactorization
        Factorization supplying the singular vectors.

    Returns
    -------
    SpectralCoefficients
        Grid with entry (i, j) equal to ``u_i^T delta v_j``.
    """
    delta = check_matrix(delta, "delta")
    if delta.shape != basis.shape:
        raise ValueError(f"delta shape {delta.shape} does not match basis source shape {basis.shape}")
    alpha = basis.u.T @ delta @ basis.v
    alpha.setflags(write=False)
    return SpectralCoefficients(alpha=alpha, basis=basis)


def recompose(coeffs: SpectralCoefficients) -> np.ndarray:
    """Rebuild the update matrix ``sum_ij alpha_ij u_i v_j^T``."""
    basis = coeffs.basis
    return basis.u @ coeffs.alpha @ basis.v.T


def verify_basis_orthonormality(basis: SvdFactorization, sample_count: int, seed: int) -> float:
    """Spot-check that sampled basis outer products are orthonormal.

    Draws ``sample_count`` index pairs ((p, q), (p', q')), forms both outer
    products explicitly, and returns the largest deviation of their Frobenius
    inner product from the Kronecker-delta pattern. Deterministic for a given
    seed.
    """
    sample_count = int(sample_count)
    if sample_count < 1:
        raise ValueError(f"sample_count must be >= 1, got {sample_count}")
    m, n = basis.shape
    stream = CounterStream(seed, _ORTHONORMALITY_STREAM)
    spans = np.tile([m, n, m, n], sample_count)
    draws = np.floor(stream.uniforms(4 * sample_count) * spans).astype(np.int64)
    draws = np.minimum(draws, spans - 1).reshape(sample_count, 4)
    worst = 0.0
    for p, q, p2, q2 in draws:
        left = np.outer(basis.u[:, p], basis.v[:, q])
        right = np.outer(basis.u[:, p2], basis.v[:, q2])
        expected = 1.0 if (p == p2 and q == q2) else 0.0
        worst = max(worst, abs(float(np.vdot(left, right)) - expected))
    return worst
