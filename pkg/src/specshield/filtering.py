"""Subspace-protected update filtering.

An update is made safe by removing every component that touches the dominant
subspace of the matrix being edited: expressed in the outer-product basis of
that matrix, all coefficients with row index or column index inside the
protected leading block are zeroed. The production path applies the
equivalent two-sided projection

    delta_safe = (I - U_k U_k^T) delta (I - V_k V_k^T)

which never materializes the coefficient grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import NotFittedError
from .linalg import SvdFactorization, frobenius_norm, svd
from .subspace import DEFAULT_TAU, DominantSubspace, select_k
from .validation import check_matrix, check_same_shape


@dataclass(frozen=True, eq=False)
class FilterOutcome:
    """Result of filtering one update against one matrix state."""

    safe_delta: np.ndarray
    removed_energy_fraction: float
    k_used: int
    tau_used: float


def filter_with_basis(basis: SvdFactorization, subspace: DominantSubspace, delta) -> FilterOutcome:
    """Filter ``delta`` using a precomputed factorization and subspace.

    Exists so several candidate updates for one matrix state can reuse a
    single factorization; the subspace must have been built on ``basis``.
    """
    if subspace.basis is not basis:
        raise ValueError("subspace was built on a different factorization than the one supplied")
    delta = check_matrix(delta, "delta")
    if delta.shape != basis.shape:
        raise ValueError(f"delta shape {delta.shape} does not match basis source shape {basis.shape}")

    k = subspace.k
    if k == 0:
        safe = delta.copy()
        removed = 0.0
    else:
        uk = basis.u[:, :k]
        vk = basis.v[:, :k]
        safe = delta - uk @ (uk.T @ delta)
        safe -= (safe @ vk) @ vk.T
        norm_delta = frobenius_norm(delta)
        removed = frobenius_norm(delta - safe) / norm_delta if norm_delta > 0.0 else 0.0
        removed = min(removed, 1.0)
    return FilterOutcome(
        safe_delta=safe,
        removed_energy_fraction=removed,
        k_used=k,
        tau_used=subspace.tau,
    )


def filter_update(w, delta, tau: float = DEFAULT_TAU) -> FilterOutcome:
    """Filter ``delta`` against the current state of ``w``.

    Factors ``w`` afresh, selects the dominant subspace at energy threshold
    ``tau``, and removes every update component whose row or column direction
    lies in it. The factorization must be of the current matrix state; reuse
    across successive edits of an evolving matrix is unsound because the
    protected subspace moves with the matrix.
    """
    w = check_matrix(w, "w")
    delta = check_matrix(delta, "delta")
    check_same_shape(w, delta, "w", "delta")
    basis = svd(w)
    return filter_with_basis(basis, select_k(basis, tau), delta)


def apply_edit(w, delta, tau: float = DEFAULT_TAU) -> tuple[np.ndarray, FilterOutcome]:
    """Filter ``delta`` and add it: returns ``(w + delta_safe, outcome)``."""
    w = check_matrix(w, "w")
    outcome = filter_update(w, delta, tau)
    return w + outcome.safe_delta, outcome


class DominantSubspaceFilter:
    """Estimator-style interface to the update filter.

    Follows the scikit-learn fit/transform contract so the filter drops into
    existing pipeline tooling: ``fit`` factors the matrix being protected,
    ``transform`` maps candidate updates to their safe versions against that
    fitted state.

    Parameters
    ----------
    tau : float
        Cumulative-energy threshold in [0, 1) defining the protected block.

    Attributes
    ----------
    basis_ : SvdFactorization
        Factorization of the fitted matrix.
    subspace_ : DominantSubspace
        Protected leading block selected at ``tau``.

    Examples
    --------
    >>> import numpy as np
    >>> f = DominantSubspaceFilter(tau=0.5).fit(np.diag([3.0, 2.0, 1.0]))
    >>> f.subspace_.k
    1
    """

    def __init__(self, tau: float = DEFAULT_TAU):
        self.tau = tau

    def fit(self, w, y=None) -> "DominantSubspaceFilter":
        """Factor ``w`` and select its dominant subspace. Returns self."""
        w = check_matrix(w, "w")
        self.basis_ = svd(w)
        self.subspace_ = select_k(self.basis_, self.tau)
        return self

    def _check_fitted(self) -> None:
        if not hasattr(self, "basis_"):
            raise NotFittedError("this DominantSubspaceFilter is not fitted yet; call fit first")

    def transform(self, delta) -> np.ndarray:
        """Return the safe version of ``delta`` for the fitted matrix."""
        self._check_fitted()
        return filter_with_basis(self.basis_, self.subspace_, delta).safe_delta

    def filter_outcome(self, delta) -> FilterOutcome:
        """Like ``transform`` but returning the full outcome record."""
        self._check_fitted()
        return filter_with_basis(self.basis_, self.subspace_, delta)

    def get_params(self, deep: bool = True) -> dict:
        return {"tau": self.tau}

    def set_params(self, **params) -> "DominantSubspaceFilter":
        for name, value in params.items():
            if name != "tau":
                raise ValueError(f"invalid parameter {name!r} for DominantSubspaceFilter")
            self.tau = value
        return self

    def __repr__(self) -> str:
        return f"DominantSubspaceFilter(tau={self.tau!r})"
