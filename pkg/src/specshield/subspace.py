"""Dominant subspace selection by cumulative singular-value energy.

Energy here means the plain sum of singular values (not their squares); all
ratios are taken against the total sum over the full spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .exceptions import DegenerateMatrixError
from .linalg import SvdFactorization
from .validation import check_indices

#: Default energy threshold: protect the components that carry the top 10%
#: of singular-value energy.
DEFAULT_TAU = 0.10


@dataclass(frozen=True, eq=False)
class DominantSubspace:
    """The protected leading block of a factorization.

    ``k`` is the smallest count of leading components whose cumulative energy
    ratio reaches ``tau`` (0 only for the tau = 0 escape hatch, which protects
    nothing and turns the filter into the identity).
    """

    k: int
    tau: float
    energy_captured: float
    basis: SvdFactorization


class EnergyShare(NamedTuple):
    value: float
    ratio: float


def select_k(basis: SvdFactorization, tau: float) -> DominantSubspace:
    """Pick the smallest k with cumulative energy ratio >= ``tau``.

    Parameters
    ----------
    basis : SvdFactorization
        Factorization whose spectrum is being partitioned.
    tau : float
        Energy threshold in [0, 1). Exact threshold ties resolve with >=.

    Raises
    ------
    ValueError
        If tau is outside [0, 1).
    DegenerateMatrixError
        If every singular value is zero.
    """
    tau = float(tau)
    if not (0.0 <= tau < 1.0):
        raise ValueError(f"tau must lie in [0, 1), got {tau}")
    s = basis.s
    if s[0] == 0.0:
        raise DegenerateMatrixError("cannot select a dominant subspace of an all-zero spectrum")
    if tau == 0.0:
        return DominantSubspace(k=0, tau=0.0, energy_captured=0.0, basis=basis)
    cum = np.cumsum(s)
    ratios = cum / cum[-1]
    k = int(np.searchsorted(ratios, tau, side="left")) + 1
    return DominantSubspace(k=k, tau=tau, energy_captured=float(ratios[k - 1]), basis=basis)


def energy_of(basis: SvdFactorization, indices) -> EnergyShare:
    """Absolute singular-value energy over ``indices`` and its total-ratio."""
    idx = check_indices(indices, basis.rank)
    total = float(np.sum(basis.s))
    value = float(np.sum(basis.s[idx])) if idx.size else 0.0
    return EnergyShare(value=value, ratio=value / total if total > 0.0 else 0.0)


def energy_groups(basis: SvdFactorization, group_count: int) -> list[list[int]]:
    """Partition components 0..r-1 into contiguous cumulative-energy bands.

    Band j (1-based) covers the energy interval ((j-1)/G, j/G]. A component
    is assigned to the band in which its own energy interval starts, i.e. the
    smallest band whose upper boundary exceeds the cumulative ratio of all
    components before it. Bands may come out empty when a single component
    spans several of them; the groups are always disjoint and exhaustive.
    """
    group_count = int(group_count)
    if group_count < 1:
        raise ValueError(f"group_count must be >= 1, got {group_count}")
    s = basis.s
    cum = np.cumsum(s)
    total = cum[-1]
    if total == 0.0:
        raise DegenerateMatrixError("cannot group an all-zero spectrum")
    starts = (cum - s) / total
    boundaries = np.arange(1, group_count + 1) / group_count
    assignment = np.searchsorted(boundaries, starts, side="right")
    assignment = np.minimum(assignment, group_count - 1)
    groups: list[list[int]] = [[] for _ in range(group_count)]
    for i, g in enumerate(assignment):
        groups[g].append(i)
    return groups
