"""Spectral drift metrics for sequences of edited matrices.

Two complementary views of drift against an original matrix:

* a macroscopic similarity between the energy-truncated reconstructions of
  the original and edited matrices (cosine in Frobenius geometry), and
* a microscopic rotation profile of individual dominant singular vectors,
  reported as absolute cosines against every original direction. Absolute
  values are used because singular vectors are only defined up to sign, and
  a sign flip carries no geometric drift information.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateMatrixError, UndefinedMetricError
from .linalg import SvdFactorization, reconstruct, svd
from .subspace import DEFAULT_TAU, select_k
from .validation import check_fraction, check_matrix, check_same_shape

#: How many leading directions of the edited matrix are tracked by default.
DEFAULT_TRACKED_COUNT = 10


@dataclass(frozen=True, eq=False)
class SsRow:
    """Rotation profile of one tracked direction of the edited matrix.

    ``values[j]`` is the absolute cosine against original direction j;
    ``argmax`` locates the best-matching original direction.
    """

    index: int
    values: np.ndarray
    argmax: int
    max_value: float


@dataclass(frozen=True, eq=False)
class SpectralReport:
    """Per-snapshot drift summary against the trajectory's first matrix."""

    round_index: int
    ls: float
    ss_rows: list[SsRow]
    energy_profile: np.ndarray
    frobenius_distance: float
    degenerate: bool


def _energy_indices(basis: SvdFactorization, energy_fraction: float) -> np.ndarray:
    if energy_fraction == 1.0:
        return np.arange(basis.rank)
    return np.arange(select_k(basis, energy_fraction).k)


def _low_rank_similarity_from_bases(
    b0: SvdFactorization, bt: SvdFactorization, energy_fraction: float
) -> float:
    try:
        w0_hat = reconstruct(b0, _energy_indices(b0, energy_fraction))
        wt_hat = reconstruct(bt, _energy_indices(bt, energy_fraction))
    except DegenerateMatrixError as exc:
        raise UndefinedMetricError(f"similarity undefined: {exc}") from exc
    # sqrt(fl(x*x)) == x exactly, so identical reconstructions give 1.0 exactly.
    sq0 = float(np.vdot(w0_hat, w0_hat))
    sqt = float(np.vdot(wt_hat, wt_hat))
    if sq0 == 0.0 or sqt == 0.0:
        raise UndefinedMetricError("low-rank reconstruction is identically zero; similarity undefined")
    ls = float(np.vdot(wt_hat, w0_hat)) / float(np.sqrt(sq0 * sqt))
    return min(1.0, max(-1.0, ls))


def low_rank_similarity(w0, wt, energy_fraction: float = DEFAULT_TAU) -> float:
    """Cosine similarity of energy-truncated reconstructions.

    Each matrix is factored separately and reconstructed from the smallest
    leading set of components reaching ``energy_fraction`` of its own total
    singular-value energy; the result is the Frobenius cosine between the two
    reconstructions, in [-1, 1].

    Raises
    ------
    UndefinedMetricError
        If either reconstruction is identically zero.
    """
    w0 = check_matrix(w0, "w0")
    wt = check_matrix(wt, "wt")
    check_same_shape(w0, wt, "w0", "wt")
    energy_fraction = check_fraction(energy_fraction, "energy_fraction", allow_zero=False, allow_one=True)
    return _low_rank_similarity_from_bases(svd(w0), svd(wt), energy_fraction)


def singular_vector_similarity(
    w0_basis: SvdFactorization,
    wt_basis: SvdFactorization,
    tracked,
    side: str = "input",
) -> list[SsRow]:
    """Absolute cosines of tracked edited-matrix directions vs all originals.

    Parameters
    ----------
    w0_basis, wt_basis : SvdFactorization
        Factorizations of the original and edited matrices (same shape).
    tracked : iterable of int
        0-based indices of edited-matrix directions to profile; must lie
        within the spectrum of ``wt_basis``.
    side : {"input", "output"}
        "input" compares right singular vectors, "output" left ones.
    """
    if w0_basis.shape != wt_basis.shape:
        raise ValueError(f"factorization shapes differ: {w0_basis.shape} vs {wt_basis.shape}")
    if side not in ("input", "output"):
        raise ValueError(f"side must be 'input' or 'output', got {side!r}")
    originals = w0_basis.v if side == "input" else w0_basis.u
    edited = wt_basis.v if side == "input" else wt_basis.u
    rows = []
    for t in tracked:
        t = int(t)
        if not 0 <= t < wt_basis.rank:
            raise ValueError(f"tracked index {t} outside spectrum [0, {wt_basis.rank})")
        values = np.abs(originals.T @ edited[:, t])
        values.setflags(write=False)
        argmax = int(np.argmax(values))
        rows.append(SsRow(index=t, values=values, argmax=argmax, max_value=float(values[argmax])))
    return rows


def analyze_trajectory(
    snapshots,
    energy_fraction: float = DEFAULT_TAU,
    tracked_count: int = DEFAULT_TRACKED_COUNT,
) -> list[SpectralReport]:
    """Report drift of every snapshot against the first one.

    ``snapshots[0]`` is the reference; one report is emitted per subsequent
    snapshot, tracking its ``tracked_count`` leading input directions.
    """
    mats = [check_matrix(s, f"snapshots[{i}]") for i, s in enumerate(snapshots)]
    if len(mats) < 2:
        raise ValueError("need at least two snapshots (reference plus one)")
    shape = mats[0].shape
    for i, m in enumerate(mats[1:], start=1):
        if m.shape != shape:
            raise ValueError(f"snapshot {i} has shape {m.shape}, expected {shape}")
    energy_fraction = check_fraction(energy_fraction, "energy_fraction", allow_zero=False, allow_one=True)
    if tracked_count < 1:
        raise ValueError(f"tracked_count must be >= 1, got {tracked_count}")

    b0 = svd(mats[0])
    reports = []
    for t, wt in enumerate(mats[1:], start=1):
        bt = svd(wt)
        reports.append(_report_for(b0, bt, mats[0], wt, t, energy_fraction, tracked_count))
    return reports


def _report_for(
    b0: SvdFactorization,
    bt: SvdFactorization,
    w0: np.ndarray,
    wt: np.ndarray,
    round_index: int,
    energy_fraction: float,
    tracked_count: int,
) -> SpectralReport:
    tracked = range(min(tracked_count, bt.rank))
    return SpectralReport(
        round_index=round_index,
        ls=_low_rank_similarity_from_bases(b0, bt, energy_fraction),
        ss_rows=singular_vector_similarity(b0, bt, tracked, side="input"),
        energy_profile=bt.s,
        frobenius_distance=float(np.linalg.norm(wt - w0)),
        degenerate=b0.degenerate or bt.degenerate,
    )
