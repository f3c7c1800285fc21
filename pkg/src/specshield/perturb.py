"""Structured spectral-group perturbations for sensitivity studies.

An input-side perturbation remaps a chosen band of input singular directions
onto random outputs: it is supported on the coefficient columns of the band,
with every coefficient drawn i.i.d. standard normal. Output-side
perturbations are the symmetric construction on rows. Each perturbation is
rescaled to an exact caller-chosen Frobenius norm so different bands can be
compared at matched strength.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .linalg import SvdFactorization, svd
from .rng import CounterStream, derive_key
from .subspace import energy_groups
from .validation import check_matrix

_INPUT_STREAM = 11
_OUTPUT_STREAM = 12
_SIDES = ("input", "output")


@dataclass(frozen=True)
class PerturbationSpec:
    """One structured perturbation: which side, which band, how strong.

    ``group`` holds 0-based spectral component indices (normally one entry of
    ``energy_groups``); ``epsilon`` is the exact Frobenius norm of the result.
    """

    side: str
    group: tuple[int, ...]
    epsilon: float
    seed: int


def generate(basis: SvdFactorization, spec: PerturbationSpec) -> np.ndarray:
    """Draw the perturbation described by ``spec`` in the given basis.

    Deterministic for a given (seed, spec, basis). Coefficients are drawn in
    row-major order over (row index, column index) within the supported
    block. The all-zero draw (probability zero) retries on the next
    substream.
    """
    if spec.side not in _SIDES:
        raise ValueError(f"side must be one of {_SIDES}, got {spec.side!r}")
    group = np.unique(np.asarray(spec.group, dtype=np.int64))
    r = basis.rank
    if group.size == 0:
        raise ValueError("perturbation group is empty")
    if group[0] < 0 or group[-1] >= r:
        raise ValueError(f"group index out of range: spectrum has {r} components")
    epsilon = float(spec.epsilon)
    if not (epsilon > 0.0 and np.isfinite(epsilon)):
        raise ValueError(f"epsilon must be positive and finite, got {epsilon}")

    side_stream = _INPUT_STREAM if spec.side == "input" else _OUTPUT_STREAM
    for attempt in range(64):
        stream = CounterStream(spec.seed, side_stream, attempt)
        if spec.side == "input":
            coeffs = stream.normal_matrix(r, group.size)
            delta = basis.u[:, :r] @ coeffs @ basis.v[:, group].T
        else:
            coeffs = stream.normal_matrix(group.size, r)
            delta = basis.u[:, group] @ coeffs @ basis.v[:, :r].T
        norm = float(np.linalg.norm(delta))
        if norm > 0.0:
            return delta * (epsilon / norm)
    raise AssertionError("all-zero perturbation draws 64 times in a row")


class SweepEntry(NamedTuple):
    group_index: int  # 1-based band number
    indices: tuple[int, ...]
    perturbed: np.ndarray
    achieved_norm: float


def sweep(w, epsilon: float, group_count: int, side: str, seed: int) -> list[SweepEntry]:
    """Perturb ``w`` once per non-empty energy band at matched norm.

    Returns one entry per band that contains at least one component; every
    perturbation satisfies ``||W' - W||_F == epsilon`` up to rounding. Bands
    use disjoint substreams of ``seed``, so entries are independent.
    """
    w = check_matrix(w, "w")
    basis = svd(w)
    entries = []
    for g, indices in enumerate(energy_groups(basis, group_count), start=1):
        if not indices:
            continue
        spec = PerturbationSpec(side=side, group=tuple(indices), epsilon=epsilon, seed=derive_key(seed, g))
        delta = generate(basis, spec)
        entries.append(
            SweepEntry(
                group_index=g,
                indices=tuple(indices),
                perturbed=w + delta,
                achieved_norm=float(np.linalg.norm(delta)),
            )
        )
    return entries
