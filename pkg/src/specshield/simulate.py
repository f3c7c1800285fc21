"""Deterministic synthetic sequential-editing harness.

Builds a base matrix with a prescribed spectrum, applies rounds of synthetic
edits to it (optionally passed through the subspace-protecting filter, with
the factorization recomputed on the current matrix state before every edit),
and reports spectral drift plus two behavioral stand-ins after every round:

* probe fidelity: relative deviation of the map on unit probes drawn from
  the original dominant input subspace (general-ability stand-in), and
* edit retention: the fraction of injected key/value associations the
  current matrix still reproduces within tolerance (efficacy stand-in).

Association edits mimic key/value writes: a key direction is drawn with its
energy biased toward the current high-energy input directions (activations
correlate with high-energy directions, which is what makes unprotected
sequential editing destructive), a target is drawn with a separate bias on
the output side, and the rank-one update moves the key's image toward the
target at a fixed relative Frobenius budget.

Everything is a pure function of the configuration; identical configurations
give identical results.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import NamedTuple

import numpy as np

from .exceptions import NumericalError
from .filtering import filter_with_basis
from .linalg import SvdFactorization, reconstruct, svd
from .metrics import DEFAULT_TRACKED_COUNT, SpectralReport, _report_for
from .rng import CounterStream, random_orthonormal
from .subspace import DEFAULT_TAU, select_k
from .validation import check_matrix

_STREAM_BASE_LEFT = 1
_STREAM_BASE_RIGHT = 2
_STREAM_EDIT = 3
_STREAM_PROBE = 4

#: Energy fraction defining the probe subspace of the base matrix. Kept
#: fixed (not tied to the filter threshold) so probe fidelity stays
#: comparable across threshold sweeps.
PROBE_ENERGY_FRACTION = DEFAULT_TAU

EDIT_KINDS = ("rank-one-association", "random-low-rank")
SPECTRUM_KINDS = ("power-law", "explicit")


@dataclass(frozen=True)
class SimulationConfig:
    """Complete description of one simulation run."""

    seed: int
    rounds: int
    edits_per_round: int
    tau: float
    rows: int
    cols: int
    spectrum: str = "power-law"
    exponent: float = 1.0
    sigma: tuple[float, ...] | None = None
    edit_kind: str = "rank-one-association"
    edit_scale: float = 0.02
    filter_enabled: bool = True
    probe_count: int = 16
    probe_energy_fraction: float = PROBE_ENERGY_FRACTION
    retention_tol: float = 0.1
    key_concentration: float = 1.0
    target_concentration: float = 0.25
    tracked_count: int = DEFAULT_TRACKED_COUNT

    def validate(self) -> None:
        if self.rounds < 1:
            raise ValueError(f"rounds must be >= 1, got {self.rounds}")
        if self.edits_per_round < 1:
            raise ValueError(f"edits_per_round must be >= 1, got {self.edits_per_round}")
        if not (0.0 <= self.tau < 1.0):
            raise ValueError(f"tau must lie in [0, 1), got {self.tau}")
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"matrix shape must be positive, got {self.rows}x{self.cols}")
        if self.spectrum not in SPECTRUM_KINDS:
            raise ValueError(f"spectrum must be one of {SPECTRUM_KINDS}, got {self.spectrum!r}")
        if self.spectrum == "explicit" and not self.sigma:
            raise ValueError("explicit spectrum requires a sigma list")
        if self.edit_kind not in EDIT_KINDS:
            raise ValueError(f"edit_kind must be one of {EDIT_KINDS}, got {self.edit_kind!r}")
        if not self.edit_scale > 0.0:
            raise ValueError(f"edit_scale must be positive, got {self.edit_scale}")
        if self.probe_count < 1:
            raise ValueError(f"probe_count must be >= 1, got {self.probe_count}")
        if not 0.0 < self.probe_energy_fraction < 1.0:
            raise ValueError(f"probe_energy_fraction must lie in (0, 1), got {self.probe_energy_fraction}")
        if not self.retention_tol > 0.0:
            raise ValueError(f"retention_tol must be positive, got {self.retention_tol}")
        if self.tracked_count < 1:
            raise ValueError(f"tracked_count must be >= 1, got {self.tracked_count}")

    def spectrum_values(self) -> np.ndarray:
        r = min(self.rows, self.cols)
        if self.spectrum == "power-law":
            return power_law_spectrum(r, self.exponent)
        sigma = np.asarray(self.sigma, dtype=np.float64)
        if sigma.size > r:
            raise ValueError(f"explicit spectrum longer than min(rows, cols) = {r}")
        return np.concatenate([sigma, np.zeros(r - sigma.size)])

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "sigma":
                if value is None:
                    continue
                value = list(value)
            out[f.name] = value
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SimulationConfig":
        known = {f.name for f in cls.__dataclass_fields__.values()}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        missing = {"seed", "rounds", "edits_per_round", "tau", "rows", "cols"} - set(data)
        if missing:
            raise ValueError(f"missing config keys: {sorted(missing)}")
        data = dict(data)
        if data.get("sigma") is not None:
            data["sigma"] = tuple(float(x) for x in data["sigma"])
        config = cls(**data)
        config.validate()
        return config


class EditSample(NamedTuple):
    """One synthetic edit: the raw update plus its association, if any."""

    delta: np.ndarray
    key: np.ndarray | None
    target: np.ndarray | None


@dataclass(frozen=True, eq=False)
class SimulationResult:
    """Per-round records of one run. Lists are empty past a failed round."""

    config: SimulationConfig
    reports: list[SpectralReport]
    probe_fidelity: list[float]
    edit_retention: list[float]
    side_condition_ok: list[bool]
    snapshots: list[np.ndarray]
    failed_round: int | None = None
    error: str | None = None


def power_law_spectrum(r: int, exponent: float) -> np.ndarray:
    """sigma_i = (i + 1) ** -exponent for i = 0..r-1 (descending, top = 1)."""
    if r < 1:
        raise ValueError("spectrum length must be >= 1")
    return np.arange(1, r + 1, dtype=np.float64) ** -float(exponent)


def synthesize_base(shape: tuple[int, int], spectrum, seed: int) -> np.ndarray:
    """Build a matrix with the prescribed spectrum and random singular vectors.

    The orthonormal factors are drawn from seeded substreams, so the result
    is a pure function of (shape, spectrum, seed).
    """
    m, n = int(shape[0]), int(shape[1])
    if m < 1 or n < 1:
        raise ValueError(f"matrix shape must be positive, got {m}x{n}")
    sigma = np.asarray(spectrum, dtype=np.float64)
    r = min(m, n)
    if sigma.ndim != 1 or sigma.size != r:
        raise ValueError(f"spectrum must be a flat list of length min(m, n) = {r}")
    if (sigma < 0.0).any() or (np.diff(sigma) > 0.0).any():
        raise ValueError("spectrum must be non-negative and sorted descending")
    u = random_orthonormal(m, CounterStream(seed, _STREAM_BASE_LEFT))
    v = random_orthonormal(n, CounterStream(seed, _STREAM_BASE_RIGHT))
    return (u[:, :r] * sigma) @ v[:, :r].T


def generate_edit(
    w_current,
    kind: str,
    scale: float,
    seed: int,
    counter: int,
    key_concentration: float = 1.0,
    target_concentration: float = 0.25,
) -> EditSample:
    """Draw the ``counter``-th synthetic edit against the current matrix.

    Every edit has Frobenius norm ``scale * ||w_current||_F``. Association
    edits return the key and the realized post-edit target, so that applying
    the raw delta satisfies ``(w + delta) @ key == target`` up to rounding.
    """
    w = check_matrix(w_current, "w_current")
    return _generate_edit(w, svd(w), kind, scale, seed, counter, key_concentration, target_concentration)


def _biased_unit_vector(vectors: np.ndarray, s: np.ndarray, concentration: float, g: np.ndarray) -> np.ndarray:
    # Energy-weighted mixture of the leading r directions; falls back to the
    # raw gaussian direction if the weighted draw degenerates to zero.
    r = s.size
    raw = vectors[:, :r] @ (s**concentration * g)
    norm = np.linalg.norm(raw)
    if norm == 0.0:
        raw = vectors[:, :r] @ g
        norm = np.linalg.norm(raw)
    return raw / norm


def _generate_edit(
    w: np.ndarray,
    basis: SvdFactorization,
    kind: str,
    scale: float,
    seed: int,
    counter: int,
    key_concentration: float,
    target_concentration: float,
) -> EditSample:
    if kind not in EDIT_KINDS:
        raise ValueError(f"edit kind must be one of {EDIT_KINDS}, got {kind!r}")
    if not scale > 0.0:
        raise ValueError(f"scale must be positive, got {scale}")
    stream = CounterStream(seed, _STREAM_EDIT, counter)
    m, n = w.shape
    w_norm = float(np.linalg.norm(w))
    budget = scale * w_norm

    if kind == "random-low-rank":
        parts = stream.normals(2 * (m + n))
        delta = np.outer(parts[:m], parts[m : m + n]) + np.outer(parts[m + n : 2 * m + n], parts[2 * m + n :])
        delta *= budget / np.linalg.norm(delta)
        return EditSample(delta=delta, key=None, target=None)

    r = basis.rank
    key = _biased_unit_vector(basis.v, basis.s, key_concentration, stream.normals(r))
    out_dir = _biased_unit_vector(basis.u, basis.s, target_concentration, stream.normals(r))
    drawn_target = w_norm * out_dir
    residual = drawn_target - w @ key
    res_norm = np.linalg.norm(residual)
    if res_norm == 0.0:
        # Probability-zero: the drawn target already equals the key's image.
        residual = out_dir
        res_norm = 1.0
    delta = np.outer(residual * (budget / res_norm), key)
    realized_target = w @ key + delta @ key
    return EditSample(delta=delta, key=key, target=realized_target)


def _make_probes(basis0: SvdFactorization, count: int, seed: int, energy_fraction: float) -> np.ndarray:
    k = select_k(basis0, energy_fraction).k
    coeffs = CounterStream(seed, _STREAM_PROBE).normal_matrix(k, count)
    probes = basis0.v[:, :k] @ coeffs
    norms = np.linalg.norm(probes, axis=0)
    norms[norms == 0.0] = 1.0
    return probes / norms


def run(config: SimulationConfig) -> SimulationResult:
    """Execute one full simulation. Deterministic for a given config."""
    config.validate()
    w = synthesize_base((config.rows, config.cols), config.spectrum_values(), config.seed)
    w0 = w.copy()
    basis0 = svd(w0)
    k_protected = 0 if config.tau == 0.0 else select_k(basis0, config.tau).k
    protected_part = reconstruct(basis0, range(k_protected))
    sigma_floor = float(basis0.s[k_protected - 1]) if k_protected else 0.0

    probes = _make_probes(basis0, config.probe_count, config.seed, config.probe_energy_fraction)
    probe_baseline = np.linalg.norm(w0 @ probes, axis=0)

    keys: list[np.ndarray] = []
    targets: list[np.ndarray] = []

    reports: list[SpectralReport] = []
    probe_fidelity: list[float] = []
    edit_retention: list[float] = []
    side_condition_ok: list[bool] = []
    snapshots: list[np.ndarray] = []
    failed_round: int | None = None
    error: str | None = None

    counter = 0
    for round_index in range(1, config.rounds + 1):
        try:
            for _ in range(config.edits_per_round):
                basis = svd(w)
                sample = _generate_edit(
                    w,
                    basis,
                    config.edit_kind,
                    config.edit_scale,
                    config.seed,
                    counter,
                    config.key_concentration,
                    config.target_concentration,
                )
                counter += 1
                if config.filter_enabled:
                    outcome = filter_with_basis(basis, select_k(basis, config.tau), sample.delta)
                    w = w + outcome.safe_delta
                else:
                    w = w + sample.delta
                if sample.key is not None:
                    keys.append(sample.key)
                    targets.append(sample.target)
            basis_t = svd(w)
        except NumericalError as exc:
            failed_round = round_index
            error = str(exc)
            break

        reports.append(
            _report_for(basis0, basis_t, w0, w, round_index, DEFAULT_TAU, config.tracked_count)
        )
        deviation = np.linalg.norm((w - w0) @ probes, axis=0) / probe_baseline
        probe_fidelity.append(float(deviation.mean()))
        edit_retention.append(_retention(w, keys, targets, config.retention_tol))
        if k_protected:
            tail_norm = float(np.linalg.norm(w - protected_part, 2))
            side_condition_ok.append(tail_norm < sigma_floor)
        else:
            side_condition_ok.append(False)
        snapshots.append(w.copy())

    return SimulationResult(
        config=config,
        reports=reports,
        probe_fidelity=probe_fidelity,
        edit_retention=edit_retention,
        side_condition_ok=side_condition_ok,
        snapshots=snapshots,
        failed_round=failed_round,
        error=error,
    )


def run_many(configs) -> list[SimulationResult]:
    """Run independent configurations in parallel, one worker per config.

    Runs share no mutable state, so results are identical to sequential
    execution and are returned in input order.
    """
    configs = list(configs)
    if not configs:
        return []
    if len(configs) == 1:
        return [run(configs[0])]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=len(configs)) as pool:
        return list(pool.map(run, configs))


def _retention(w: np.ndarray, keys: list[np.ndarray], targets: list[np.ndarray], tol: float) -> float:
    """Fraction of injected associations still reproduced within ``tol``.

    Vacuously 1.0 before any association has been injected.
    """
    if not keys:
        return 1.0
    key_mat = np.stack(keys, axis=1)
    target_mat = np.stack(targets, axis=1)
    miss = np.linalg.norm(w @ key_mat - target_mat, axis=0)
    target_norms = np.linalg.norm(target_mat, axis=0)
    target_norms[target_norms == 0.0] = 1.0
    return float(np.mean(miss / target_norms < tol))
