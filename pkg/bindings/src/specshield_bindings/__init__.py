"""In-memory numpy bindings over the specshield command-line surface.

The functions here accept and return plain float64 arrays so the update
filter and the drift metrics can be dropped into array-based pipelines. The
implementation talks to the toolkit exclusively through its stable external
surface: matrices cross the boundary in the binary matrix container, results
come back as matrix files and record lines, and every call runs the
command-line tool in a subprocess. Nothing in this package reaches into the
toolkit's internals, so it tracks the toolkit release for release
(dependency pinned to the exact version).

Failures on the toolkit side surface as Python exceptions carrying the
toolkit's own diagnostic line: ``ValueError`` for argument/shape/format
problems, ``ArithmeticError`` for numerical failures.
"""

from __future__ import annotations

import json
import struct
import subprocess
import sys
import tempfile
from pathlib import Path
from typing import NamedTuple

import numpy as np

__version__ = "0.1.0"

__all__ = ["FilterResult", "MetricsResult", "filter_update", "metrics", "select_k", "__version__"]

_MAGIC = b"SGM1"
_HEADER = struct.Struct("<4sBQQ")
_FLOAT64 = 2


class FilterResult(NamedTuple):
    safe_delta: np.ndarray
    k: int
    removed_energy_fraction: float


class MetricsResult(NamedTuple):
    ls: float
    ss_max: tuple[float, ...]
    ss_argmax: tuple[int, ...]
    frobenius_distance: float


def _as_matrix(a, name: str) -> np.ndarray:
    arr = np.array(a, dtype=np.float64, order="C", copy=True)  # defensive copy in
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-D array, got ndim={arr.ndim}")
    return arr


def _write_matrix(path: Path, arr: np.ndarray) -> None:
    path.write_bytes(_HEADER.pack(_MAGIC, _FLOAT64, arr.shape[0], arr.shape[1]) + arr.tobytes(order="C"))


def _read_matrix(path: Path) -> np.ndarray:
    blob = path.read_bytes()
    magic, code, rows, cols = _HEADER.unpack_from(blob)
    if magic != _MAGIC or code != _FLOAT64:
        raise ValueError(f"{path}: unexpected matrix container header")
    data = np.frombuffer(blob, dtype="<f8", offset=_HEADER.size)
    return data.reshape(rows, cols).copy()  # defensive copy out


def _run_cli(args: list[str]) -> str:
    proc = subprocess.run(
        [sys.executable, "-m", "specshield", *args],
        capture_output=True,
        text=True,
    )
    if proc.returncode == 0:
        return proc.stdout
    diagnostic = proc.stderr.strip().splitlines()
    message = diagnostic[-1] if diagnostic else f"specshield exited with code {proc.returncode}"
    if proc.returncode == 3:
        raise ArithmeticError(message)
    raise ValueError(message)


def filter_update(base, delta, tau: float) -> FilterResult:
    """Remove the protected-subspace components of ``delta`` against ``base``.

    Returns the safe update plus the protected rank and the removed energy
    fraction, exactly as the command-line filter reports them.
    """
    base = _as_matrix(base, "base")
    delta = _as_matrix(delta, "delta")
    with tempfile.TemporaryDirectory(prefix="specshield-bind-") as tmp:
        tmp = Path(tmp)
        _write_matrix(tmp / "base.sgm", base)
        _write_matrix(tmp / "delta.sgm", delta)
        _run_cli(
            [
                "filter",
                "--base", str(tmp / "base.sgm"),
                "--delta", str(tmp / "delta.sgm"),
                "--tau", repr(float(tau)),
                "--out", str(tmp / "safe.sgm"),
                "--report", str(tmp / "report.jsonl"),
            ]
        )
        safe = _read_matrix(tmp / "safe.sgm")
        report = json.loads((tmp / "report.jsonl").read_text())
    return FilterResult(
        safe_delta=safe,
        k=int(report["k_used"]),
        removed_energy_fraction=float(report["removed_energy_fraction"]),
    )


def metrics(w0, wt, energy_fraction: float = 0.10, tracked: int = 10) -> MetricsResult:
    """Drift metrics of ``wt`` against ``w0``: reconstruction similarity plus
    the per-direction rotation summary of the ``tracked`` leading directions."""
    w0 = _as_matrix(w0, "w0")
    wt = _as_matrix(wt, "wt")
    with tempfile.TemporaryDirectory(prefix="specshield-bind-") as tmp:
        tmp = Path(tmp)
        _write_matrix(tmp / "baseline.sgm", w0)
        _write_matrix(tmp / "snapshot.sgm", wt)
        _run_cli(
            [
                "analyze",
                "--baseline", str(tmp / "baseline.sgm"),
                "--snapshots", str(tmp / "snapshot.sgm"),
                "--energy-fraction", repr(float(energy_fraction)),
                "--tracked", str(int(tracked)),
                "--out", str(tmp / "metrics.jsonl"),
            ]
        )
        record = json.loads((tmp / "metrics.jsonl").read_text().splitlines()[0])
    return MetricsResult(
        ls=float(record["ls"]),
        ss_max=tuple(float(x) for x in record["ss_max"]),
        ss_argmax=tuple(int(x) for x in record["ss_argmax"]),
        frobenius_distance=float(record["frobenius_distance"]),
    )


def select_k(w, tau: float) -> int:
    """Protected rank of ``w`` at energy threshold ``tau``.

    Runs the filter with an all-zero update, which leaves the matrix alone
    but reports the selected rank.
    """
    w = _as_matrix(w, "w")
    return filter_update(w, np.zeros_like(w), tau).k
