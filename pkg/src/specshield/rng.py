"""Portable counter-based random number generation.

Reproducibility across platforms and library versions is a core requirement
for the perturbation and simulation fixtures, so randomness is never taken
from a library generator whose stream may change. Instead all draws come from
the SplitMix64 output function applied to an explicit 64-bit counter:

    value(key, i) = mix64(key + (i + 1) * 0x9E3779B97F4A7C15)

where ``mix64`` is the xor-shift/multiply finalizer (constants
0xBF58476D1CE4E5B9 and 0x94D049BB133111EB). Uniform doubles take the top 53
bits of the output; normal variates use the Box-Muller transform on
consecutive uniform pairs (u1, u2):

    z1 = sqrt(-2 ln(1 - u1)) cos(2 pi u2)
    z2 = sqrt(-2 ln(1 - u1)) sin(2 pi u2)

Streams are pure functions of (seed, stream ids, counter), so independent
substreams can be derived for parallel work without shared state.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK = np.uint64(0xFFFFFFFFFFFFFFFF)


def _mix64(z: np.ndarray) -> np.ndarray:
    z = z.astype(np.uint64, copy=True)
    z ^= z >> np.uint64(30)
    z *= _MIX1
    z ^= z >> np.uint64(27)
    z *= _MIX2
    z ^= z >> np.uint64(31)
    return z


def derive_key(seed: int, *stream_ids: int) -> int:
    """Derive a 64-bit stream key from a seed and a chain of stream ids.

    Distinct id chains give statistically independent streams for the same
    seed, which is how per-group and per-edit substreams stay disjoint.
    """
    key = _mix64(np.array([seed & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64))
    for sid in stream_ids:
        step = _mix64(np.array([sid & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64))
        key = _mix64(key ^ (step + _GOLDEN))
    return int(key[0])


class CounterStream:
    """A deterministic stream of doubles indexed by an advancing counter.

    The stream is stateless apart from the counter position: the n-th value
    for a given key is always the same number, on every platform.
    """

    def __init__(self, seed: int, *stream_ids: int):
        self._key = np.uint64(derive_key(seed, *stream_ids))
        self._counter = 0

    def uniforms(self, count: int) -> np.ndarray:
        """Return ``count`` doubles uniform on [0, 1)."""
        idx = np.arange(self._counter + 1, self._counter + count + 1, dtype=np.uint64)
        self._counter += count
        bits = _mix64(self._key + idx * _GOLDEN)
        return (bits >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)

    def normals(self, count: int) -> np.ndarray:
        """Return ``count`` standard normal variates (Box-Muller pairs)."""
        pairs = (count + 1) // 2
        u = self.uniforms(2 * pairs)
        u1, u2 = u[0::2], u[1::2]
        radius = np.sqrt(-2.0 * np.log1p(-u1))
        angle = (2.0 * np.pi) * u2
        out = np.empty(2 * pairs)
        out[0::2] = radius * np.cos(angle)
        out[1::2] = radius * np.sin(angle)
        return out[:count]

    def normal_matrix(self, rows: int, cols: int) -> np.ndarray:
        """Normal variates filled in row-major order."""
        return self.normals(rows * cols).reshape(rows, cols)


def random_orthonormal(dim: int, stream: CounterStream) -> np.ndarray:
    """Draw a random orthonormal ``dim x dim`` factor.

    QR of a square normal matrix, with the R diagonal forced positive so the
    factor is unique for a given gaussian draw.
    """
    q, r = np.linalg.qr(stream.normal_matrix(dim, dim))
    signs = np.where(np.diag(r) < 0.0, -1.0, 1.0)
    return q * signs
