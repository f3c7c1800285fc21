"""On-disk formats: the binary matrix container and line-oriented records.

Matrix container layout (little-endian throughout):

    bytes 0..3   magic "SGM1"
    byte  4      element type: 1 = float32, 2 = float64
    bytes 5..12  row count, unsigned 64-bit
    bytes 13..20 column count, unsigned 64-bit
    rest         rows*cols scalars, row-major

float64 payloads round-trip bit-exactly; float32 files are widened to
float64 on load and never written back as float32 implicitly.

Records are one JSON object per line. Floats are rendered with 17
significant digits so every float64 value survives the text round-trip
exactly; any JSON parser can read the lines back.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .exceptions import MatrixFileError

MAGIC = b"SGM1"
_DTYPE_CODES = {1: np.dtype("<f4"), 2: np.dtype("<f8")}
_HEADER = struct.Struct("<4sBQQ")


def write_matrix(path, array, dtype: str = "float64") -> None:
    """Write ``array`` to ``path`` in the binary matrix container."""
    arr = np.ascontiguousarray(np.asarray(array, dtype=np.float64))
    if arr.ndim != 2:
        raise ValueError(f"can only store 2-D arrays, got ndim={arr.ndim}")
    code = {"float32": 1, "float64": 2}.get(dtype)
    if code is None:
        raise ValueError(f"dtype must be 'float32' or 'float64', got {dtype!r}")
    payload = arr.astype(_DTYPE_CODES[code]).tobytes(order="C")
    header = _HEADER.pack(MAGIC, code, arr.shape[0], arr.shape[1])
    Path(path).write_bytes(header + payload)


def read_matrix(path) -> np.ndarray:
    """Read a matrix container; float32 payloads are widened to float64."""
    path = Path(path)
    blob = path.read_bytes()
    if len(blob) < _HEADER.size:
        raise MatrixFileError(f"{path}: truncated header ({len(blob)} bytes)")
    magic, code, rows, cols = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise MatrixFileError(f"{path}: bad magic {magic!r}, not a matrix file")
    if code not in _DTYPE_CODES:
        raise MatrixFileError(f"{path}: unknown element type code {code}")
    if rows < 1 or cols < 1:
        raise MatrixFileError(f"{path}: invalid shape {rows}x{cols}")
    dtype = _DTYPE_CODES[code]
    expected = _HEADER.size + rows * cols * dtype.itemsize
    if len(blob) != expected:
        raise MatrixFileError(f"{path}: payload is {len(blob) - _HEADER.size} bytes, expected {expected - _HEADER.size}")
    data = np.frombuffer(blob, dtype=dtype, offset=_HEADER.size).astype(np.float64)
    arr = data.reshape(rows, cols)
    if not np.isfinite(arr).all():
        raise MatrixFileError(f"{path}: payload contains non-finite values")
    return arr


def _render_value(value) -> str:
    if isinstance(value, bool) or isinstance(value, np.bool_):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if not np.isfinite(value):
            raise ValueError(f"records may not contain non-finite numbers, got {value}")
        return format(float(value), ".17g")
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_render_value(v) for v in value) + "]"
    if value is None:
        return "null"
    raise TypeError(f"unsupported record value type: {type(value).__name__}")


def format_record(record: dict) -> str:
    """Render one record as a single JSON line (no trailing newline)."""
    parts = (f"{json.dumps(str(key))}: {_render_value(value)}" for key, value in record.items())
    return "{" + ", ".join(parts) + "}"


def parse_record(line: str) -> dict:
    """Parse one record line back into a dict."""
    record = json.loads(line)
    if not isinstance(record, dict):
        raise ValueError("record line is not a JSON object")
    return record


def write_records(path, records) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(format_record(record) + "\n")


def read_records(path) -> list[dict]:
    with open(path, "r", encoding="utf-8") as fh:
        return [parse_record(line) for line in fh if line.strip()]
