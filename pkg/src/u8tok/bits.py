"""Bit-feature embedding augmentation and its exact inference-time fold.

Every byte value has an 8-bit binary structure (digits share a high
nibble, letter case flips a single bit) that plain ID lookup hides. The
augmentation adds a linear projection of those bits to each embedding:

    embedded(t) = table[t] + bits(t) @ projection

with ``table`` of shape (256, d), ``projection`` of shape (8, d) and
``bits(t)`` the MSB-first binary expansion of t, so the extra path costs
exactly 8*d parameters. Because ``bits`` is fixed, the projection can be
folded into the table once training is done, leaving shape, latency and
memory unchanged:

    folded = table + feature_matrix @ projection

Embedding math is float32; the fold is computed in float64 and rounded to
float32 so the equivalence between the two paths holds to 1e-6 absolute.

Matrices are stored on disk as little-endian binary: two uint32 header
words (rows, cols) followed by rows*cols float32 values, row-major.
"""

from __future__ import annotations

import struct

import numpy as np

from .core import as_bytes

BIT_COUNT = 8
TABLE_ROWS = 256

_HEADER = struct.Struct("<II")


def unpack_bits(value):
    """MSB-first bit vector(s) of byte value(s).

    A scalar in [0, 255] yields shape (8,); an array of bytes yields its
    shape with a trailing 8-axis appended. Entries are uint8 in {0, 1} and
    ``unpack_bits(t)[k] == (t >> (7 - k)) & 1``.
    """
    if np.isscalar(value):
        if not 0 <= int(value) <= 255:
            raise ValueError(f"byte value out of range: {value}")
        return np.unpackbits(np.array([value], dtype=np.uint8))
    arr = np.asarray(value)
    if arr.dtype != np.uint8:
        if arr.size and (arr.min() < 0 or arr.max() > 255):
            raise ValueError("byte values out of range")
        arr = arr.astype(np.uint8)
    return np.unpackbits(arr[..., np.newaxis], axis=-1)


def bit_feature_matrix() -> np.ndarray:
    """The fixed (256, 8) float32 matrix whose row t is unpack_bits(t)."""
    return unpack_bits(np.arange(TABLE_ROWS, dtype=np.uint8)).astype(np.float32)


def embed_with_bias(tokens, table, projection) -> np.ndarray:
    """Embed tokens as table[t] + bits(t) @ projection, float32, (len, d)."""
    table, projection = _check_pair(table, projection)
    ids = np.frombuffer(as_bytes(tokens), dtype=np.uint8)
    bits = unpack_bits(ids).astype(np.float32)
    return table[ids] + bits @ projection


def fold(table, projection) -> np.ndarray:
    """Fold the bit projection into the table: an exact rewrite.

    The result has the same (256, d) shape, and looking up a token in it
    equals embed_with_bias for that token (to float32 rounding).
    """
    table, projection = _check_pair(table, projection)
    features = bit_feature_matrix().astype(np.float64)
    folded = table.astype(np.float64) + features @ projection.astype(np.float64)
    return folded.astype(np.float32)


def bit_bias_gradient_check(table, projection, tokens, step: float = 1e-4) -> float:
    """Max relative error between analytic and central-difference gradients.

    The probe loss is the sum of squared embedding outputs over ``tokens``;
    its gradient w.r.t. the projection is 2 * bits.T @ outputs. The check
    runs in float64 (verification precision, independent of the float32
    embedding path) and is meant for small d.
    """
    table, projection = _check_pair(table, projection)
    ids = np.frombuffer(as_bytes(tokens), dtype=np.uint8)
    rows = table.astype(np.float64)[ids]
    bits = unpack_bits(ids).astype(np.float64)
    w = projection.astype(np.float64)

    def loss(weights: np.ndarray) -> float:
        outputs = rows + bits @ weights
        return float((outputs * outputs).sum())

    analytic = 2.0 * bits.T @ (rows + bits @ w)
    numeric = np.zeros_like(w)
    for r in range(w.shape[0]):
        for c in range(w.shape[1]):
            bumped = w.copy()
            bumped[r, c] += step
            hi = loss(bumped)
            bumped[r, c] -= 2.0 * step
            lo = loss(bumped)
            numeric[r, c] = (hi - lo) / (2.0 * step)

    scale = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1e-12)
    return float((np.abs(analytic - numeric) / scale).max())


def fold_ready(gradient, threshold: float) -> bool:
    """Whether the projection's gradient norm has dropped below threshold.

    Pure predicate over a recorded gradient; the training loop that
    produces the gradient lives outside this package. Once true, fold the
    projection away and continue with the plain table.
    """
    return float(np.linalg.norm(np.asarray(gradient, dtype=np.float64))) < threshold


def save_matrix(path, matrix) -> None:
    """Write a matrix in the binary (rows, cols, float32 row-major) format."""
    arr = np.ascontiguousarray(np.asarray(matrix, dtype="<f4"))
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {arr.shape}")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(arr.shape[0], arr.shape[1]))
        fh.write(arr.tobytes())


def load_matrix(path, expected_rows: int | None = None) -> np.ndarray:
    """Read a matrix from the binary format, optionally pinning row count."""
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) != _HEADER.size:
            raise ValueError(f"matrix file too short for its header: {path}")
        rows, cols = _HEADER.unpack(header)
        payload = fh.read()
    expected = rows * cols * 4
    if len(payload) != expected:
        raise ValueError(
            f"matrix file payload is {len(payload)} bytes, expected {expected}"
        )
    if expected_rows is not None and rows != expected_rows:
        raise ValueError(f"expected {expected_rows} rows, file has {rows}")
    matrix = np.frombuffer(payload, dtype="<f4").reshape(rows, cols)
    if not np.isfinite(matrix).all():
        raise ValueError("matrix contains non-finite values")
    return matrix


def _check_pair(table, projection) -> tuple[np.ndarray, np.ndarray]:
    table = np.asarray(table, dtype=np.float32)
    projection = np.asarray(projection, dtype=np.float32)
    if table.ndim != 2 or table.shape[0] != TABLE_ROWS:
        raise ValueError(f"embedding table must be (256, d), got {table.shape}")
    if projection.ndim != 2 or projection.shape[0] != BIT_COUNT:
        raise ValueError(f"bit projection must be (8, d), got {projection.shape}")
    if table.shape[1] != projection.shape[1]:
        raise ValueError(
            f"dimension mismatch: table d={table.shape[1]}, "
            f"projection d={projection.shape[1]}"
        )
    if not np.isfinite(table).all() or not np.isfinite(projection).all():
        raise ValueError("embedding matrices must be finite")
    return table, projection
