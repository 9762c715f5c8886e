"""Binary tensor container used to ship precomputed speech features.

Layout: three little-endian int32 values ``(L, T, D)`` followed by the
row-major float32 payload. ``L >= 1`` denotes a layered stack of shape
``(L, T, D)``; the header ``(0, 0, D)`` denotes a rank-1 vector of length
``D`` (fixed speaker embeddings). No other header combination is valid.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..errors import FeatureIOError

_HEADER = struct.Struct("<iii")


def write_tensor(path: str | Path, array: np.ndarray) -> None:
    """Write a rank-3 layered stack or a rank-1 vector to ``path``."""
    arr = np.asarray(array, dtype=np.float32)
    if arr.ndim == 3:
        header = _HEADER.pack(arr.shape[0], arr.shape[1], arr.shape[2])
    elif arr.ndim == 1:
        header = _HEADER.pack(0, 0, arr.shape[0])
    else:
        raise FeatureIOError(f"container holds rank-1 or rank-3 tensors, got rank {arr.ndim}")
    with open(path, "wb") as f:
        f.write(header)
        f.write(arr.tobytes(order="C"))


def read_tensor(path: str | Path) -> np.ndarray:
    """Read a container; returns a float32 array of rank 3 or rank 1."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise FeatureIOError(f"unreadable feature container {path}: {exc}") from exc
    if len(raw) < _HEADER.size:
        raise FeatureIOError(f"feature container {path} too short for shape header")
    l, t, d = _HEADER.unpack_from(raw)
    payload = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size)
    if l == 0 and t == 0:
        shape: tuple[int, ...] = (d,)
    elif l >= 1 and t >= 1 and d >= 1:
        shape = (l, t, d)
    else:
        raise FeatureIOError(f"invalid shape header ({l}, {t}, {d}) in {path}")
    expected = int(np.prod(shape))
    if payload.size != expected:
        raise FeatureIOError(
            f"shape header {shape} expects {expected} floats, found {payload.size} in {path}"
        )
    return payload.reshape(shape).copy()
