"""Complex single-precision vectors and matrices.

Kernels take plain ``numpy.complex64`` arrays, whose memory is already the
interleaved ``re, im, re, im, ...`` float32 layout. The helpers here convert
to and from the explicit interleaved form and the ``<re> <im>`` text format
used for stored test vectors.
"""

from __future__ import annotations

import os

import numpy as np

from ..errors import DimMismatch


def as_cvec(x) -> np.ndarray:
    a = np.ascontiguousarray(x, dtype=np.complex64)
    if a.ndim != 1:
        raise DimMismatch(f"expected a 1-D complex vector, got shape {a.shape}")
    return a


def as_cmat(x) -> np.ndarray:
    a = np.ascontiguousarray(x, dtype=np.complex64)
    if a.ndim != 2:
        raise DimMismatch(f"expected a 2-D complex matrix, got shape {a.shape}")
    return a


def to_interleaved(x: np.ndarray) -> np.ndarray:
    """float32 storage view, length ``2 * x.size``."""
    return np.ascontiguousarray(x, dtype=np.complex64).reshape(-1).view(np.float32)


def from_interleaved(data, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    flat = np.ascontiguousarray(data, dtype=np.float32)
    if flat.ndim != 1 or flat.size % 2:
        raise DimMismatch("interleaved storage must be 1-D with even length")
    z = flat.view(np.complex64)
    if rows is None:
        return z.copy()
    if rows * cols != z.size:
        raise DimMismatch(f"storage holds {z.size} elements, not {rows}x{cols}")
    return z.reshape(rows, cols).copy()


def read_vector(path: str | os.PathLike) -> np.ndarray:
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected '<re> <im>'")
            values.append(complex(float(parts[0]), float(parts[1])))
    return np.array(values, dtype=np.complex64)


def write_vector(path: str | os.PathLike, x) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for z in np.asarray(x, dtype=np.complex64).reshape(-1):
            fh.write(f"{float(z.real)!r} {float(z.imag)!r}\n")
