"""Beamforming products ``R = W x S``.

``W`` (antennas x f) is the constant precoding matrix, ``S`` (f x b) the
changing symbols matrix. Each antenna row ``w`` of ``W`` yields one output
row ``R[j] = sum_k w[k] * S[k, j]``.

naive
    Textbook interleaved complex multiply-accumulate. For every product the
    real and imaginary lanes of ``w[k]`` are duplicated and the lanes of
    ``S[k, j]`` swapped: three shuffles of a two-lane complex value, i.e. 6
    perm lanes. Arithmetic is 4 mul + 2 add for the product and 2 add to
    accumulate.
optimized
    ``w`` is split once into broadcast real and imaginary parts (the only
    shuffles; cached per ``W``). ``S`` is read as two stride-2 streams of
    real and imaginary lanes so the inner loop is nothing but 4 fma per
    complex product into planar accumulators.

Counts are booked per output row.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimMismatch
from .counting import FlopCounter, tally
from .fft import fma
from .vectors import as_cmat, as_cvec

VARIANTS = ("naive", "optimized")

f32 = np.float32


@dataclass(frozen=True)
class BeamformDims:
    antennas: int = 64
    f: int = 36
    b: int = 60

    def __post_init__(self):
        if self.antennas < 1 or self.b < 1 or self.f < 0:
            raise DimMismatch(f"invalid dimensions {self}")


def beamform_oracle(W, S) -> np.ndarray:
    """Double-precision direct sum; returns complex128."""
    W = np.asarray(W, dtype=np.complex128)
    S = np.asarray(S, dtype=np.complex128)
    A, f = W.shape
    b = S.shape[1]
    R = np.zeros((A, b), dtype=np.complex128)
    for k in range(f):
        R += W[:, k, None] * S[None, k, :]
    return R


def _check(W: np.ndarray, S: np.ndarray) -> None:
    if W.shape[1] != S.shape[0]:
        raise DimMismatch(f"W has {W.shape[1]} columns but S has {S.shape[0]} rows")
    if S.shape[1] < 1:
        raise DimMismatch("S needs at least one column")


def _join(re, im) -> np.ndarray:
    out = np.empty(re.shape, dtype=np.complex64)
    out.real = re
    out.imag = im
    return out


def _naive_rows(W: np.ndarray, S: np.ndarray, counter: FlopCounter | None) -> np.ndarray:
    A, f = W.shape
    b = S.shape[1]
    acc_re = np.zeros((A, b), dtype=f32)
    acc_im = np.zeros((A, b), dtype=f32)
    for k in range(f):
        wr, wi = W[:, k, None].real, W[:, k, None].imag
        sr, si = S[k].real, S[k].imag
        p_re = wr * sr - wi * si
        p_im = wr * si + wi * sr
        acc_re += p_re
        acc_im += p_im
    mac = A * f * b
    tally(counter, "inner", load=4 * mac, perm=6 * mac, mul=4 * mac, add=4 * mac)
    tally(counter, "epilogue", store=2 * A * b)
    return _join(acc_re, acc_im)


def split_weights(W: np.ndarray, counter: FlopCounter | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Planar broadcast form of ``W`` (the optimized variant's layout pass)."""
    A, f = W.shape
    wr = np.ascontiguousarray(W.real)
    wi = np.ascontiguousarray(W.imag)
    wr.flags.writeable = False
    wi.flags.writeable = False
    tally(counter, "layout", load=2 * A * f, perm=2 * A * f)
    return wr, wi


def _fused_rows(wr: np.ndarray, wi: np.ndarray, S: np.ndarray,
                counter: FlopCounter | None) -> np.ndarray:
    A, f = wr.shape
    b = S.shape[1]
    acc_re = np.zeros((A, b), dtype=f32)
    acc_im = np.zeros((A, b), dtype=f32)
    sr_all, si_all = S.real, S.imag  # stride-2 views, no data movement
    for k in range(f):
        a_r, a_i = wr[:, k, None], wi[:, k, None]
        sr, si = sr_all[k], si_all[k]
        acc_re = fma(a_r, sr, acc_re)
        acc_re = fma(-a_i, si, acc_re)
        acc_im = fma(a_r, si, acc_im)
        acc_im = fma(a_i, sr, acc_im)
    mac = A * f * b
    tally(counter, "inner", load=2 * mac, fma=4 * mac)
    tally(counter, "epilogue", store=2 * A * b)
    return _join(acc_re, acc_im)


def beamform_row_naive(w, S, counter: FlopCounter | None = None) -> np.ndarray:
    w, S = as_cvec(w), as_cmat(S)
    _check(w[None, :], S)
    return _naive_rows(w[None, :], S, counter)[0]


def beamform_row_optimized(w, S, counter: FlopCounter | None = None) -> np.ndarray:
    w, S = as_cvec(w), as_cmat(S)
    _check(w[None, :], S)
    wr, wi = split_weights(w[None, :], counter)
    return _fused_rows(wr, wi, S, counter)[0]


class Beamformer:
    """Applies a fixed precoding matrix to successive symbol matrices.

    The planar split of ``W`` happens once, here; ``apply`` only reads it,
    so one instance can be shared between threads.
    """

    def __init__(self, W, counter: FlopCounter | None = None):
        self.W = as_cmat(W).copy()
        self.W.flags.writeable = False
        self._wr, self._wi = split_weights(self.W, counter)

    @property
    def antennas(self) -> int:
        return self.W.shape[0]

    def apply(self, S, variant: str = "optimized", counter: FlopCounter | None = None) -> np.ndarray:
        S = as_cmat(S)
        _check(self.W, S)
        if variant == "optimized":
            return _fused_rows(self._wr, self._wi, S, counter)
        if variant == "naive":
            return _naive_rows(self.W, S, counter)
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")


def beamform_full(W, S, variant: str = "optimized", counter: FlopCounter | None = None) -> np.ndarray:
    """``W @ S`` with the chosen row kernel applied to every antenna row."""
    if variant == "naive":
        W, S = as_cmat(W), as_cmat(S)
        _check(W, S)
        return _naive_rows(W, S, counter)
    return Beamformer(W, counter if variant == "optimized" else None).apply(S, variant, counter)
