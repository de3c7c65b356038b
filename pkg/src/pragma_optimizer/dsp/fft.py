"""Radix-2 decimation-in-time FFT, single precision.

Two variants share the same data flow (bit-reversal, then log2(n) butterfly
stages over the whole array):

``fft`` / ``ifft``
    twiddles come from a precomputed per-size plan; the twiddle product in
    every butterfly is one mul plus one fma per output lane.
``fft_naive``
    hand-coded style: twiddles are regenerated in every butterfly group by
    the trig recurrence ``w <- w * step``, and complex products are unfused.

Forward transforms are unnormalized; inverses apply ``1/n``.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..errors import NonPowerOfTwo
from .counting import FlopCounter, tally
from .vectors import as_cvec

f32 = np.float32


def is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def _check_size(n: int) -> None:
    if not is_power_of_two(n):
        raise NonPowerOfTwo(f"FFT size must be a power of two, got {n}")


def fma(a, b, c):
    """Single-rounding ``a*b + c`` on float32 data.

    A float32 product is exact in float64, so only the final cast rounds
    (up to a rare double-rounding tie).
    """
    return (np.float64(1) * a * b + c).astype(f32)


def dft_oracle(x) -> np.ndarray:
    """Direct O(n^2) DFT in double precision, rounded to complex64."""
    x = np.asarray(x, dtype=np.complex128).reshape(-1)
    n = x.size
    if n == 0:
        return np.zeros(0, dtype=np.complex64)
    jk = np.outer(np.arange(n), np.arange(n)) % n
    return (np.exp(-2j * np.pi * jk / n) @ x).astype(np.complex64)


@lru_cache(maxsize=None)
def bit_reverse_indices(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    rev.flags.writeable = False
    return rev


@lru_cache(maxsize=None)
def twiddle_table(n: int, inverse: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Planar float32 twiddles ``exp(-+2 pi i k / n)`` for ``k < n/2``."""
    sign = 1.0 if inverse else -1.0
    w = np.exp(sign * 2j * np.pi * np.arange(n // 2) / n)
    re, im = w.real.astype(f32), w.imag.astype(f32)
    re.flags.writeable = False
    im.flags.writeable = False
    return re, im


def _bit_reverse(re: np.ndarray, im: np.ndarray, counter: FlopCounter | None):
    n = re.size
    rev = bit_reverse_indices(n)
    tally(counter, "layout", load=2 * n, store=2 * n)
    return re[rev], im[rev]


def _stages_planned(re, im, inverse: bool, counter: FlopCounter | None):
    n = re.size
    tw_re, tw_im = twiddle_table(n, inverse)
    m = 2
    while m <= n:
        half = m // 2
        stride = n // m
        wr = tw_re[::stride][:half]
        wi = tw_im[::stride][:half]
        a_re = re.reshape(-1, m)[:, :half]
        a_im = im.reshape(-1, m)[:, :half]
        b_re = re.reshape(-1, m)[:, half:]
        b_im = im.reshape(-1, m)[:, half:]
        # t = w * b: one mul and one fma per lane
        t_re = fma(wr, b_re, -(wi * b_im))
        t_im = fma(wr, b_im, wi * b_re)
        new_re = np.concatenate([a_re + t_re, a_re - t_re], axis=1)
        new_im = np.concatenate([a_im + t_im, a_im - t_im], axis=1)
        re, im = new_re.reshape(-1), new_im.reshape(-1)
        nb = n // 2
        tally(counter, "inner", load=6 * nb, mul=2 * nb, fma=2 * nb, add=4 * nb, store=4 * nb)
        m *= 2
    return re, im


def _stages_recurrence(re, im, inverse: bool, counter: FlopCounter | None):
    n = re.size
    m = 2
    while m <= n:
        half = m // 2
        groups = n // m
        sign = 1.0 if inverse else -1.0
        step = np.exp(sign * 2j * np.pi / m)
        # w_0 = 1, w_j = w_{j-1} * step, restarted in every group
        w = np.cumprod(np.concatenate([[1.0 + 0j], np.full(half - 1, step)]))
        wr = w.real.astype(f32)
        wi = w.imag.astype(f32)
        a_re = re.reshape(-1, m)[:, :half]
        a_im = im.reshape(-1, m)[:, :half]
        b_re = re.reshape(-1, m)[:, half:]
        b_im = im.reshape(-1, m)[:, half:]
        t_re = wr * b_re - wi * b_im
        t_im = wr * b_im + wi * b_re
        new_re = np.concatenate([a_re + t_re, a_re - t_re], axis=1)
        new_im = np.concatenate([a_im + t_im, a_im - t_im], axis=1)
        re, im = new_re.reshape(-1), new_im.reshape(-1)
        nb = n // 2
        updates = groups * (half - 1)
        tally(counter, "inner", load=4 * nb, mul=4 * nb + 4 * updates,
              add=6 * nb + 2 * updates, store=4 * nb)
        m *= 2
    return re, im


def _planar(x) -> tuple[np.ndarray, np.ndarray]:
    x = as_cvec(x)
    _check_size(x.size)
    return x.real.copy(), x.imag.copy()


def _join(re, im) -> np.ndarray:
    out = np.empty(re.size, dtype=np.complex64)
    out.real = re
    out.imag = im
    return out


def _scale(re, im, counter):
    n = re.size
    s = f32(1.0 / n)
    tally(counter, "epilogue", mul=2 * n)
    return re * s, im * s


def fft(x, counter: FlopCounter | None = None) -> np.ndarray:
    re, im = _planar(x)
    re, im = _bit_reverse(re, im, counter)
    return _join(*_stages_planned(re, im, False, counter))


def ifft_unscaled(X, counter: FlopCounter | None = None) -> np.ndarray:
    """Inverse transform without the ``1/n`` factor."""
    re, im = _planar(X)
    re, im = _bit_reverse(re, im, counter)
    return _join(*_stages_planned(re, im, True, counter))


def ifft(X, counter: FlopCounter | None = None) -> np.ndarray:
    re, im = _planar(X)
    re, im = _bit_reverse(re, im, counter)
    re, im = _stages_planned(re, im, True, counter)
    return _join(*_scale(re, im, counter))


def fft_naive(x, counter: FlopCounter | None = None, inverse: bool = False) -> np.ndarray:
    re, im = _planar(x)
    re, im = _bit_reverse(re, im, counter)
    re, im = _stages_recurrence(re, im, inverse, counter)
    if inverse:
        re, im = _scale(re, im, counter)
    return _join(re, im)
