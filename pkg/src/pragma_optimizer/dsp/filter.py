"""Frequency-domain filtering: ``ifft(fft(s) * H)`` at a fixed FFT size."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import SizeMismatch
from .counting import FlopCounter, tally
from .fft import _check_size, fft, fft_naive, fma, ifft_unscaled
from .vectors import as_cvec

VARIANTS = ("naive", "optimized")


@dataclass(frozen=True)
class FilterConfig:
    """Filter of size ``n`` given by its spectrum ``H`` (the FFT of the taps).

    The optimized path folds the inverse transform's ``1/n`` into a cached
    planar copy of ``H``, computed once here.
    """

    n: int
    H: np.ndarray
    _h_re: np.ndarray = field(init=False, repr=False, compare=False)
    _h_im: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        _check_size(self.n)
        H = as_cvec(self.H).copy()
        if H.size != self.n:
            raise SizeMismatch(f"filter spectrum has {H.size} bins, expected {self.n}")
        H.flags.writeable = False
        object.__setattr__(self, "H", H)
        scaled = (H.astype(np.complex128) / self.n).astype(np.complex64)
        h_re, h_im = scaled.real.copy(), scaled.imag.copy()
        h_re.flags.writeable = False
        h_im.flags.writeable = False
        object.__setattr__(self, "_h_re", h_re)
        object.__setattr__(self, "_h_im", h_im)

    @classmethod
    def from_taps(cls, h) -> FilterConfig:
        h = as_cvec(h)
        return cls(h.size, fft(h))


def circular_convolve_oracle(s, h) -> np.ndarray:
    """``y[k] = sum_j s[j] h[(k - j) mod n]`` by direct summation in double."""
    s = np.asarray(s, dtype=np.complex128).reshape(-1)
    h = np.asarray(h, dtype=np.complex128).reshape(-1)
    if s.size != h.size:
        raise SizeMismatch(f"lengths differ: {s.size} vs {h.size}")
    n = s.size
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return (h[idx] @ s).astype(np.complex64)


def _pointwise_naive(X: np.ndarray, H: np.ndarray, counter) -> np.ndarray:
    xr, xi = X.real, X.imag
    hr, hi = H.real, H.imag
    out = np.empty_like(X)
    out.real = xr * hr - xi * hi
    out.imag = xr * hi + xi * hr
    n = X.size
    tally(counter, "inner", load=4 * n, mul=4 * n, add=2 * n, store=2 * n)
    return out


def _pointwise_fused(X: np.ndarray, hr: np.ndarray, hi: np.ndarray, counter) -> np.ndarray:
    xr, xi = X.real, X.imag
    out = np.empty_like(X)
    out.real = fma(xr, hr, -(xi * hi))
    out.imag = fma(xr, hi, xi * hr)
    n = X.size
    tally(counter, "inner", load=4 * n, mul=2 * n, fma=2 * n, store=2 * n)
    return out


def filter_apply(s, cfg: FilterConfig, counter: FlopCounter | None = None,
                 variant: str = "optimized") -> np.ndarray:
    s = as_cvec(s)
    if s.size != cfg.n:
        raise SizeMismatch(f"signal has {s.size} samples, filter expects {cfg.n}")
    if variant == "optimized":
        Y = _pointwise_fused(fft(s, counter), cfg._h_re, cfg._h_im, counter)
        return ifft_unscaled(Y, counter)
    if variant == "naive":
        Y = _pointwise_naive(fft_naive(s, counter), cfg.H, counter)
        return fft_naive(Y, counter, inverse=True)
    raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
