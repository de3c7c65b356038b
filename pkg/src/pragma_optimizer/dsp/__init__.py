"""Signal-processing building blocks: FFT filtering and beamforming."""

from .beamform import (
    BeamformDims,
    Beamformer,
    beamform_full,
    beamform_oracle,
    beamform_row_naive,
    beamform_row_optimized,
)
from .counting import FlopCounter
from .fft import dft_oracle, fft, fft_naive, ifft
from .filter import FilterConfig, circular_convolve_oracle, filter_apply
from .generators import make_bbs_generators

__all__ = [
    "BeamformDims",
    "Beamformer",
    "FilterConfig",
    "FlopCounter",
    "beamform_full",
    "beamform_oracle",
    "beamform_row_naive",
    "beamform_row_optimized",
    "circular_convolve_oracle",
    "dft_oracle",
    "fft",
    "fft_naive",
    "filter_apply",
    "ifft",
    "make_bbs_generators",
]
