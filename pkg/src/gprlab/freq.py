"""Dominant-frequency B-scan transform.

Each A-scan gets a short-time Fourier analysis (16-sample Hann frames,
zero-padded to 1024 FFT bins, 50% overlap).  The frequency axis is reduced
per frame to the maximum magnitude across bins, giving a dominant-frequency
energy profile per trace; the profiles, stacked as columns, form the
frequency B-scan, which is resampled to the canonical canvas and rescaled to
[-1, 1] grayscale.

The ``argmax`` reduction (integer bin index instead of peak magnitude) is
kept behind the config for comparison; it is piecewise constant in the
input, so only the ``max`` reduction has a differentiable twin
(:mod:`gprlab.freq_torch`).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bscan import CANVAS_SIZE, BScan, RadarImage
from .errors import DegenerateInputError
from .resize import resample_2d, rescale_unit


@dataclass(frozen=True)
class SpectrogramConfig:
    nfft: int = 1024
    segment_length: int = 16
    hop: int = 8
    window: str = "hann"
    pad_mode: str = "zero"
    reduction: str = "max"  # or "argmax"

    def __post_init__(self):
        if self.segment_length > self.nfft:
            raise ValueError("segment_length must not exceed nfft")
        if self.hop < 1:
            raise ValueError("hop must be >= 1")
        if self.window != "hann":
            raise ValueError(f"unsupported window {self.window!r}")
        if self.pad_mode != "zero":
            raise ValueError(f"unsupported pad_mode {self.pad_mode!r}")
        if self.reduction not in ("max", "argmax"):
            raise ValueError(f"unsupported reduction {self.reduction!r}")

    def num_frames(self, n_samples: int) -> int:
        return (n_samples - self.segment_length) // self.hop + 1


@dataclass
class FrequencyBScan:
    pixels: np.ndarray
    source_config: SpectrogramConfig = field(default_factory=SpectrogramConfig)

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=np.float32)
        if self.pixels.ndim != 2:
            raise ValueError("FrequencyBScan pixels must be 2-D")

    def as_radar_image(self) -> RadarImage:
        return RadarImage(self.pixels, domain_tag="frequency")


def _frame_signal(samples: np.ndarray, cfg: SpectrogramConfig) -> np.ndarray:
    n = samples.shape[-1]
    if n < cfg.segment_length:
        raise DegenerateInputError(
            f"A-scan of {n} samples is shorter than the {cfg.segment_length}-sample segment"
        )
    nf = cfg.num_frames(n)
    idx = np.arange(cfg.segment_length)[None, :] + cfg.hop * np.arange(nf)[:, None]
    return samples[..., idx]


def stft_magnitude(a, cfg: SpectrogramConfig = SpectrogramConfig()) -> np.ndarray:
    """One-sided STFT magnitudes, shape (frames, nfft//2 + 1)."""
    samples = np.asarray(getattr(a, "samples", a), dtype=np.float64)
    frames = _frame_signal(samples, cfg) * np.hanning(cfg.segment_length)
    return np.abs(np.fft.rfft(frames, n=cfg.nfft, axis=-1))


def dominant_profile(samples, cfg: SpectrogramConfig = SpectrogramConfig()) -> np.ndarray:
    """Per-frame reduction of the STFT over the frequency axis."""
    mags = stft_magnitude(samples, cfg)
    if cfg.reduction == "max":
        return mags.max(axis=-1)
    return np.argmax(mags, axis=-1).astype(np.float64)


def frequency_bscan(
    b,
    cfg: SpectrogramConfig = SpectrogramConfig(),
    out_size: int = CANVAS_SIZE,
) -> FrequencyBScan:
    """The full transform: B-scan (or time image) in, grayscale image out.

    Accepts a BScan (traces are rows) or a display-oriented array/RadarImage
    (traces are columns).  The output has traces on the columns either way.
    """
    if isinstance(b, BScan):
        signals = b.traces
    elif isinstance(b, RadarImage):
        signals = b.pixels.T.astype(np.float64)
    else:
        arr = np.asarray(b, dtype=np.float64)
        if arr.ndim != 2:
            raise DegenerateInputError("expected a 2-D array")
        signals = arr.T

    profiles = dominant_profile(signals, cfg)  # (traces, frames)
    image = profiles.T  # frames on rows, traces on columns
    if min(image.shape) < 2:
        raise DegenerateInputError(
            f"profile image of shape {image.shape} is too small to resample"
        )
    resized = resample_2d(image, out_size, out_size)
    pixels = np.clip(rescale_unit(resized), -1.0, 1.0).astype(np.float32)
    return FrequencyBScan(pixels, source_config=cfg)
