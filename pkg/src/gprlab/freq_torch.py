"""Differentiable twin of the dominant-frequency transform.

Used inside the generator objective, so every step (framing, windowed FFT
magnitude, per-frame max, resampling, grayscale rescale) must carry
gradients.  The resampling reuses the exact weight matrices of
:mod:`gprlab.resize`, so this path agrees with the NumPy transform to float
precision.
"""

from __future__ import annotations

import numpy as np
import torch

from .errors import DegenerateInputError
from .freq import SpectrogramConfig
from .resize import resample_matrix

_RESCALE_EPS = 1e-12


class DifferentiablePhi(torch.nn.Module):
    """Maps (n, 1, H, W) time images to (n, 1, out, out) frequency images."""

    def __init__(
        self,
        input_size: int,
        cfg: SpectrogramConfig = SpectrogramConfig(),
        out_size: int | None = None,
        dtype: torch.dtype = torch.float32,
    ):
        super().__init__()
        if cfg.reduction != "max":
            raise ValueError("only the 'max' reduction is differentiable")
        if input_size < cfg.segment_length:
            raise DegenerateInputError(
                f"{input_size}-sample traces are shorter than one segment"
            )
        self.cfg = cfg
        self.out_size = out_size if out_size is not None else input_size
        n_frames = cfg.num_frames(input_size)
        if n_frames < 2:
            raise DegenerateInputError("need at least two analysis frames")
        window = np.hanning(cfg.segment_length)
        self.register_buffer("window", torch.as_tensor(window, dtype=dtype))
        self.register_buffer(
            "row_mat",
            torch.as_tensor(resample_matrix(n_frames, self.out_size), dtype=dtype),
        )
        self.register_buffer(
            "col_mat",
            torch.as_tensor(resample_matrix(input_size, self.out_size), dtype=dtype),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if x.ndim == 3:
            x = x.unsqueeze(1)
        cfg = self.cfg
        signals = x[:, 0].transpose(1, 2)  # (n, traces, samples)
        frames = signals.unfold(-1, cfg.segment_length, cfg.hop)
        spec = torch.fft.rfft(frames * self.window, n=cfg.nfft)
        profile = spec.abs().amax(dim=-1)  # (n, traces, frames)
        image = profile.transpose(1, 2)  # (n, frames, traces)
        resized = self.row_mat @ image @ self.col_mat.T

        flat = resized.flatten(1)
        lo = flat.min(dim=1).values.view(-1, 1, 1)
        hi = flat.max(dim=1).values.view(-1, 1, 1)
        span = hi - lo
        live = span > _RESCALE_EPS
        scaled = (resized - lo) * (2.0 / torch.clamp(span, min=_RESCALE_EPS)) - 1.0
        out = torch.where(live, scaled, torch.zeros_like(scaled))
        return out.unsqueeze(1)
