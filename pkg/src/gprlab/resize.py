"""Resampling to the canonical 256x256 canvas.

Separable windowed-sinc interpolation with a Hamming window.  The kernel
support is KERNEL_SUPPORT source pixels per side (scaled by the decimation
factor when shrinking, which is what gives the anti-aliasing).  Resampling is
expressed as two dense matrix products, so the exact same weights can be
reused by the differentiable frequency-transform path.
"""

from __future__ import annotations

import numpy as np

from .bscan import CANVAS_SIZE, BScan, RadarImage
from .errors import DegenerateInputError

KERNEL_SUPPORT = 3.0


def _hamming_sinc(t: np.ndarray) -> np.ndarray:
    """sinc(t) windowed by a Hamming taper over |t| <= KERNEL_SUPPORT."""
    x = t / KERNEL_SUPPORT
    window = np.where(np.abs(x) <= 1.0, 0.54 + 0.46 * np.cos(np.pi * x), 0.0)
    return np.sinc(t) * window


def resample_matrix(n_in: int, n_out: int) -> np.ndarray:
    """Weight matrix W (n_out x n_in) such that ``out = W @ signal``.

    Output sample j is centered at source coordinate (j + 0.5) * n_in/n_out
    - 0.5; edges are handled by clamping source indices (edge padding).  Each
    row is normalized to unit sum, so constants are preserved exactly.
    """
    if n_in < 2:
        raise DegenerateInputError(f"cannot resample a length-{n_in} axis")
    scale = n_in / n_out
    filt_scale = max(scale, 1.0)
    support = KERNEL_SUPPORT * filt_scale

    weights = np.zeros((n_out, n_in), dtype=np.float64)
    for j in range(n_out):
        center = (j + 0.5) * scale - 0.5
        lo = int(np.floor(center - support))
        hi = int(np.ceil(center + support))
        src = np.arange(lo, hi + 1)
        w = _hamming_sinc((src - center) / filt_scale)
        w /= w.sum()
        np.add.at(weights[j], np.clip(src, 0, n_in - 1), w)
    return weights


def rescale_unit(img: np.ndarray, eps: float = 1e-12) -> np.ndarray:
    """Linearly map min->-1 and max->+1; constant input maps to all zeros."""
    lo = float(img.min())
    hi = float(img.max())
    if hi - lo < eps:
        return np.zeros_like(img)
    return (img - lo) * (2.0 / (hi - lo)) - 1.0


def resample_2d(img: np.ndarray, out_rows: int, out_cols: int) -> np.ndarray:
    """Separable Hamming-windowed-sinc resampling of a 2-D array."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise DegenerateInputError("expected a 2-D array")
    row_w = resample_matrix(img.shape[0], out_rows)
    col_w = resample_matrix(img.shape[1], out_cols)
    return row_w @ img @ col_w.T


def downsample_stack(images: np.ndarray, size: int) -> np.ndarray:
    """Resample a stack of already-normalized images to ``size`` x ``size``.

    No per-image rescale: relative contrast between images is preserved,
    only windowed-sinc overshoot is clipped back into [-1, 1].
    """
    images = np.asarray(images)
    if images.ndim != 3:
        raise DegenerateInputError("expected an (N, H, W) stack")
    if images.shape[1:] == (size, size):
        return images.astype(np.float32)
    row_w = resample_matrix(images.shape[1], size)
    col_w = resample_matrix(images.shape[2], size)
    out = np.einsum("rh,nhw,cw->nrc", row_w, images.astype(np.float64), col_w)
    return np.clip(out, -1.0, 1.0).astype(np.float32)


def resize_to_canvas(b: BScan | np.ndarray, domain_tag: str = "time") -> RadarImage:
    """Resample a B-scan (or a raw display-oriented array) to 256x256.

    The result is rescaled so that min -> -1 and max -> +1, matching the
    generator's tanh output range; constant inputs map to exactly zero.
    """
    if isinstance(b, BScan):
        img = b.image()
    else:
        img = np.asarray(b, dtype=np.float64)
    if img.ndim != 2 or min(img.shape) < 2:
        raise DegenerateInputError(f"cannot resize array of shape {getattr(img, 'shape', None)}")
    resized = resample_2d(img, CANVAS_SIZE, CANVAS_SIZE)
    pixels = rescale_unit(resized)
    # windowed sinc can overshoot only between samples, never at the rescale
    # anchors, but guard against float round-off at the extremes
    return RadarImage(np.clip(pixels, -1.0, 1.0).astype(np.float32), domain_tag=domain_tag)
