"""Standard GPR preprocessing: dewow, background removal, time gain."""

from __future__ import annotations

import numpy as np

from .bscan import BScan
from .errors import NonFiniteDataError


def preprocess_bscan(
    raw: BScan,
    *,
    dewow: bool = False,
    background_removal: bool = False,
    gain: float = 0.0,
) -> BScan:
    """Apply the standard preprocessing trio to a B-scan.

    dewow subtracts the per-trace mean; background removal subtracts the mean
    trace across all traces (killing horizontal banding such as the direct
    wave); gain multiplies by a time-linear ramp ``1 + gain * k / (N - 1)``
    over the sample index k.  All steps disabled is the identity.
    """
    data = np.asarray(raw.traces, dtype=np.float64)
    if not np.all(np.isfinite(data)):
        raise NonFiniteDataError("preprocess_bscan: input B-scan has non-finite amplitudes")

    out = data.copy()
    if dewow:
        out = out - out.mean(axis=1, keepdims=True)
    if background_removal:
        out = out - out.mean(axis=0, keepdims=True)
    if gain != 0.0:
        n = out.shape[1]
        ramp = 1.0 + gain * (np.arange(n) / max(n - 1, 1))
        out = out * ramp[np.newaxis, :]
    return BScan(out, dt=raw.dt, trace_spacing=raw.trace_spacing)
