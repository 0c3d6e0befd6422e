"""Source waveforms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def ricker(t, f: float):
    """Ricker wavelet (1 - 2 pi^2 f^2 t^2) exp(-pi^2 f^2 t^2), peak at t=0."""
    if not f > 0:
        raise ValueError(f"center frequency must be positive, got {f}")
    u = (np.pi * f * np.asarray(t, dtype=np.float64)) ** 2
    out = (1.0 - 2.0 * u) * np.exp(-u)
    return float(out) if np.ndim(t) == 0 else out


@dataclass(frozen=True)
class Waveform:
    kind: str = "ricker"
    center_frequency: float = 1.5e9
    amplitude: float = 1.0

    def __post_init__(self):
        if self.kind != "ricker":
            raise ValueError(f"unsupported waveform kind {self.kind!r}")
        if not self.center_frequency > 0:
            raise ValueError("center_frequency must be positive")

    def sample(self, times, delay: float | None = None) -> np.ndarray:
        """Evaluate at the given times, peak shifted to ``delay``.

        The default delay of 1.5 periods lets the pulse ramp up from
        effectively zero at t=0.
        """
        if delay is None:
            delay = self.delay
        return self.amplitude * ricker(np.asarray(times) - delay, self.center_frequency)

    @property
    def delay(self) -> float:
        return 1.5 / self.center_frequency
