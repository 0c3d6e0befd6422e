"""Core radargram data types.

Conventions: a B-scan array is stored trace-major, ``traces[i]`` being the
i-th A-scan (amplitude vs two-way time) in acquisition order.  The displayed
image form is the transpose: time runs down the rows, traces across the
columns.  ``RadarImage`` is the canonical normalized 256x256 image in that
display orientation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonFiniteDataError, ShapeMismatchError

CANVAS_SIZE = 256

CLASS_NAMES = ("concrete", "metallic", "pvc")  # fixed alphabetical order


@dataclass(frozen=True)
class ClassLabel:
    """Buried-cylinder material class with a fixed id<->name mapping."""

    id: int

    def __post_init__(self):
        if not 0 <= self.id < len(CLASS_NAMES):
            raise ValueError(f"class id must be in [0, {len(CLASS_NAMES)}), got {self.id}")

    @property
    def name(self) -> str:
        return CLASS_NAMES[self.id]

    @classmethod
    def from_name(cls, name: str) -> "ClassLabel":
        try:
            return cls(CLASS_NAMES.index(name.lower()))
        except ValueError:
            raise ValueError(f"unknown class name {name!r}, expected one of {CLASS_NAMES}") from None


CONCRETE = ClassLabel(0)
METALLIC = ClassLabel(1)
PVC = ClassLabel(2)


def _require_finite(arr: np.ndarray, what: str):
    if not np.all(np.isfinite(arr)):
        bad = int(np.count_nonzero(~np.isfinite(arr)))
        raise NonFiniteDataError(f"{what} contains {bad} non-finite value(s)")


@dataclass
class AScan:
    """Single radar trace: amplitude samples at a fixed time step."""

    samples: np.ndarray
    dt: float

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1 or self.samples.size == 0:
            raise ValueError("samples must be a non-empty 1-D array")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        _require_finite(self.samples, "A-scan samples")


@dataclass
class BScan:
    """2-D radargram: ``traces[i]`` is the i-th A-scan in acquisition order."""

    traces: np.ndarray
    dt: float
    trace_spacing: float

    def __post_init__(self):
        self.traces = np.asarray(self.traces, dtype=np.float64)
        if self.traces.ndim != 2 or self.traces.shape[0] < 1:
            raise ValueError("traces must be a 2-D array with at least one trace")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.trace_spacing > 0:
            raise ValueError(f"trace_spacing must be positive, got {self.trace_spacing}")
        _require_finite(self.traces, "B-scan traces")

    @property
    def num_traces(self) -> int:
        return self.traces.shape[0]

    @property
    def num_samples(self) -> int:
        return self.traces.shape[1]

    def image(self) -> np.ndarray:
        """Display-oriented view: time down the rows, traces across columns."""
        return self.traces.T


@dataclass
class RadarImage:
    """Canonical 256x256 image with pixels in [-1, 1].

    ``domain_tag`` distinguishes time-domain B-scans from their
    dominant-frequency-profile counterparts.
    """

    pixels: np.ndarray
    domain_tag: str = "time"
    label: ClassLabel | None = field(default=None)

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=np.float32)
        if self.pixels.shape != (CANVAS_SIZE, CANVAS_SIZE):
            raise ShapeMismatchError(
                f"RadarImage must be {CANVAS_SIZE}x{CANVAS_SIZE}, got {self.pixels.shape}"
            )
        _require_finite(self.pixels, "RadarImage pixels")
        if self.pixels.min() < -1.0 or self.pixels.max() > 1.0:
            raise ValueError("RadarImage pixels must lie in [-1, 1]")
        if self.domain_tag not in ("time", "frequency"):
            raise ValueError(f"domain_tag must be 'time' or 'frequency', got {self.domain_tag!r}")
