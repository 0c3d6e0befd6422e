"""Reference statistical distances used as diagnostics and test oracles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import DegenerateInputError, ShapeMismatchError


@dataclass
class DiscreteDistribution:
    """Probability vector over a finite support."""

    probs: np.ndarray

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=np.float64)
        if self.probs.ndim != 1 or self.probs.size == 0:
            raise ValueError("probs must be a non-empty 1-D array")
        if np.any(self.probs < 0):
            raise ValueError("probabilities must be non-negative")
        if abs(self.probs.sum() - 1.0) > 1e-9:
            raise ValueError(f"probabilities must sum to 1, got {self.probs.sum()}")


@dataclass
class EmpiricalSample:
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.size == 0:
            raise DegenerateInputError("empirical sample must be non-empty")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("empirical sample must be finite")


def mse(a, b) -> float:
    """Mean squared elementwise difference."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeMismatchError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.mean((a - b) ** 2))


def kl_divergence(p: DiscreteDistribution, q: DiscreteDistribution) -> float:
    """KL(P||Q) in nats; requires absolute continuity (q=0 implies p=0)."""
    if not isinstance(p, DiscreteDistribution):
        p = DiscreteDistribution(p)
    if not isinstance(q, DiscreteDistribution):
        q = DiscreteDistribution(q)
    if p.probs.shape != q.probs.shape:
        raise ShapeMismatchError("distributions must share a support")
    bad = (q.probs == 0) & (p.probs > 0)
    if np.any(bad):
        raise ValueError("KL divergence undefined: q assigns zero mass where p does not")
    mask = p.probs > 0
    return float(np.sum(p.probs[mask] * np.log(p.probs[mask] / q.probs[mask])))


def wasserstein_1d(a: EmpiricalSample, b: EmpiricalSample) -> float:
    """Exact 1-D earth mover's distance between empirical samples.

    For equal sample counts this is the mean absolute difference of the
    sorted samples; unequal counts fall back to the general CDF-based form.
    """
    if not isinstance(a, EmpiricalSample):
        a = EmpiricalSample(a)
    if not isinstance(b, EmpiricalSample):
        b = EmpiricalSample(b)
    if a.values.size == b.values.size:
        return float(np.mean(np.abs(np.sort(a.values) - np.sort(b.values))))
    return float(stats.wasserstein_distance(a.values, b.values))
