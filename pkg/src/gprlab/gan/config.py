"""Training configuration for the conditional WGAN-GP."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class GanConfig:
    image_size: int = 256
    latent_dim: int = 100
    num_classes: int = 3
    gp_lambda: float = 10.0
    n_critic: int = 5
    learning_rate: float = 3e-4
    batch_size: int = 16
    adam_beta1: float = 0.0
    adam_beta2: float = 0.9
    freq_loss_weight: float = 1.0
    aux_class_weight: float = 0.0
    validation_fraction: float = 0.1
    patience: int = 20
    eval_every: int = 10
    max_steps: int = 2000
    seed: int = 0

    def __post_init__(self):
        if self.image_size < 16 or self.image_size & (self.image_size - 1):
            raise ValueError("image_size must be a power of two >= 16")
        if self.latent_dim < 1 or self.num_classes < 1:
            raise ValueError("latent_dim and num_classes must be positive")
        for name in ("gp_lambda", "freq_loss_weight", "aux_class_weight",
                     "validation_fraction"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        for name in ("n_critic", "learning_rate", "batch_size", "patience",
                     "eval_every", "max_steps"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    def as_dict(self) -> dict:
        return asdict(self)

    def hash(self) -> str:
        payload = json.dumps(self.as_dict(), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()[:16]
