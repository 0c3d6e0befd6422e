"""Class-conditional WGAN-GP with the auxiliary frequency-domain objective."""

from .checkpoint import GanCheckpoint, build_models, load_checkpoint, save_checkpoint
from .config import GanConfig
from .losses import critic_loss, freq_loss, generator_loss, gradient_penalty
from .models import Critic, Generator
from .train import TrainingLog, sample_conditional, train_wgan_gp

__all__ = [
    "Critic",
    "GanCheckpoint",
    "GanConfig",
    "Generator",
    "TrainingLog",
    "build_models",
    "critic_loss",
    "freq_loss",
    "generator_loss",
    "gradient_penalty",
    "load_checkpoint",
    "sample_conditional",
    "save_checkpoint",
    "train_wgan_gp",
]
