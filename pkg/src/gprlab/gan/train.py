"""Conditional WGAN-GP training loop.

Per generator step the critic takes ``n_critic`` Adam updates, each on a
fresh real minibatch with fresh latents and a fresh interpolation draw, then
the generator takes one.  A held-out split provides the early-stopping
signal: the critic's Wasserstein estimate (mean real score minus mean fake
score), smoothed with a moving average, which shrinks as the generator
closes the gap.  Training stops when the smoothed value stops decreasing for
``patience`` evaluations or at ``max_steps``; the returned checkpoint is the
best-validation snapshot.

A non-finite loss anywhere aborts with the last good checkpoint attached to
the raised error.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
import torch

from ..errors import NumericalAbortError
from ..freq import SpectrogramConfig
from ..freq_torch import DifferentiablePhi
from .checkpoint import GanCheckpoint, build_models, from_models, make_optimizers, \
    restore_optimizers
from .config import GanConfig
from .losses import critic_loss, generator_loss

VAL_WINDOW = 10
MAX_VAL_BATCH = 64

CSV_COLUMNS = ("step", "critic_loss", "gen_loss", "gp", "freq_loss", "val_loss")


@dataclass
class TrainingLog:
    updates: list[dict] = field(default_factory=list)

    def record(self, **kwargs):
        self.updates.append(kwargs)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
            writer.writeheader()
            for row in self.updates:
                writer.writerow({k: row.get(k, "") for k in CSV_COLUMNS})


def _validate_dataset(images: np.ndarray, labels: np.ndarray, cfg: GanConfig):
    images = np.asarray(images, dtype=np.float32)
    labels = np.asarray(labels, dtype=np.int64)
    if images.ndim != 3 or images.shape[0] == 0:
        raise ValueError("expected a non-empty (N, H, W) image stack")
    if images.shape[1:] != (cfg.image_size, cfg.image_size):
        raise ValueError(
            f"images are {images.shape[1:]}, config wants "
            f"({cfg.image_size}, {cfg.image_size})"
        )
    if labels.shape != (images.shape[0],):
        raise ValueError("labels must be one id per image")
    if labels.min() < 0 or labels.max() >= cfg.num_classes:
        raise ValueError(f"label ids must be in [0, {cfg.num_classes})")
    return images, labels


class _Sampler:
    """Deterministic minibatch sampler over a fixed index set."""

    def __init__(self, n: int, batch: int, rng: np.random.Generator):
        self.n = n
        self.batch = min(batch, n)
        self.rng = rng

    def next(self) -> np.ndarray:
        return self.rng.choice(self.n, size=self.batch, replace=self.n < self.batch * 2)


def train_wgan_gp(
    images,
    labels,
    cfg: GanConfig,
    *,
    resume: GanCheckpoint | None = None,
    phi: DifferentiablePhi | None = None,
    spectrogram: SpectrogramConfig | None = None,
) -> tuple[GanCheckpoint, TrainingLog]:
    images, labels = _validate_dataset(images, labels, cfg)

    torch.manual_seed(cfg.seed)
    rng = np.random.default_rng(cfg.seed)
    draw = torch.Generator().manual_seed(cfg.seed + 1)

    if resume is not None:
        from .checkpoint import restore_models

        gen, critic = restore_models(resume)
        g_opt, c_opt = restore_optimizers(resume, gen, critic)
        start_step = resume.step
    else:
        gen, critic = build_models(cfg)
        g_opt, c_opt = make_optimizers(cfg, gen, critic)
        start_step = 0
    gen.train()
    critic.train()

    if phi is None and cfg.freq_loss_weight > 0:
        phi = DifferentiablePhi(cfg.image_size, spectrogram or SpectrogramConfig())

    # held-out split for the early-stopping signal
    order = rng.permutation(images.shape[0])
    n_val = int(round(cfg.validation_fraction * images.shape[0]))
    val_idx, train_idx = order[:n_val], order[n_val:]
    if train_idx.size == 0:
        train_idx = order
    use_val = val_idx.size > 0
    if use_val:
        val_real = torch.from_numpy(images[val_idx[:MAX_VAL_BATCH]]).unsqueeze(1)
        val_z = torch.randn(val_real.shape[0], cfg.latent_dim, generator=draw)
        val_labels = torch.randint(cfg.num_classes, (val_real.shape[0],), generator=draw)

    sampler = _Sampler(train_idx.size, cfg.batch_size, rng)

    def batch():
        idx = train_idx[sampler.next()]
        x = torch.from_numpy(images[idx]).unsqueeze(1)
        y = torch.from_numpy(labels[idx])
        return x, y

    def latent(n):
        return torch.randn(n, cfg.latent_dim, generator=draw)

    def snapshot(step):
        return from_models(cfg, gen, critic, g_opt, c_opt, step=step)

    def check(value: torch.Tensor, what: str, ckpt):
        if not torch.isfinite(value).all():
            raise NumericalAbortError(f"non-finite {what}", checkpoint=ckpt)

    log = TrainingLog()
    last_good = snapshot(start_step)
    best = last_good
    val_history: list[float] = []
    best_avg = np.inf
    evals_since_best = 0

    step = start_step
    for step in range(start_step + 1, start_step + cfg.max_steps + 1):
        for _ in range(cfg.n_critic):
            real, real_y = batch()
            z = latent(real.shape[0])
            y = torch.randint(cfg.num_classes, (real.shape[0],), generator=draw)
            with torch.no_grad():
                fake = gen(z, y)
            eps = torch.rand(real.shape[0], generator=draw)
            try:
                loss, parts = critic_loss(
                    critic, real, fake, cfg, real_labels=real_y, eps=eps
                )
            except NumericalAbortError as exc:
                raise NumericalAbortError(str(exc), checkpoint=last_good) from None
            check(loss, "critic loss", last_good)
            c_opt.zero_grad()
            loss.backward()
            c_opt.step()
            log.record(step=step, critic_loss=loss.item(), gp=parts["gp"].item())

        real, _ = batch()
        z = latent(real.shape[0])
        y = torch.randint(cfg.num_classes, (real.shape[0],), generator=draw)
        loss, parts, _ = generator_loss(gen, critic, z, y, real, cfg, phi=phi)
        check(loss, "generator loss", last_good)
        g_opt.zero_grad()
        loss.backward()
        g_opt.step()
        gen_row = {"step": step, "gen_loss": loss.item()}
        if "freq" in parts:
            gen_row["freq_loss"] = parts["freq"].item()

        if use_val and step % cfg.eval_every == 0:
            with torch.no_grad():
                was_training = gen.training
                gen.eval()
                fake_val = gen(val_z, val_labels)
                gen.train(was_training)
                real_scores, _ = critic(val_real)
                fake_scores, _ = critic(fake_val)
                val = float(real_scores.mean() - fake_scores.mean())
            if not np.isfinite(val):
                raise NumericalAbortError("non-finite validation loss", checkpoint=last_good)
            gen_row["val_loss"] = val
            val_history.append(val)
            avg = float(np.mean(val_history[-VAL_WINDOW:]))
            last_good = snapshot(step)
            if avg < best_avg:
                best_avg = avg
                best = last_good
                evals_since_best = 0
            else:
                evals_since_best += 1
            log.record(**gen_row)
            if evals_since_best >= cfg.patience:
                break
            continue
        log.record(**gen_row)

    final = snapshot(step)
    if not use_val:
        best = final
    return best, log


def sample_conditional(ckpt: GanCheckpoint, labels, seed: int = 0) -> np.ndarray:
    """Deterministic class-conditional samples, shape (n, H, W) in (-1, 1)."""
    from .checkpoint import restore_models

    labels = np.asarray(labels, dtype=np.int64)
    if labels.ndim != 1 or labels.size == 0:
        raise ValueError("labels must be a non-empty 1-D list of class ids")
    if labels.min() < 0 or labels.max() >= ckpt.config.num_classes:
        raise ValueError(f"label ids must be in [0, {ckpt.config.num_classes})")
    gen, _ = restore_models(ckpt)
    gen.eval()
    g = torch.Generator().manual_seed(seed)
    z = torch.randn(labels.size, ckpt.config.latent_dim, generator=g)
    with torch.no_grad():
        out = gen(z, torch.from_numpy(labels))
    return out.squeeze(1).numpy()
