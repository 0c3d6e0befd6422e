"""Critic and generator objectives.

Critic:  mean D(fake) - mean D(real) + lambda * penalty (+ optional class
cross entropy on real labeled images).  The penalty drives the critic's
input-gradient norm toward 1 on random interpolates of real and fake
batches.

Generator:  -mean D(G(z)) + lambda_f * mean |phi(real) - phi(G(z))| (+
optional class cross entropy of the critic's auxiliary head against the
conditioning labels).  The frequency term only reaches parameters through
the generator, so it lives in the generator objective.
"""

from __future__ import annotations

import torch

from ..errors import NumericalAbortError
from .config import GanConfig

_LOG_CLAMP = 1e-12


def _scores(critic, x):
    out = critic(x)
    return out[0] if isinstance(out, tuple) else out


def gradient_penalty(
    critic,
    real: torch.Tensor,
    fake: torch.Tensor,
    *,
    eps: torch.Tensor | None = None,
    seed: int | None = None,
) -> torch.Tensor:
    """Mean (||grad_xhat D(xhat)||_2 - 1)^2, unscaled; caller applies lambda.

    ``eps`` is the per-sample interpolation draw; pass it (or a seed) to make
    the penalty reproducible.
    """
    if real.shape != fake.shape:
        raise ValueError(f"real {tuple(real.shape)} and fake {tuple(fake.shape)} differ")
    n = real.shape[0]
    if eps is None:
        gen = None
        if seed is not None:
            gen = torch.Generator(device=real.device).manual_seed(seed)
        eps = torch.rand(n, generator=gen, dtype=real.dtype, device=real.device)
    eps = eps.view(n, *([1] * (real.ndim - 1)))

    x_hat = (eps * real + (1.0 - eps) * fake).detach().requires_grad_(True)
    scores = _scores(critic, x_hat)
    grads = torch.autograd.grad(
        outputs=scores.sum(), inputs=x_hat, create_graph=True
    )[0]
    if not torch.all(torch.isfinite(grads)):
        raise NumericalAbortError("non-finite critic input gradients in the penalty term")
    norms = grads.flatten(1).norm(2, dim=1)
    return ((norms - 1.0) ** 2).mean()


def class_cross_entropy(logits: torch.Tensor, labels: torch.Tensor) -> torch.Tensor:
    probs = torch.softmax(logits, dim=1)
    picked = probs.gather(1, labels.view(-1, 1)).clamp_min(_LOG_CLAMP)
    return -torch.log(picked).mean()


def critic_loss(
    critic,
    real: torch.Tensor,
    fake: torch.Tensor,
    cfg: GanConfig,
    *,
    real_labels: torch.Tensor | None = None,
    eps: torch.Tensor | None = None,
    seed: int | None = None,
):
    """Returns (loss, parts) where parts holds the individual terms."""
    fake_scores, _ = critic(fake)
    real_scores, real_aux = critic(real)
    wasserstein = fake_scores.mean() - real_scores.mean()
    gp = gradient_penalty(critic, real, fake, eps=eps, seed=seed)
    loss = wasserstein + cfg.gp_lambda * gp
    parts = {"wasserstein": wasserstein, "gp": gp}
    if cfg.aux_class_weight > 0 and real_aux is not None and real_labels is not None:
        aux = class_cross_entropy(real_aux, real_labels)
        loss = loss + cfg.aux_class_weight * aux
        parts["aux"] = aux
    return loss, parts


def freq_loss(real: torch.Tensor, fake: torch.Tensor, phi) -> torch.Tensor:
    """Mean absolute pixel deviation between the frequency images."""
    return (phi(real) - phi(fake)).abs().mean()


def generator_loss(
    generator,
    critic,
    z: torch.Tensor,
    labels: torch.Tensor,
    real: torch.Tensor,
    cfg: GanConfig,
    *,
    phi=None,
):
    """Returns (loss, parts, fake_batch)."""
    fake = generator(z, labels)
    fake_scores, fake_aux = critic(fake)
    adversarial = -fake_scores.mean()
    loss = adversarial
    parts = {"adversarial": adversarial}
    if cfg.freq_loss_weight > 0:
        if phi is None:
            raise ValueError("freq_loss_weight > 0 requires a phi transform")
        fl = freq_loss(real, fake, phi)
        loss = loss + cfg.freq_loss_weight * fl
        parts["freq"] = fl
    if cfg.aux_class_weight > 0 and fake_aux is not None:
        aux = class_cross_entropy(fake_aux, labels)
        loss = loss + cfg.aux_class_weight * aux
        parts["aux"] = aux
    return loss, parts, fake
