"""Generator and critic networks.

The full-size generator upsamples an 8x8x128 seed through five
transposed-conv/conv blocks (filter ladder 128/256 -> 256/128 -> 128/64 ->
64/32 -> 32/16) to a 256x256 tanh image; the critic mirrors it with five
stride-2 convolutions (16/32/64/128/256) into a 16384-wide flatten and a
scalar score.  Class conditioning multiplies the latent vector elementwise
with a learned label embedding.  Scaled variants for desk-size experiments
truncate both ladders from the shallow end, which keeps the critic's flatten
width at 16384 for every size.

All convolutions use 5x5 kernels.  The critic has no normalization layers:
its input gradients feed the gradient penalty.
"""

from __future__ import annotations

from collections import OrderedDict

import torch
from torch import nn

GEN_BLOCK_OUTS = [256, 128, 64, 32, 16]
GEN_BLOCK_INS = [128, 256, 128, 64, 32]
CRITIC_FILTERS = [16, 32, 64, 128, 256]
BASE_SIZE = 8
KERNEL = 5
BN_MOMENTUM = 0.2
LEAKY_SLOPE = 0.3


def _num_blocks(image_size: int) -> int:
    size = BASE_SIZE
    blocks = 0
    while size < image_size:
        size *= 2
        blocks += 1
    if size != image_size or not 1 <= blocks <= len(GEN_BLOCK_OUTS):
        raise ValueError(
            f"image_size must be {BASE_SIZE} * 2^k with 1 <= k <= {len(GEN_BLOCK_OUTS)}, "
            f"got {image_size}"
        )
    return blocks


class Generator(nn.Module):
    def __init__(self, image_size: int = 256, latent_dim: int = 100, num_classes: int = 3):
        super().__init__()
        blocks = _num_blocks(image_size)
        self.image_size = image_size
        self.latent_dim = latent_dim
        self.num_classes = num_classes
        self.start_channels = GEN_BLOCK_INS[-blocks]

        self.embedding = nn.Embedding(num_classes, latent_dim)
        self.fc = nn.Linear(latent_dim, BASE_SIZE * BASE_SIZE * self.start_channels)
        self.bn0 = nn.BatchNorm2d(self.start_channels, momentum=BN_MOMENTUM)

        stages = []
        channels = self.start_channels
        for out_channels in GEN_BLOCK_OUTS[-blocks:]:
            stages.append(
                nn.Sequential(
                    OrderedDict(
                        [
                            ("upconv", nn.ConvTranspose2d(channels, channels, KERNEL,
                                                          stride=2, padding=2,
                                                          output_padding=1)),
                            ("conv", nn.Conv2d(channels, out_channels, KERNEL, padding=2)),
                            ("relu", nn.ReLU()),
                            ("bn", nn.BatchNorm2d(out_channels, momentum=BN_MOMENTUM)),
                        ]
                    )
                )
            )
            channels = out_channels
        self.blocks = nn.Sequential(*stages)
        self.to_image = nn.Conv2d(channels, 1, KERNEL, padding=2)

    def condition(self, z: torch.Tensor, labels: torch.Tensor) -> torch.Tensor:
        """Elementwise product of the latent vector with the label embedding."""
        labels = labels.reshape(-1)
        if labels.shape[0] != z.shape[0]:
            raise ValueError("z and labels must agree on batch size")
        if labels.min() < 0 or labels.max() >= self.num_classes:
            raise ValueError(f"label ids must be in [0, {self.num_classes})")
        return z * self.embedding(labels)

    def forward(self, z: torch.Tensor, labels: torch.Tensor) -> torch.Tensor:
        h = self.condition(z, labels)
        h = self.fc(h)
        h = h.view(-1, self.start_channels, BASE_SIZE, BASE_SIZE)
        h = self.bn0(h)
        h = self.blocks(h)
        return torch.tanh(self.to_image(h))

    @torch.no_grad()
    def shape_trace(self, batch: int = 2) -> list[tuple[str, tuple]]:
        """(name, NHWC shape) per layer, for conformance assertions."""
        p = next(self.parameters())
        z = torch.zeros(batch, self.latent_dim, dtype=p.dtype, device=p.device)
        labels = torch.zeros(batch, 1, dtype=torch.long, device=p.device)
        trace: list[tuple[str, tuple]] = [("input", tuple(z.shape)),
                                          ("label", tuple(labels.shape))]
        emb = self.embedding(labels)
        trace.append(("embedding", tuple(emb.shape)))
        emb = emb.flatten(1)
        trace.append(("flatten", tuple(emb.shape)))
        h = z * emb
        trace.append(("multiply", tuple(h.shape)))
        h = self.fc(h)
        trace.append(("dense", tuple(h.shape)))
        h = h.view(-1, self.start_channels, BASE_SIZE, BASE_SIZE)
        trace.append(("reshape", _nhwc(h)))
        h = self.bn0(h)
        trace.append(("batchnorm", _nhwc(h)))
        for i, block in enumerate(self.blocks):
            for name, layer in block.named_children():
                h = layer(h)
                trace.append((f"block{i}.{name}", _nhwc(h)))
        h = self.to_image(h)
        trace.append(("conv_out", _nhwc(h)))
        h = torch.tanh(h)
        trace.append(("tanh", _nhwc(h)))
        return trace


class Critic(nn.Module):
    def __init__(self, image_size: int = 256, aux_classes: int | None = None):
        super().__init__()
        blocks = _num_blocks(image_size)
        self.image_size = image_size
        self.aux_classes = aux_classes

        layers = []
        channels = 1
        for filters in CRITIC_FILTERS[-blocks:]:
            layers.append(nn.Conv2d(channels, filters, KERNEL, stride=2, padding=2))
            layers.append(nn.LeakyReLU(LEAKY_SLOPE))
            channels = filters
        self.features = nn.Sequential(*layers)
        self.flat_dim = BASE_SIZE * BASE_SIZE * channels
        self.score = nn.Linear(self.flat_dim, 1)
        self.aux_head = None if aux_classes is None else nn.Linear(self.flat_dim, aux_classes)

    def forward(self, x: torch.Tensor):
        if x.ndim == 3:
            x = x.unsqueeze(1)
        if x.shape[1:] != (1, self.image_size, self.image_size):
            raise ValueError(
                f"critic expects (n, 1, {self.image_size}, {self.image_size}), "
                f"got {tuple(x.shape)}"
            )
        h = self.features(x).flatten(1)
        scores = self.score(h)
        aux = None if self.aux_head is None else self.aux_head(h)
        return scores, aux

    @torch.no_grad()
    def shape_trace(self, batch: int = 2) -> list[tuple[str, tuple]]:
        p = next(self.parameters())
        h = torch.zeros(batch, 1, self.image_size, self.image_size,
                        dtype=p.dtype, device=p.device)
        trace: list[tuple[str, tuple]] = [("input", _nhwc(h))]
        for i, layer in enumerate(self.features):
            h = layer(h)
            kind = "conv" if isinstance(layer, nn.Conv2d) else "leakyrelu"
            trace.append((f"{kind}{i // 2}", _nhwc(h)))
        h = h.flatten(1)
        trace.append(("flatten", tuple(h.shape)))
        h = self.score(h)
        trace.append(("dense", tuple(h.shape)))
        return trace


def _nhwc(t: torch.Tensor) -> tuple:
    n, c, h, w = t.shape
    return (n, h, w, c)
