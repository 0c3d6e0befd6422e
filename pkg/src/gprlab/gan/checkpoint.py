"""Checkpoint container: directory of raw float blobs plus ``model.json``.

One little-endian binary file per tensor (float32 for parameters and float
buffers, int64 for counters), names derived from the state-dict keys and
stable across versions.  Loading rebuilds the exact forward pass at equal
precision.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import torch

from ..errors import MissingSampleError, UnknownVersionError
from ..tensorio import dump_tensors, load_tensors
from .config import GanConfig
from .models import Critic, Generator

MODEL_JSON = "model.json"
CHECKPOINT_VERSION = 1


@dataclass
class GanCheckpoint:
    config: GanConfig
    generator_state: dict
    critic_state: dict
    optimizer_state: dict = field(default_factory=dict)
    step: int = 0


def build_models(cfg: GanConfig) -> tuple[Generator, Critic]:
    gen = Generator(cfg.image_size, cfg.latent_dim, cfg.num_classes)
    aux = cfg.num_classes if cfg.aux_class_weight > 0 else None
    critic = Critic(cfg.image_size, aux_classes=aux)
    return gen, critic


def from_models(cfg, gen, critic, g_opt=None, c_opt=None, step=0) -> GanCheckpoint:
    def clone(state):
        return {k: v.detach().clone() for k, v in state.items()}

    opt_state = {}
    if g_opt is not None:
        opt_state["generator"] = _optimizer_tensors(gen, g_opt)
    if c_opt is not None:
        opt_state["critic"] = _optimizer_tensors(critic, c_opt)
    return GanCheckpoint(
        config=cfg,
        generator_state=clone(gen.state_dict()),
        critic_state=clone(critic.state_dict()),
        optimizer_state=opt_state,
        step=step,
    )


def restore_models(ckpt: GanCheckpoint) -> tuple[Generator, Critic]:
    gen, critic = build_models(ckpt.config)
    gen.load_state_dict(ckpt.generator_state)
    critic.load_state_dict(ckpt.critic_state)
    return gen, critic


def make_optimizers(cfg: GanConfig, gen, critic):
    betas = (cfg.adam_beta1, cfg.adam_beta2)
    g_opt = torch.optim.Adam(gen.parameters(), lr=cfg.learning_rate, betas=betas)
    c_opt = torch.optim.Adam(critic.parameters(), lr=cfg.learning_rate, betas=betas)
    return g_opt, c_opt


def restore_optimizers(ckpt: GanCheckpoint, gen, critic):
    g_opt, c_opt = make_optimizers(ckpt.config, gen, critic)
    if "generator" in ckpt.optimizer_state:
        _load_optimizer_tensors(gen, g_opt, ckpt.optimizer_state["generator"])
    if "critic" in ckpt.optimizer_state:
        _load_optimizer_tensors(critic, c_opt, ckpt.optimizer_state["critic"])
    return g_opt, c_opt


def _optimizer_tensors(model, opt) -> dict:
    """Adam state keyed by parameter name instead of positional index."""
    names = [n for n, _ in model.named_parameters()]
    out = {}
    sd = opt.state_dict()
    for idx, state in sd["state"].items():
        for field_name, value in state.items():
            key = f"{names[idx]}.{field_name}"
            out[key] = value.detach().clone() if torch.is_tensor(value) else torch.tensor(value)
    return out


def _load_optimizer_tensors(model, opt, tensors: dict):
    names = [n for n, _ in model.named_parameters()]
    sd = opt.state_dict()
    state = {}
    for idx, name in enumerate(names):
        entry = {}
        for field_name in ("step", "exp_avg", "exp_avg_sq"):
            key = f"{name}.{field_name}"
            if key in tensors:
                entry[field_name] = tensors[key].clone()
        if entry:
            state[idx] = entry
    sd["state"] = state
    opt.load_state_dict(sd)


def save_checkpoint(ckpt: GanCheckpoint, dir_path) -> None:
    dir_path = Path(dir_path)
    dir_path.mkdir(parents=True, exist_ok=True)
    index = dump_tensors(ckpt.generator_state, dir_path, "generator")
    index += dump_tensors(ckpt.critic_state, dir_path, "critic")
    for side, tensors in ckpt.optimizer_state.items():
        index += dump_tensors(tensors, dir_path, f"opt_{side}")

    doc = {
        "format_version": CHECKPOINT_VERSION,
        "config": ckpt.config.as_dict(),
        "config_hash": ckpt.config.hash(),
        "step": ckpt.step,
        "tensors": index,
    }
    (dir_path / MODEL_JSON).write_text(json.dumps(doc, indent=2), encoding="utf-8")


def load_checkpoint(dir_path) -> GanCheckpoint:
    dir_path = Path(dir_path)
    path = dir_path / MODEL_JSON
    if not path.exists():
        raise MissingSampleError(f"no {MODEL_JSON} in {dir_path}")
    doc = json.loads(path.read_text(encoding="utf-8"))
    if doc.get("format_version") != CHECKPOINT_VERSION:
        raise UnknownVersionError(f"unsupported checkpoint version {doc.get('format_version')}")

    cfg = GanConfig(**doc["config"])
    groups = load_tensors(doc["tensors"], dir_path)
    opt_state = {
        side.removeprefix("opt_"): tensors
        for side, tensors in groups.items()
        if side.startswith("opt_")
    }
    return GanCheckpoint(
        config=cfg,
        generator_state=groups["generator"],
        critic_state=groups["critic"],
        optimizer_state=opt_state,
        step=int(doc["step"]),
    )
