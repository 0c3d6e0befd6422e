"""Real-time buried-object classifiers.

The single-input model is deliberately tiny: two 1x1 stride-2 convolutions
(2 then 4 filters) with leaky rectifiers, flattened into a 3-way softmax
head.  The combined model runs one such trunk on the time image and one on
the frequency image, merges them with an elementwise product, and puts the
same head on top; optional per-branch heads add separate cross-entropy
terms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import torch
from torch import nn

from .bscan import CLASS_NAMES

NUM_CLASSES = len(CLASS_NAMES)
LEAKY_SLOPE = 0.3
LOG_CLAMP = 1e-12


def cross_entropy(pred, true_onehot) -> float:
    """Categorical cross entropy, probabilities clamped at 1e-12 before log."""
    pred_t = torch.as_tensor(pred, dtype=torch.float64)
    true_t = torch.as_tensor(true_onehot, dtype=torch.float64)
    if pred_t.shape != true_t.shape:
        raise ValueError(f"shape mismatch {tuple(pred_t.shape)} vs {tuple(true_t.shape)}")
    loss = -(true_t * torch.log(pred_t.clamp_min(LOG_CLAMP))).sum(dim=1).mean()
    return float(loss)


def _cross_entropy_probs(probs: torch.Tensor, labels: torch.Tensor) -> torch.Tensor:
    picked = probs.gather(1, labels.view(-1, 1)).clamp_min(LOG_CLAMP)
    return -torch.log(picked).mean()


class ClassifierTrunk(nn.Module):
    """Conv(2, 1x1, s2) -> LeakyReLU -> Conv(4, 1x1, s2) -> LeakyReLU."""

    def __init__(self, input_size: int = 256):
        super().__init__()
        if input_size % 4:
            raise ValueError("input_size must be divisible by 4")
        self.input_size = input_size
        self.conv1 = nn.Conv2d(1, 2, kernel_size=1, stride=2)
        self.conv2 = nn.Conv2d(2, 4, kernel_size=1, stride=2)
        self.act = nn.LeakyReLU(LEAKY_SLOPE)
        self.out_size = input_size // 4
        self.flat_dim = self.out_size * self.out_size * 4

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if x.ndim == 3:
            x = x.unsqueeze(1)
        if x.shape[1:] != (1, self.input_size, self.input_size):
            raise ValueError(
                f"expected (n, 1, {self.input_size}, {self.input_size}), got {tuple(x.shape)}"
            )
        return self.act(self.conv2(self.act(self.conv1(x))))


class SingleClassifier(nn.Module):
    def __init__(self, input_size: int = 256):
        super().__init__()
        self.trunk = ClassifierTrunk(input_size)
        self.head = nn.Linear(self.trunk.flat_dim, NUM_CLASSES)

    def logits(self, x: torch.Tensor) -> torch.Tensor:
        return self.head(self.trunk(x).flatten(1))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return torch.softmax(self.logits(x), dim=1)

    def shape_trace(self, batch: int = 2) -> list[tuple[str, tuple]]:
        with torch.no_grad():
            x = torch.zeros(batch, 1, self.trunk.input_size, self.trunk.input_size)
            trace = [("input", _nhwc(x))]
            h = self.trunk.conv1(x)
            trace.append(("conv1", _nhwc(h)))
            h = self.trunk.act(h)
            trace.append(("leakyrelu1", _nhwc(h)))
            h = self.trunk.conv2(h)
            trace.append(("conv2", _nhwc(h)))
            h = self.trunk.act(h)
            trace.append(("leakyrelu2", _nhwc(h)))
            h = h.flatten(1)
            trace.append(("flatten", tuple(h.shape)))
            h = self.head(h)
            trace.append(("dense", tuple(h.shape)))
        return trace


class CombinedClassifier(nn.Module):
    """Time and frequency trunks merged with an elementwise product."""

    def __init__(self, input_size: int = 256, aux_branch_weight: float = 0.0):
        super().__init__()
        self.trunk_time = ClassifierTrunk(input_size)
        self.trunk_freq = ClassifierTrunk(input_size)
        self.head = nn.Linear(self.trunk_time.flat_dim, NUM_CLASSES)
        self.aux_branch_weight = aux_branch_weight
        self.aux_time = None
        self.aux_freq = None
        if aux_branch_weight > 0:
            self.aux_time = nn.Linear(self.trunk_time.flat_dim, NUM_CLASSES)
            self.aux_freq = nn.Linear(self.trunk_freq.flat_dim, NUM_CLASSES)

    def merge(self, feat_time: torch.Tensor, feat_freq: torch.Tensor) -> torch.Tensor:
        if feat_time.shape != feat_freq.shape:
            raise ValueError("branch feature shapes must agree before the product")
        return self.head((feat_time * feat_freq).flatten(1))

    def logits(self, x_time: torch.Tensor, x_freq: torch.Tensor) -> torch.Tensor:
        return self.merge(self.trunk_time(x_time), self.trunk_freq(x_freq))

    def forward(self, x_time: torch.Tensor, x_freq: torch.Tensor):
        ft = self.trunk_time(x_time)
        ff = self.trunk_freq(x_freq)
        probs = torch.softmax(self.merge(ft, ff), dim=1)
        if self.aux_time is None:
            return probs
        aux_t = torch.softmax(self.aux_time(ft.flatten(1)), dim=1)
        aux_f = torch.softmax(self.aux_freq(ff.flatten(1)), dim=1)
        return probs, aux_t, aux_f

    def shape_trace(self, batch: int = 2) -> list[tuple[str, tuple]]:
        with torch.no_grad():
            size = self.trunk_time.input_size
            x = torch.zeros(batch, 1, size, size)
            trace = [("input_time", _nhwc(x)), ("input_freq", _nhwc(x))]
            ft = self.trunk_time(x)
            trace.append(("trunk_time", _nhwc(ft)))
            ff = self.trunk_freq(x)
            trace.append(("trunk_freq", _nhwc(ff)))
            m = ft * ff
            trace.append(("multiply", _nhwc(m)))
            m = m.flatten(1)
            trace.append(("flatten", tuple(m.shape)))
            out = self.head(m)
            trace.append(("dense", tuple(out.shape)))
        return trace


def _nhwc(t: torch.Tensor) -> tuple:
    n, c, h, w = t.shape
    return (n, h, w, c)


def classify_single(x, model: SingleClassifier) -> np.ndarray:
    """Class probabilities, one simplex row per sample."""
    with torch.no_grad():
        probs = model(torch.as_tensor(np.asarray(x, dtype=np.float32)))
    return probs.numpy()


def classify_combined(x_time, x_freq, model: CombinedClassifier) -> np.ndarray:
    with torch.no_grad():
        out = model(
            torch.as_tensor(np.asarray(x_time, dtype=np.float32)),
            torch.as_tensor(np.asarray(x_freq, dtype=np.float32)),
        )
    probs = out[0] if isinstance(out, tuple) else out
    return probs.numpy()


@dataclass
class ClassifierTrainConfig:
    learning_rate: float = 1e-3
    batch_size: int = 32
    epochs: int = 30
    aux_branch_weight: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0 or self.batch_size <= 0 or self.epochs <= 0:
            raise ValueError("learning_rate, batch_size and epochs must be positive")
        if self.aux_branch_weight < 0:
            raise ValueError("aux_branch_weight must be non-negative")


@dataclass
class TrainResult:
    model: nn.Module
    log: list[dict] = field(default_factory=list)
    best_val_accuracy: float = 0.0


def _stack(images) -> torch.Tensor:
    return torch.as_tensor(np.asarray(images, dtype=np.float32))


def train_classifier(
    train_set,
    val_set,
    cfg: ClassifierTrainConfig,
    *,
    combined: bool = False,
) -> TrainResult:
    """Minimize cross entropy with Adam; keep the best-validation weights.

    ``train_set``/``val_set`` are ``(images, labels)`` for the single model
    or ``(time_images, freq_images, labels)`` for the combined one.
    Deterministic under a fixed seed.
    """
    torch.manual_seed(cfg.seed)
    rng = np.random.default_rng(cfg.seed)

    labels = np.asarray(train_set[-1], dtype=np.int64)
    if labels.size == 0:
        raise ValueError("training split is empty")
    if labels.min() < 0 or labels.max() >= NUM_CLASSES:
        raise ValueError(f"label ids must be in [0, {NUM_CLASSES})")
    inputs = [_stack(arr) for arr in train_set[:-1]]
    size = inputs[0].shape[-1]

    val_labels = np.asarray(val_set[-1], dtype=np.int64)
    if val_labels.size == 0:
        raise ValueError("validation split is empty")
    val_inputs = [_stack(arr) for arr in val_set[:-1]]

    if combined:
        model = CombinedClassifier(size, aux_branch_weight=cfg.aux_branch_weight)
    else:
        model = SingleClassifier(size)
    opt = torch.optim.Adam(model.parameters(), lr=cfg.learning_rate)

    y = torch.from_numpy(labels)
    y_val = torch.from_numpy(val_labels)
    n = labels.size
    best_state = {k: v.detach().clone() for k, v in model.state_dict().items()}
    best_acc = -1.0
    log = []

    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        for lo in range(0, n, cfg.batch_size):
            idx = order[lo : lo + cfg.batch_size]
            batch_in = [t[idx] for t in inputs]
            batch_y = y[idx]
            out = model(*batch_in)
            if isinstance(out, tuple):
                probs, aux_t, aux_f = out
                loss = _cross_entropy_probs(probs, batch_y) + cfg.aux_branch_weight * (
                    _cross_entropy_probs(aux_t, batch_y)
                    + _cross_entropy_probs(aux_f, batch_y)
                )
            else:
                loss = _cross_entropy_probs(out, batch_y)
            opt.zero_grad()
            loss.backward()
            opt.step()
            epoch_loss += float(loss) * len(idx)

        with torch.no_grad():
            out = model(*val_inputs)
            probs = out[0] if isinstance(out, tuple) else out
            acc = float((probs.argmax(dim=1) == y_val).float().mean())
        log.append({"epoch": epoch, "train_loss": epoch_loss / n, "val_accuracy": acc})
        if acc > best_acc:
            best_acc = acc
            best_state = {k: v.detach().clone() for k, v in model.state_dict().items()}

    model.load_state_dict(best_state)
    model.eval()
    return TrainResult(model=model, log=log, best_val_accuracy=best_acc)


def save_classifier(model: nn.Module, dir_path) -> None:
    """Same container as GAN checkpoints: model.json plus raw tensor blobs."""
    import json
    from pathlib import Path

    from .tensorio import dump_tensors

    dir_path = Path(dir_path)
    dir_path.mkdir(parents=True, exist_ok=True)
    if isinstance(model, CombinedClassifier):
        meta = {
            "kind": "combined",
            "input_size": model.trunk_time.input_size,
            "aux_branch_weight": model.aux_branch_weight,
        }
    else:
        meta = {"kind": "single", "input_size": model.trunk.input_size}
    index = dump_tensors(dict(model.state_dict()), dir_path, "classifier")
    doc = {"format_version": 1, "model": meta, "tensors": index}
    (dir_path / "model.json").write_text(json.dumps(doc, indent=2), encoding="utf-8")


def load_classifier(dir_path) -> nn.Module:
    import json
    from pathlib import Path

    from .errors import MissingSampleError, UnknownVersionError
    from .tensorio import load_tensors

    dir_path = Path(dir_path)
    path = dir_path / "model.json"
    if not path.exists():
        raise MissingSampleError(f"no model.json in {dir_path}")
    doc = json.loads(path.read_text(encoding="utf-8"))
    if doc.get("format_version") != 1:
        raise UnknownVersionError(f"unsupported classifier version {doc.get('format_version')}")
    meta = doc["model"]
    if meta["kind"] == "combined":
        model = CombinedClassifier(meta["input_size"],
                                   aux_branch_weight=meta.get("aux_branch_weight", 0.0))
    else:
        model = SingleClassifier(meta["input_size"])
    model.load_state_dict(load_tensors(doc["tensors"], dir_path)["classifier"])
    model.eval()
    return model
