"""Confusion-matrix metrics and per-class classification reports."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .bscan import CLASS_NAMES, ClassLabel
from .errors import ShapeMismatchError

NUM_CLASSES = len(CLASS_NAMES)


@dataclass
class ConfusionMatrix:
    """3x3 count matrix, rows indexed by true class, columns by predicted."""

    counts: np.ndarray

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts.shape != (NUM_CLASSES, NUM_CLASSES):
            raise ShapeMismatchError(f"expected {NUM_CLASSES}x{NUM_CLASSES} counts")
        if np.any(self.counts < 0):
            raise ValueError("counts must be non-negative")

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def _as_id(label) -> int:
    if isinstance(label, ClassLabel):
        return label.id
    lid = int(label)
    if not 0 <= lid < NUM_CLASSES:
        raise ValueError(f"invalid class id {lid}")
    return lid


def confusion_matrix(preds, truths) -> ConfusionMatrix:
    preds = list(preds)
    truths = list(truths)
    if len(preds) != len(truths):
        raise ShapeMismatchError(f"{len(preds)} predictions vs {len(truths)} truths")
    counts = np.zeros((NUM_CLASSES, NUM_CLASSES), dtype=np.int64)
    for p, t in zip(preds, truths):
        counts[_as_id(t), _as_id(p)] += 1
    return ConfusionMatrix(counts)


def f1_score(precision: float, recall: float) -> float:
    """Harmonic mean of precision and recall; 0 when both vanish."""
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


@dataclass
class ClassMetrics:
    accuracy: float
    precision: float
    recall: float
    f1: float
    support: int
    degenerate: bool = False

    def as_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "support": self.support,
            "degenerate": self.degenerate,
        }


@dataclass
class ClassificationReport:
    """Per-class one-vs-rest metrics plus an aggregate 'All' row.

    The aggregate precision/recall/f1 are macro averages; aggregate accuracy
    is the micro accuracy trace(cm)/N.
    """

    per_class: dict[str, ClassMetrics]
    overall: ClassMetrics
    class_order: tuple[str, ...] = field(default=CLASS_NAMES)

    @property
    def macro_f1(self) -> float:
        return self.overall.f1

    def to_json(self) -> str:
        doc = {name: m.as_dict() for name, m in self.per_class.items()}
        doc["All"] = self.overall.as_dict()
        return json.dumps(doc, indent=2)

    def to_text(self) -> str:
        header = f"{'Class':<10}{'Accuracy':>10}{'Precision':>11}{'Recall':>8}{'F1':>6}{'N':>5}"
        lines = [header]
        for name in self.class_order:
            m = self.per_class[name]
            lines.append(
                f"{name.capitalize():<10}{m.accuracy:>10.2f}{m.precision:>11.2f}"
                f"{m.recall:>8.2f}{m.f1:>6.2f}{m.support:>5d}"
            )
        o = self.overall
        lines.append(
            f"{'All':<10}{o.accuracy:>10.2f}{o.precision:>11.2f}"
            f"{o.recall:>8.2f}{o.f1:>6.2f}{o.support:>5d}"
        )
        return "\n".join(lines)


def _safe_div(num: float, den: float) -> tuple[float, bool]:
    if den == 0:
        return 0.0, True
    return num / den, False


def report(cm: ConfusionMatrix) -> ClassificationReport:
    counts = cm.counts
    total = cm.total
    if total == 0:
        raise ValueError("cannot build a report from an empty confusion matrix")

    per_class: dict[str, ClassMetrics] = {}
    for c, name in enumerate(CLASS_NAMES):
        tp = int(counts[c, c])
        fp = int(counts[:, c].sum() - tp)
        fn = int(counts[c, :].sum() - tp)
        tn = total - tp - fp - fn
        precision, d1 = _safe_div(tp, tp + fp)
        recall, d2 = _safe_div(tp, tp + fn)
        accuracy = (tp + tn) / total
        per_class[name] = ClassMetrics(
            accuracy=accuracy,
            precision=precision,
            recall=recall,
            f1=f1_score(precision, recall),
            support=tp + fn,
            degenerate=d1 or d2,
        )

    members = list(per_class.values())
    overall = ClassMetrics(
        accuracy=float(np.trace(counts)) / total,
        precision=float(np.mean([m.precision for m in members])),
        recall=float(np.mean([m.recall for m in members])),
        f1=float(np.mean([m.f1 for m in members])),
        support=total,
        degenerate=any(m.degenerate for m in members),
    )
    return ClassificationReport(per_class=per_class, overall=overall)
