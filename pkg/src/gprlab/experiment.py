"""Before/after-augmentation experiment harness.

For each scenario (time-only, frequency-only, combined) and each seed, a
classifier is trained twice on the same split: once on the real training
images, once on real plus GAN-generated images, and both are evaluated on
one fixed held-out test set.  Test items are hash-checked against every
training item; any overlap aborts the run.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field

import numpy as np
import torch

from .classify import ClassifierTrainConfig, train_classifier
from .errors import LeakageError
from .freq import SpectrogramConfig, frequency_bscan
from .metrics import ClassificationReport, confusion_matrix, report
from .bscan import CLASS_NAMES

SCENARIOS = ("time", "frequency", "combined")
CHART_METRICS = ("accuracy", "precision", "recall", "f1")


@dataclass
class ExperimentPlan:
    train_images: np.ndarray
    train_labels: np.ndarray
    test_images: np.ndarray
    test_labels: np.ndarray
    scenarios: tuple[str, ...] = SCENARIOS
    augment_images: np.ndarray | None = None
    augment_labels: np.ndarray | None = None
    gan_checkpoint: object = None
    samples_per_class: int = 0
    augment_seed: int = 0
    seeds: tuple[int, ...] = (0,)
    classifier: ClassifierTrainConfig = field(default_factory=ClassifierTrainConfig)
    val_fraction: float = 0.2
    spectrogram: SpectrogramConfig = field(default_factory=SpectrogramConfig)

    def __post_init__(self):
        self.train_images = np.asarray(self.train_images, dtype=np.float32)
        self.train_labels = np.asarray(self.train_labels, dtype=np.int64)
        self.test_images = np.asarray(self.test_images, dtype=np.float32)
        self.test_labels = np.asarray(self.test_labels, dtype=np.int64)
        for name in self.scenarios:
            if name not in SCENARIOS:
                raise ValueError(f"unknown scenario {name!r}")
        if len(self.seeds) == 0:
            raise ValueError("need at least one seed")
        if not 0 < self.val_fraction < 1:
            raise ValueError("val_fraction must be in (0, 1)")


@dataclass
class SeedResult:
    seed: int
    before: ClassificationReport
    after: ClassificationReport


@dataclass
class ExperimentResult:
    scenario_results: dict[str, list[SeedResult]]

    def median_macro_f1(self, scenario: str, which: str) -> float:
        values = [getattr(r, which).macro_f1 for r in self.scenario_results[scenario]]
        return float(np.median(values))

    def improvement_rows(self) -> list[dict]:
        """One row per (scenario, class, metric): seed-median before/after."""
        rows = []
        for scenario, results in self.scenario_results.items():
            for cls in CLASS_NAMES:
                for metric in CHART_METRICS:
                    before = float(
                        np.median([getattr(r.before.per_class[cls], metric) for r in results])
                    )
                    after = float(
                        np.median([getattr(r.after.per_class[cls], metric) for r in results])
                    )
                    rows.append(
                        {
                            "scenario": scenario,
                            "class": cls,
                            "metric": metric,
                            "before": before,
                            "after": after,
                            "delta": after - before,
                        }
                    )
        return rows

    def to_chart_csv(self, path) -> None:
        rows = self.improvement_rows()
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(
                fh, fieldnames=("scenario", "class", "metric", "before", "after", "delta")
            )
            writer.writeheader()
            writer.writerows(rows)

    def to_json(self) -> str:
        doc = {}
        for scenario, results in self.scenario_results.items():
            doc[scenario] = [
                {
                    "seed": r.seed,
                    "before": json.loads(r.before.to_json()),
                    "after": json.loads(r.after.to_json()),
                }
                for r in results
            ]
        return json.dumps(doc, indent=2)

    def to_text(self) -> str:
        blocks = []
        for scenario, results in self.scenario_results.items():
            blocks.append(f"== {scenario} ==")
            blocks.append("Before Augmentation")
            blocks.append(results[0].before.to_text())
            blocks.append("After Augmentation")
            blocks.append(results[0].after.to_text())
        return "\n".join(blocks)


def _hash_images(images: np.ndarray) -> set[str]:
    return {hashlib.sha256(np.ascontiguousarray(img).tobytes()).hexdigest() for img in images}


def _freq_stack(images: np.ndarray, cfg: SpectrogramConfig) -> np.ndarray:
    size = images.shape[-1]
    return np.stack([frequency_bscan(img, cfg, out_size=size).pixels for img in images])


def _resolve_augmentation(plan: ExperimentPlan):
    if plan.augment_images is not None:
        return (
            np.asarray(plan.augment_images, dtype=np.float32),
            np.asarray(plan.augment_labels, dtype=np.int64),
        )
    if plan.gan_checkpoint is not None and plan.samples_per_class > 0:
        from .gan.train import sample_conditional

        labels = np.repeat(np.arange(len(CLASS_NAMES)), plan.samples_per_class)
        images = sample_conditional(plan.gan_checkpoint, labels, seed=plan.augment_seed)
        return images.astype(np.float32), labels
    return None, None


def _predict(model, inputs) -> np.ndarray:
    with torch.no_grad():
        out = model(*[torch.as_tensor(x) for x in inputs])
    probs = out[0] if isinstance(out, tuple) else out
    return probs.argmax(dim=1).numpy()


def run_augmentation_experiment(plan: ExperimentPlan) -> ExperimentResult:
    aug_images, aug_labels = _resolve_augmentation(plan)

    train_hashes = _hash_images(plan.train_images)
    if aug_images is not None:
        train_hashes |= _hash_images(aug_images)
    overlap = train_hashes & _hash_images(plan.test_images)
    if overlap:
        raise LeakageError(f"{len(overlap)} test sample(s) also appear in training data")

    need_freq = any(s in ("frequency", "combined") for s in plan.scenarios)
    freq = {}
    if need_freq:
        freq["train"] = _freq_stack(plan.train_images, plan.spectrogram)
        freq["test"] = _freq_stack(plan.test_images, plan.spectrogram)
        if aug_images is not None:
            freq["aug"] = _freq_stack(aug_images, plan.spectrogram)

    def select(scenario, time_arr, freq_arr):
        if scenario == "time":
            return [time_arr]
        if scenario == "frequency":
            return [freq_arr]
        return [time_arr, freq_arr]

    results: dict[str, list[SeedResult]] = {s: [] for s in plan.scenarios}
    n_train = plan.train_images.shape[0]
    for seed in plan.seeds:
        split_rng = np.random.default_rng(seed)
        order = split_rng.permutation(n_train)
        n_val = max(1, int(round(plan.val_fraction * n_train)))
        val_idx, fit_idx = order[:n_val], order[n_val:]

        for scenario in plan.scenarios:
            combined = scenario == "combined"
            cfg = ClassifierTrainConfig(
                learning_rate=plan.classifier.learning_rate,
                batch_size=plan.classifier.batch_size,
                epochs=plan.classifier.epochs,
                aux_branch_weight=plan.classifier.aux_branch_weight if combined else 0.0,
                seed=seed,
            )

            time_fit = plan.train_images[fit_idx]
            freq_fit = freq["train"][fit_idx] if need_freq else None
            y_fit = plan.train_labels[fit_idx]
            val_inputs = select(
                scenario,
                plan.train_images[val_idx],
                freq["train"][val_idx] if need_freq else None,
            )
            test_inputs = select(scenario, plan.test_images, freq.get("test"))

            def run(time_arr, freq_arr, y):
                train_set = (*select(scenario, time_arr, freq_arr), y)
                val_set = (*val_inputs, plan.train_labels[val_idx])
                trained = train_classifier(train_set, val_set, cfg, combined=combined)
                preds = _predict(trained.model, test_inputs)
                return report(confusion_matrix(preds, plan.test_labels))

            before = run(time_fit, freq_fit, y_fit)
            if aug_images is None:
                after = run(time_fit, freq_fit, y_fit)
            else:
                after = run(
                    np.concatenate([time_fit, aug_images]),
                    np.concatenate([freq_fit, freq["aug"]]) if need_freq else None,
                    np.concatenate([y_fit, aug_labels]),
                )
            results[scenario].append(SeedResult(seed=seed, before=before, after=after))

    return ExperimentResult(scenario_results=results)
