"""Command-line pipeline: simulate -> transform -> train-gan -> sample ->
train-clf / predict -> evaluate -> report.

Every command reads one declarative config (plus ``GPRLAB_*`` env
overrides), writes its artifacts under a single output directory, and drops
a ``run_manifest.json`` recording the config hash.  Re-running against an
existing output is a no-op when the hash matches and an error when it does
not, unless ``--force``.

Exit codes: 0 success, 2 config error, 3 numerical abort, 4 leakage abort.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from .bscan import CLASS_NAMES, ClassLabel
from .classify import load_classifier, save_classifier, train_classifier
from .config import RunConfig, RunManifest, read_manifest
from .dataset import load_dataset, save_dataset
from .errors import ConfigError, GprLabError, LeakageError, NumericalAbortError
from .experiment import ExperimentPlan, run_augmentation_experiment
from .freq import frequency_bscan
from .preprocess import preprocess_bscan
from .resize import downsample_stack, resize_to_canvas

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_LEAKAGE = 4


def _apply_threads(config: RunConfig):
    if config.threads is not None:
        import torch

        torch.set_num_threads(config.threads)


def _prepare_out(out_dir: Path, command: str, config: RunConfig, force: bool):
    """Idempotency gate; returns a manifest to fill, or None if up to date."""
    existing = read_manifest(out_dir)
    if existing is not None and not force:
        if existing.get("command") == command and existing.get("config_hash") == config.hash():
            print(f"{out_dir}: up to date (config {config.hash()})")
            return None
        raise ConfigError(
            f"{out_dir} holds artifacts for config {existing.get('config_hash')}, "
            f"current config is {config.hash()}; pass --force to overwrite"
        )
    out_dir.mkdir(parents=True, exist_ok=True)
    return RunManifest.start(command, config)


def _load_stack(dir_path, require_labels: bool):
    items, manifest = load_dataset(dir_path)
    images, labels = [], []
    for image, label in items:
        pixels = image.pixels if hasattr(image, "pixels") else image
        images.append(np.asarray(pixels, dtype=np.float32))
        labels.append(None if label is None else label.id)
    if not images:
        return np.zeros((0, 0, 0), dtype=np.float32), np.zeros(0, dtype=np.int64)
    shapes = {img.shape for img in images}
    if len(shapes) != 1:
        raise ConfigError(f"{dir_path}: mixed sample shapes {sorted(shapes)}")
    if require_labels and any(l is None for l in labels):
        raise ConfigError(f"{dir_path}: dataset must be fully labeled")
    stack = np.stack(images)
    label_arr = np.array([-1 if l is None else l for l in labels], dtype=np.int64)
    return stack, label_arr


def _simulate_one(args):
    scene, engine, include_direct, pre = args
    if engine == "fdtd":
        from .sim.fdtd import fdtd_bscan

        bscan, label = fdtd_bscan(scene)
    else:
        from .sim.analytic import analytic_bscan

        bscan, label = analytic_bscan(scene, include_direct_wave=include_direct)
    bscan = preprocess_bscan(bscan, **pre)
    image = resize_to_canvas(bscan)
    return image, label, scene.seed


def cmd_simulate(args, config: RunConfig) -> int:
    out = Path(args.out)
    manifest = _prepare_out(out, "simulate", config, args.force)
    if manifest is None:
        return EXIT_OK

    sim = config.doc["simulate"]
    count = args.count if args.count is not None else sim["count"]
    engine = args.engine or sim["engine"]
    emit = args.emit_gprmax or sim["emit_gprmax"]

    from .sim.scene import sample_scenes

    scenes = sample_scenes(config.randomization(), count, config.seed)
    jobs = [(scene, engine, sim["include_direct_wave"], sim["preprocess"])
            for scene in scenes]
    if sim["workers"] > 1 and len(jobs) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=sim["workers"]) as pool:
            results = list(pool.map(_simulate_one, jobs))
    else:
        results = [_simulate_one(job) for job in jobs]

    save_dataset(results, out)
    manifest.artifacts["dataset"] = str(out)
    if emit:
        from .sim.gprmax_io import emit_gprmax_config

        gdir = out / "gprmax"
        gdir.mkdir(exist_ok=True)
        for i, scene in enumerate(scenes):
            (gdir / f"scene_{i:05d}.in").write_text(emit_gprmax_config(scene),
                                                    encoding="utf-8")
        manifest.artifacts["gprmax_configs"] = str(gdir)
    manifest.seeds["scenes"] = [scene.seed for scene in scenes]
    manifest.finish(out)
    print(f"wrote {count} samples ({engine}) to {out}")
    return EXIT_OK


def cmd_transform(args, config: RunConfig) -> int:
    out = Path(args.out)
    manifest = _prepare_out(out, "transform", config, args.force)
    if manifest is None:
        return EXIT_OK
    items, _ = load_dataset(args.dataset)
    transformed = []
    for image, label in items:
        pixels = image.pixels if hasattr(image, "pixels") else image
        size = pixels.shape[0]
        fb = frequency_bscan(np.asarray(pixels), out_size=size)
        transformed.append((fb.pixels, label))
    save_dataset(transformed, out, domain_tag="frequency")
    manifest.artifacts["dataset"] = str(out)
    manifest.finish(out)
    print(f"wrote {len(transformed)} frequency images to {out}")
    return EXIT_OK


def cmd_train_gan(args, config: RunConfig) -> int:
    out = Path(args.out)
    manifest = _prepare_out(out, "train-gan", config, args.force)
    if manifest is None:
        return EXIT_OK
    _apply_threads(config)

    from .gan.checkpoint import load_checkpoint, save_checkpoint
    from .gan.train import train_wgan_gp

    images, labels = _load_stack(args.dataset, require_labels=True)
    cfg = config.gan_config()
    images = downsample_stack(images, cfg.image_size)
    resume = load_checkpoint(args.resume) if args.resume else None

    try:
        ckpt, log = train_wgan_gp(images, labels, cfg, resume=resume)
    except NumericalAbortError as exc:
        if exc.checkpoint is not None:
            abort_dir = out / "abort_checkpoint"
            save_checkpoint(exc.checkpoint, abort_dir)
            print(f"numerical abort: {exc}; last good checkpoint at {abort_dir}",
                  file=sys.stderr)
        raise

    ckpt_dir = out / "checkpoint"
    save_checkpoint(ckpt, ckpt_dir)
    log.to_csv(out / "training_log.csv")
    manifest.artifacts["checkpoint"] = str(ckpt_dir)
    manifest.artifacts["training_log"] = str(out / "training_log.csv")
    manifest.seeds["gan"] = cfg.seed
    manifest.finish(out)
    print(f"checkpoint at step {ckpt.step} -> {ckpt_dir}")
    return EXIT_OK


def cmd_sample(args, config: RunConfig) -> int:
    out = Path(args.out)
    manifest = _prepare_out(out, "sample", config, args.force)
    if manifest is None:
        return EXIT_OK
    _apply_threads(config)

    from .gan.checkpoint import load_checkpoint
    from .gan.train import sample_conditional

    ckpt = load_checkpoint(args.checkpoint)
    seed = args.seed if args.seed is not None else config.seed
    labels = np.repeat(np.arange(len(CLASS_NAMES)), args.per_class)
    images = sample_conditional(ckpt, labels, seed=seed)
    save_dataset(
        [(img, int(lab)) for img, lab in zip(images, labels)],
        out,
        domain_tag="time",
    )
    manifest.artifacts["dataset"] = str(out)
    manifest.seeds["sample"] = seed
    manifest.finish(out)
    print(f"wrote {len(labels)} generated samples to {out}")
    return EXIT_OK


def _freq_images(stack: np.ndarray) -> np.ndarray:
    size = stack.shape[-1]
    return np.stack([frequency_bscan(img, out_size=size).pixels for img in stack])


def cmd_train_clf(args, config: RunConfig) -> int:
    out = Path(args.out)
    manifest = _prepare_out(out, "train-clf", config, args.force)
    if manifest is None:
        return EXIT_OK
    _apply_threads(config)

    images, labels = _load_stack(args.dataset, require_labels=True)
    scenario = args.scenario
    exp = config.doc["experiment"]
    rng = np.random.default_rng(config.seed)
    order = rng.permutation(len(images))
    n_val = max(1, int(round(exp["val_fraction"] * len(images))))
    val_idx, fit_idx = order[:n_val], order[n_val:]

    freq = _freq_images(images) if scenario in ("frequency", "combined") else None
    if scenario == "time":
        train_set = (images[fit_idx], labels[fit_idx])
        val_set = (images[val_idx], labels[val_idx])
    elif scenario == "frequency":
        train_set = (freq[fit_idx], labels[fit_idx])
        val_set = (freq[val_idx], labels[val_idx])
    else:
        train_set = (images[fit_idx], freq[fit_idx], labels[fit_idx])
        val_set = (images[val_idx], freq[val_idx], labels[val_idx])

    cfg = config.classifier_config(seed=config.seed)
    result = train_classifier(train_set, val_set, cfg, combined=scenario == "combined")
    model_dir = out / "model"
    save_classifier(result.model, model_dir)
    with open(out / "training_log.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=("epoch", "train_loss", "val_accuracy"))
        writer.writeheader()
        writer.writerows(result.log)
    manifest.artifacts["model"] = str(model_dir)
    manifest.finish(out)
    print(f"best validation accuracy {result.best_val_accuracy:.3f} -> {model_dir}")
    return EXIT_OK


def cmd_predict(args, config: RunConfig) -> int:
    _apply_threads(config)
    import torch

    model = load_classifier(args.model)
    images, _ = _load_stack(args.dataset, require_labels=False)
    from .classify import CombinedClassifier

    inputs = [torch.as_tensor(images)]
    if isinstance(model, CombinedClassifier):
        inputs.append(torch.as_tensor(_freq_images(images)))
    with torch.no_grad():
        out = model(*inputs)
    probs = (out[0] if isinstance(out, tuple) else out).numpy()

    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample", "p_concrete", "p_metallic", "p_pvc", "argmax"])
        for i, row in enumerate(probs):
            writer.writerow(
                [f"sample_{i:05d}", f"{row[0]:.6f}", f"{row[1]:.6f}", f"{row[2]:.6f}",
                 ClassLabel(int(row.argmax())).name]
            )
    print(f"wrote predictions for {len(probs)} samples to {out_path}")
    return EXIT_OK


def cmd_evaluate(args, config: RunConfig) -> int:
    out = Path(args.out)
    manifest = _prepare_out(out, "evaluate", config, args.force)
    if manifest is None:
        return EXIT_OK
    _apply_threads(config)

    train_images, train_labels = _load_stack(args.train, require_labels=True)
    test_images, test_labels = _load_stack(args.test, require_labels=True)

    exp = config.doc["experiment"]
    plan_kwargs = dict(
        scenarios=tuple(exp["scenarios"]),
        seeds=tuple(exp["seeds"]),
        classifier=config.classifier_config(),
        val_fraction=exp["val_fraction"],
    )

    target_size = train_images.shape[-1]
    if args.checkpoint:
        from .gan.checkpoint import load_checkpoint

        ckpt = load_checkpoint(args.checkpoint)
        target_size = ckpt.config.image_size
        plan_kwargs.update(
            gan_checkpoint=ckpt,
            samples_per_class=exp["samples_per_class"],
            augment_seed=config.seed,
        )
    elif args.augment:
        aug_images, aug_labels = _load_stack(args.augment, require_labels=True)
        target_size = aug_images.shape[-1]
        plan_kwargs.update(
            augment_images=downsample_stack(aug_images, target_size),
            augment_labels=aug_labels,
        )

    plan = ExperimentPlan(
        train_images=downsample_stack(train_images, target_size),
        train_labels=train_labels,
        test_images=downsample_stack(test_images, target_size),
        test_labels=test_labels,
        **plan_kwargs,
    )
    result = run_augmentation_experiment(plan)

    (out / "reports.json").write_text(result.to_json(), encoding="utf-8")
    (out / "reports.txt").write_text(result.to_text() + "\n", encoding="utf-8")
    result.to_chart_csv(out / "chart.csv")
    manifest.artifacts.update(
        {
            "reports_json": str(out / "reports.json"),
            "reports_text": str(out / "reports.txt"),
            "chart_csv": str(out / "chart.csv"),
        }
    )
    manifest.finish(out)
    for scenario in plan.scenarios:
        before = result.median_macro_f1(scenario, "before")
        after = result.median_macro_f1(scenario, "after")
        print(f"{scenario}: macro-F1 before {before:.3f} -> after {after:.3f}")
    return EXIT_OK


def cmd_report(args, config: RunConfig) -> int:
    text_path = Path(args.run) / "reports.txt"
    if not text_path.exists():
        raise ConfigError(f"no reports.txt under {args.run}; run evaluate first")
    print(text_path.read_text(encoding="utf-8"))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gprlab",
        description="GPR B-scan synthesis, WGAN-GP augmentation, and classifier evaluation",
    )
    parser.add_argument("--config", help="YAML/JSON run config (defaults apply if omitted)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="synthesize a labeled B-scan dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--engine", choices=["analytic", "fdtd"], default=None)
    p.add_argument("--emit-gprmax", action="store_true")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("transform", help="time dataset -> frequency dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("train-gan", help="train the conditional WGAN-GP")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--resume", default=None)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_train_gan)

    p = sub.add_parser("sample", help="export class-conditional samples")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--per-class", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("train-clf", help="train an object-identification model")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--scenario", choices=["time", "frequency", "combined"], default="time")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_train_clf)

    p = sub.add_parser("predict", help="emit per-sample class probabilities as CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="before/after-augmentation experiment")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--augment", default=None, help="pre-generated augmentation dataset")
    p.add_argument("--checkpoint", default=None, help="GAN checkpoint to sample from")
    p.add_argument("--out", required=True)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="print evaluation tables")
    p.add_argument("--run", required=True)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = RunConfig.load(args.config)
        return args.func(args, config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalAbortError as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except LeakageError as exc:
        print(f"leakage abort: {exc}", file=sys.stderr)
        return EXIT_LEAKAGE
    except GprLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
