"""Declarative run configuration.

One YAML (or JSON) document drives every CLI stage.  The document is
schema-validated up front: wrong types and unknown keys are rejected with
their dotted path.  Environment variables prefixed ``GPRLAB_`` override
fields after loading (double underscores separate path segments, e.g.
``GPRLAB_GAN__MAX_STEPS=500``); values are parsed as YAML scalars.

The config hash — sha256 over the canonical JSON of the validated document —
identifies a run: artifacts carry it in their manifest, and commands refuse
to overwrite outputs produced under a different hash unless forced.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import yaml

from .bscan import CLASS_NAMES
from .classify import ClassifierTrainConfig
from .errors import ConfigError
from .gan.config import GanConfig
from .sim.scene import (
    AntennaTraversal,
    CylinderSpec,
    SceneRandomization,
    SimulationScene,
    SoilSpec,
)
from .sim.waveform import Waveform
from .bscan import ClassLabel

ENV_PREFIX = "GPRLAB_"
MANIFEST_NAME = "run_manifest.json"


def _typed(kind, extra=None):
    return {"kind": kind, "check": extra}


def _num_pair(value):
    return (
        isinstance(value, (list, tuple))
        and len(value) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    )


_SCHEMA = {
    "seed": _typed(int),
    "threads": _typed((int, type(None))),
    "output_dir": _typed((str, type(None))),
    "simulate": {
        "engine": _typed(str, lambda v: v in ("analytic", "fdtd")),
        "count": _typed(int, lambda v: v >= 0),
        "emit_gprmax": _typed(bool),
        "include_direct_wave": _typed(bool),
        "workers": _typed(int, lambda v: v >= 1),
        "preprocess": {
            "dewow": _typed(bool),
            "background_removal": _typed(bool),
            "gain": _typed((int, float)),
        },
        "scene": {
            "domain_size": _typed(list, _num_pair),
            "cell_size": _typed((int, float), lambda v: v > 0),
            "time_window": _typed((int, float), lambda v: v > 0),
            "air_thickness": _typed((int, float), lambda v: v >= 0),
            "num_traces": _typed(int, lambda v: v >= 1),
            "trace_step": _typed((int, float), lambda v: v > 0),
            "tx_start": _typed((int, float)),
            "rx_start": _typed((int, float)),
            "waveform": {
                "center_frequency": _typed((int, float), lambda v: v > 0),
                "amplitude": _typed((int, float)),
            },
            "soil": {
                "mean_rel_permittivity": _typed((int, float), lambda v: v >= 1),
                "heterogeneity": _typed((int, float), lambda v: v >= 0),
                "correlation_length": _typed((int, float), lambda v: v > 0),
                "conductivity": _typed((int, float), lambda v: v >= 0),
            },
        },
        "randomize": {
            "materials": _typed(list, lambda v: all(m in CLASS_NAMES for m in v)),
            "radius": _typed(list, _num_pair),
            "depth": _typed(list, _num_pair),
            "center_x": _typed(list, _num_pair),
            "permittivity": _typed(list, _num_pair),
            "heterogeneity": _typed(list, _num_pair),
        },
    },
    "gan": {
        "image_size": _typed(int),
        "latent_dim": _typed(int),
        "num_classes": _typed(int),
        "gp_lambda": _typed((int, float)),
        "n_critic": _typed(int),
        "learning_rate": _typed((int, float)),
        "batch_size": _typed(int),
        "adam_beta1": _typed((int, float)),
        "adam_beta2": _typed((int, float)),
        "freq_loss_weight": _typed((int, float)),
        "aux_class_weight": _typed((int, float)),
        "validation_fraction": _typed((int, float)),
        "patience": _typed(int),
        "eval_every": _typed(int),
        "max_steps": _typed(int),
        "seed": _typed((int, type(None))),
    },
    "classifier": {
        "learning_rate": _typed((int, float)),
        "batch_size": _typed(int),
        "epochs": _typed(int),
        "aux_branch_weight": _typed((int, float)),
    },
    "experiment": {
        "scenarios": _typed(list, lambda v: all(s in ("time", "frequency", "combined")
                                                for s in v)),
        "seeds": _typed(list, lambda v: all(isinstance(s, int) for s in v)),
        "samples_per_class": _typed(int, lambda v: v >= 0),
        "val_fraction": _typed((int, float), lambda v: 0 < v < 1),
    },
}

_DEFAULTS = {
    "seed": 0,
    "threads": None,
    "output_dir": None,
    "simulate": {
        "engine": "analytic",
        "count": 300,
        "emit_gprmax": False,
        "include_direct_wave": True,
        "workers": 1,
        "preprocess": {"dewow": False, "background_removal": False, "gain": 0.0},
        "scene": {
            "domain_size": [1.0, 1.0],
            "cell_size": 0.002,
            "time_window": 12e-9,
            "air_thickness": 0.05,
            "num_traces": 150,
            "trace_step": 0.002,
            "tx_start": 0.1,
            "rx_start": 0.14,
            "waveform": {"center_frequency": 1.5e9, "amplitude": 1.0},
            "soil": {
                "mean_rel_permittivity": 6.0,
                "heterogeneity": 0.0,
                "correlation_length": 0.05,
                "conductivity": 1e-3,
            },
        },
        "randomize": {
            "materials": list(CLASS_NAMES),
            "radius": [0.01, 0.05],
            "depth": [0.1, 0.3],
            "center_x": [0.3, 0.7],
            "permittivity": [4.0, 9.0],
            "heterogeneity": [0.0, 0.4],
        },
    },
    "gan": {
        "image_size": 256,
        "latent_dim": 100,
        "num_classes": 3,
        "gp_lambda": 10.0,
        "n_critic": 5,
        "learning_rate": 3e-4,
        "batch_size": 16,
        "adam_beta1": 0.0,
        "adam_beta2": 0.9,
        "freq_loss_weight": 1.0,
        "aux_class_weight": 0.0,
        "validation_fraction": 0.1,
        "patience": 20,
        "eval_every": 10,
        "max_steps": 2000,
        "seed": None,
    },
    "classifier": {
        "learning_rate": 1e-3,
        "batch_size": 32,
        "epochs": 30,
        "aux_branch_weight": 0.0,
    },
    "experiment": {
        "scenarios": ["time", "frequency", "combined"],
        "seeds": [0, 1, 2, 3, 4],
        "samples_per_class": 60,
        "val_fraction": 0.2,
    },
}


def _merge(defaults: dict, given: dict, path: str) -> dict:
    out = {}
    for key, default in defaults.items():
        if isinstance(default, dict):
            sub = given.get(key, {})
            if not isinstance(sub, dict):
                raise ConfigError(f"{path}{key}: expected a mapping")
            out[key] = _merge(default, sub, f"{path}{key}.")
        else:
            out[key] = given.get(key, default)
    for key in given:
        if key not in defaults:
            raise ConfigError(f"unknown config key {path}{key}")
    return out


def _validate(schema: dict, doc: dict, path: str):
    for key, spec in schema.items():
        value = doc[key]
        if isinstance(spec, dict) and "kind" not in spec:
            _validate(spec, value, f"{path}{key}.")
            continue
        kind = spec["kind"]
        if isinstance(value, bool) and kind is not bool and bool not in (
            kind if isinstance(kind, tuple) else (kind,)
        ):
            raise ConfigError(f"{path}{key}: expected {kind}, got bool")
        if not isinstance(value, kind):
            raise ConfigError(f"{path}{key}: expected {kind}, got {type(value).__name__}")
        check = spec["check"]
        if check is not None and value is not None and not check(value):
            raise ConfigError(f"{path}{key}: invalid value {value!r}")


def _apply_env_overrides(doc: dict) -> dict:
    for name, raw in sorted(os.environ.items()):
        if not name.startswith(ENV_PREFIX):
            continue
        segments = name[len(ENV_PREFIX):].lower().split("__")
        target = doc
        for seg in segments[:-1]:
            if not isinstance(target.get(seg), dict):
                raise ConfigError(f"env override {name}: no section {'.'.join(segments[:-1])}")
            target = target[seg]
        try:
            value = yaml.safe_load(raw)
        except yaml.YAMLError as exc:
            raise ConfigError(f"env override {name}: {exc}") from None
        target[segments[-1]] = value
    return doc


@dataclass
class RunConfig:
    doc: dict

    @classmethod
    def load(cls, path=None, overrides: dict | None = None) -> "RunConfig":
        given: dict = {}
        if path is not None:
            text = Path(path).read_text(encoding="utf-8")
            try:
                given = yaml.safe_load(text) or {}
            except yaml.YAMLError as exc:
                raise ConfigError(f"cannot parse {path}: {exc}") from None
            if not isinstance(given, dict):
                raise ConfigError(f"{path}: top level must be a mapping")
        doc = _merge(_DEFAULTS, given, "")
        doc = _apply_env_overrides(doc)
        if overrides:
            for dotted, value in overrides.items():
                target = doc
                *parents, leaf = dotted.split(".")
                for seg in parents:
                    target = target[seg]
                target[leaf] = value
        _validate(_SCHEMA, doc, "")
        return cls(doc)

    def hash(self) -> str:
        payload = json.dumps(self.doc, sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()[:16]

    @property
    def seed(self) -> int:
        return self.doc["seed"]

    @property
    def threads(self) -> int | None:
        return self.doc["threads"]

    def base_scene(self) -> SimulationScene:
        s = self.doc["simulate"]["scene"]
        rand = self.doc["simulate"]["randomize"]
        mid_depth = 0.5 * (rand["depth"][0] + rand["depth"][1])
        mid_x = 0.5 * (rand["center_x"][0] + rand["center_x"][1])
        mid_r = 0.5 * (rand["radius"][0] + rand["radius"][1])
        return SimulationScene(
            domain_size=tuple(s["domain_size"]),
            cell_size=s["cell_size"],
            time_window=s["time_window"],
            waveform=Waveform(
                center_frequency=s["waveform"]["center_frequency"],
                amplitude=s["waveform"]["amplitude"],
            ),
            soil=SoilSpec(
                mean_rel_permittivity=s["soil"]["mean_rel_permittivity"],
                heterogeneity=s["soil"]["heterogeneity"],
                correlation_length=s["soil"]["correlation_length"],
                conductivity=s["soil"]["conductivity"],
            ),
            cylinder=CylinderSpec(ClassLabel(0), mid_x, mid_depth, mid_r),
            traversal=AntennaTraversal(
                tx_start=s["tx_start"],
                rx_start=s["rx_start"],
                step=s["trace_step"],
                num_traces=s["num_traces"],
                tx_rx_offset=abs(s["tx_start"] - s["rx_start"]),
            ),
            air_thickness=s["air_thickness"],
            seed=self.seed,
        )

    def randomization(self) -> SceneRandomization:
        r = self.doc["simulate"]["randomize"]
        return SceneRandomization(
            materials=tuple(r["materials"]),
            radius=tuple(r["radius"]),
            depth=tuple(r["depth"]),
            center_x=tuple(r["center_x"]),
            permittivity=tuple(r["permittivity"]),
            heterogeneity=tuple(r["heterogeneity"]),
            base=self.base_scene(),
        )

    def gan_config(self) -> GanConfig:
        g = dict(self.doc["gan"])
        if g["seed"] is None:
            g["seed"] = self.seed
        return GanConfig(**g)

    def classifier_config(self, seed: int = 0) -> ClassifierTrainConfig:
        c = self.doc["classifier"]
        return ClassifierTrainConfig(
            learning_rate=c["learning_rate"],
            batch_size=c["batch_size"],
            epochs=c["epochs"],
            aux_branch_weight=c["aux_branch_weight"],
            seed=seed,
        )


@dataclass
class RunManifest:
    command: str
    config_hash: str
    tool_version: str
    seeds: dict
    artifacts: dict
    timestamps: dict

    @classmethod
    def start(cls, command: str, config: RunConfig) -> "RunManifest":
        from . import __version__

        return cls(
            command=command,
            config_hash=config.hash(),
            tool_version=__version__,
            seeds={"global": config.seed},
            artifacts={},
            timestamps={"started": datetime.now(timezone.utc).isoformat()},
        )

    def finish(self, out_dir) -> None:
        self.timestamps["finished"] = datetime.now(timezone.utc).isoformat()
        doc = {
            "command": self.command,
            "config_hash": self.config_hash,
            "tool_version": self.tool_version,
            "seeds": self.seeds,
            "artifacts": self.artifacts,
            "timestamps": self.timestamps,
        }
        Path(out_dir, MANIFEST_NAME).write_text(json.dumps(doc, indent=2), encoding="utf-8")


def read_manifest(out_dir) -> dict | None:
    path = Path(out_dir, MANIFEST_NAME)
    if not path.exists():
        return None
    return json.loads(path.read_text(encoding="utf-8"))
