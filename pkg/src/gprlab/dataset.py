"""Dataset persistence.

Layout: one directory holding ``manifest.json`` plus one file per sample.
Sample files are flat row-major little-endian IEEE-754 float32, no header;
their shape lives in the manifest.  Round trips are bit-exact for float32
pixels and lossless for labels and metadata.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bscan import CANVAS_SIZE, CLASS_NAMES, ClassLabel, RadarImage
from .errors import MissingSampleError, ShapeMismatchError, UnknownVersionError

MANIFEST_NAME = "manifest.json"
MANIFEST_VERSION = 1


@dataclass
class ManifestItem:
    path: str
    shape: tuple[int, int]
    domain_tag: str
    label: int | None = None
    scene_seed: int | None = None


@dataclass
class DatasetManifest:
    version: int = MANIFEST_VERSION
    items: list[ManifestItem] = field(default_factory=list)
    class_map: dict[int, str] = field(
        default_factory=lambda: {i: n for i, n in enumerate(CLASS_NAMES)}
    )

    def to_json(self) -> str:
        doc = {
            "version": self.version,
            "class_map": {str(k): v for k, v in self.class_map.items()},
            "items": [
                {
                    "path": it.path,
                    "shape": list(it.shape),
                    "domain_tag": it.domain_tag,
                    "label": it.label,
                    "scene_seed": it.scene_seed,
                }
                for it in self.items
            ],
        }
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "DatasetManifest":
        doc = json.loads(text)
        version = doc.get("version")
        if version != MANIFEST_VERSION:
            raise UnknownVersionError(f"unsupported manifest version {version!r}")
        items = [
            ManifestItem(
                path=entry["path"],
                shape=tuple(entry["shape"]),
                domain_tag=entry["domain_tag"],
                label=entry["label"],
                scene_seed=entry.get("scene_seed"),
            )
            for entry in doc["items"]
        ]
        class_map = {int(k): v for k, v in doc["class_map"].items()}
        for it in items:
            if it.label is not None and it.label not in class_map:
                raise ShapeMismatchError(f"item {it.path} has unknown label id {it.label}")
        return cls(version=version, items=items, class_map=class_map)


def _as_pixels(image) -> tuple[np.ndarray, str]:
    """Accept RadarImage or a bare 2-D array; return (float32 pixels, tag)."""
    if isinstance(image, RadarImage):
        return image.pixels, image.domain_tag
    arr = np.asarray(image, dtype=np.float32)
    if arr.ndim != 2:
        raise ShapeMismatchError(f"sample must be 2-D, got shape {arr.shape}")
    return arr, "time"


def save_dataset(items, dir_path, domain_tag: str | None = None) -> DatasetManifest:
    """Write samples and manifest to ``dir_path``.

    ``items`` is a list of (image, label) or (image, label, scene_seed)
    tuples, where image is a RadarImage or a 2-D array and label is a
    ClassLabel, an int id, or None.  ``domain_tag`` overrides the tag for
    bare-array samples.
    """
    dir_path = Path(dir_path)
    dir_path.mkdir(parents=True, exist_ok=True)
    manifest = DatasetManifest()
    for i, item in enumerate(items):
        image, label, *rest = item
        scene_seed = rest[0] if rest else None
        pixels, tag = _as_pixels(image)
        if domain_tag is not None and not isinstance(image, RadarImage):
            tag = domain_tag
        if isinstance(label, ClassLabel):
            label = label.id
        if label is not None and not 0 <= int(label) < len(CLASS_NAMES):
            raise ValueError(f"invalid label id {label}")
        name = f"sample_{i:05d}.f32"
        pixels.astype("<f4").tofile(dir_path / name)
        manifest.items.append(
            ManifestItem(
                path=name,
                shape=pixels.shape,
                domain_tag=tag,
                label=None if label is None else int(label),
                scene_seed=None if scene_seed is None else int(scene_seed),
            )
        )
    (dir_path / MANIFEST_NAME).write_text(manifest.to_json(), encoding="utf-8")
    return manifest


def load_dataset(dir_path):
    """Read a dataset directory back as ``(items, manifest)``.

    Items are (image, label) pairs; the image is a RadarImage when the stored
    shape is the canonical canvas, otherwise the bare float32 array.
    """
    dir_path = Path(dir_path)
    manifest_path = dir_path / MANIFEST_NAME
    if not manifest_path.exists():
        raise MissingSampleError(f"no {MANIFEST_NAME} in {dir_path}")
    manifest = DatasetManifest.from_json(manifest_path.read_text(encoding="utf-8"))

    items = []
    for entry in manifest.items:
        sample_path = dir_path / entry.path
        if not sample_path.exists():
            raise MissingSampleError(f"missing sample file {entry.path}")
        flat = np.fromfile(sample_path, dtype="<f4")
        expected = int(np.prod(entry.shape))
        if flat.size != expected:
            raise ShapeMismatchError(
                f"{entry.path}: expected {expected} float32 values for shape "
                f"{entry.shape}, found {flat.size}"
            )
        pixels = flat.reshape(entry.shape)
        label = None if entry.label is None else ClassLabel(entry.label)
        if entry.shape == (CANVAS_SIZE, CANVAS_SIZE):
            image = RadarImage(pixels, domain_tag=entry.domain_tag, label=label)
        else:
            image = pixels
        items.append((image, label))
    return items, manifest
