"""Raw little-endian tensor blobs for checkpoint directories."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import torch

from .errors import MissingSampleError

DTYPE_CODES = {"f4": (np.dtype("<f4"), torch.float32), "i8": (np.dtype("<i8"), torch.int64)}


def dtype_code(t: torch.Tensor) -> str:
    return "i8" if t.dtype in (torch.int64, torch.int32, torch.bool) else "f4"


def dump_tensors(tensors: dict, dir_path: Path, group: str) -> list[dict]:
    """Write one .bin per tensor under ``dir_path/params``; return the index."""
    (dir_path / "params").mkdir(parents=True, exist_ok=True)
    index = []
    for key, tensor in tensors.items():
        code = dtype_code(tensor)
        fname = f"params/{group}.{key}.bin"
        arr = tensor.detach().cpu().numpy().astype(DTYPE_CODES[code][0])
        arr.tofile(dir_path / fname)
        index.append(
            {"group": group, "key": key, "file": fname,
             "shape": list(tensor.shape), "dtype": code}
        )
    return index


def load_tensors(index: list[dict], dir_path: Path) -> dict[str, dict]:
    """Read an index back into {group: {key: tensor}}."""
    groups: dict[str, dict] = {}
    for entry in index:
        fname = dir_path / entry["file"]
        if not fname.exists():
            raise MissingSampleError(f"missing tensor blob {entry['file']}")
        np_dtype, t_dtype = DTYPE_CODES[entry["dtype"]]
        arr = np.fromfile(fname, dtype=np_dtype).reshape(entry["shape"])
        groups.setdefault(entry["group"], {})[entry["key"]] = (
            torch.from_numpy(arr.copy()).to(t_dtype)
        )
    return groups
