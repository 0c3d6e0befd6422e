"""gprMax-style config text: emission and parsing.

The format is line-oriented ``#directive: args``; ``-----`` separator lines
and blank lines carry no meaning.  A scene round-trips through the text up
to the fields the format can represent (trace count, soil texture and seed
are not part of it).
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from ..bscan import ClassLabel
from ..errors import GprMaxParseError
from .scene import AntennaTraversal, CylinderSpec, SimulationScene, SoilSpec
from .waveform import Waveform

SEPARATOR = "-----"
WAVEFORM_ID = "my_ricker"
SOIL_ID = "soil"

# directives we accept but do not map onto the scene
OPAQUE_DIRECTIVES = {
    "fractal_box",
    "add_surface_roughness",
    "messages",
    "title",
    "pml_cells",
    "geometry_view",
}

_MATERIAL_TO_GPRMAX = {"metallic": "pec", "concrete": "concrete", "pvc": "pvc"}
_GPRMAX_TO_MATERIAL = {v: k for k, v in _MATERIAL_TO_GPRMAX.items()}


def _fmt(x: float) -> str:
    if float(x) == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def _fmt_scaled(x: float, unit: float, suffix: str) -> str:
    return f"{x / unit:.12g}{suffix}"


def _antenna_y(scene: SimulationScene) -> float:
    if scene.air_thickness > 0:
        return scene.surface_y + 2 * scene.cell_size
    return scene.domain_size[1] - 2 * scene.cell_size


def emit_gprmax_config(scene: SimulationScene, extras: tuple[str, ...] = ()) -> str:
    """Render a scene in Fig-3.3-style config text."""
    cell = scene.cell_size
    lines = []
    if scene.soil.peplinski_params is not None:
        params = " ".join(
            tok if isinstance(tok, str) else _fmt(tok) for tok in scene.soil.peplinski_params
        )
        lines += [f"#soil_peplinski: {params}", SEPARATOR]
    lines += [
        f"#domain: {_fmt(scene.domain_size[0])} {_fmt(scene.domain_size[1])} {_fmt(cell)}",
        f"#dx_dy_dz: {_fmt(cell)} {_fmt(cell)} {_fmt(cell)}",
        f"#time_window: {_fmt_scaled(scene.time_window, 1e-9, 'e-9')}",
        SEPARATOR,
        f"#material: {_fmt(scene.soil.mean_rel_permittivity)} "
        f"{_fmt(scene.soil.conductivity)} 1 0 {SOIL_ID}",
        f"#box: 0 0 0 {_fmt(scene.domain_size[0])} {_fmt(scene.surface_y)} "
        f"{_fmt(cell)} {SOIL_ID}",
    ]
    cyl = scene.cylinder
    cy = scene.surface_y - cyl.center_depth
    lines += [
        f"#cylinder: {_fmt(cyl.center_x)} {_fmt(cy)} 0 {_fmt(cyl.center_x)} {_fmt(cy)} "
        f"{_fmt(cell)} {_fmt(cyl.radius)} {_MATERIAL_TO_GPRMAX[cyl.material.name]} y",
        SEPARATOR,
    ]
    trav = scene.traversal
    y_ant = _antenna_y(scene)
    lines += [
        f"#rx: {_fmt(trav.rx_start)} {_fmt(y_ant)} 0",
        f"#src_steps: {_fmt(trav.step)} 0.0 0",
        f"#rx_steps: {_fmt(trav.step)} 0.0 0",
        SEPARATOR,
        f"#waveform: ricker {_fmt(scene.waveform.amplitude)} "
        f"{_fmt_scaled(scene.waveform.center_frequency, 1e9, 'e9')} {WAVEFORM_ID}",
        f"#hertzian_dipole: z {_fmt(trav.tx_start)} {_fmt(y_ant)} 0 {WAVEFORM_ID}",
    ]
    lines += list(extras)
    return "\n".join(lines) + "\n"


def _floats(args: list[str], n: int, directive: str, line_no: int) -> list[float]:
    if len(args) < n:
        raise GprMaxParseError(f"#{directive}: expected at least {n} args, got {len(args)}",
                               line_no)
    try:
        return [float(a) for a in args[:n]]
    except ValueError as exc:
        raise GprMaxParseError(f"#{directive}: {exc}", line_no) from None


def parse_gprmax_config(text: str) -> SimulationScene:
    """Parse config text into a scene (unrepresented fields get defaults)."""
    found: dict[str, tuple[list[str], int]] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or set(line) == {"-"}:
            continue
        if not line.startswith("#") or ":" not in line:
            raise GprMaxParseError(f"expected '#directive: args', got {line!r}", line_no)
        name, _, rest = line[1:].partition(":")
        name = name.strip()
        args = rest.split()
        if name in OPAQUE_DIRECTIVES:
            if name == "fractal_box":
                _floats(args, 6, name, line_no)
                found.setdefault("box", (args, line_no))
            continue
        if name in found:
            raise GprMaxParseError(f"duplicate directive #{name}", line_no)
        if name not in _ARITY:
            raise GprMaxParseError(f"unknown directive #{name}", line_no)
        lo, hi = _ARITY[name]
        if not lo <= len(args) <= hi:
            raise GprMaxParseError(
                f"#{name}: expected {lo}"
                + (f"-{hi}" if hi != lo else "")
                + f" args, got {len(args)}",
                line_no,
            )
        found[name] = (args, line_no)

    def require(name: str) -> tuple[list[str], int]:
        if name not in found:
            raise GprMaxParseError(f"missing required directive #{name}", 0)
        return found[name]

    args, ln = require("domain")
    dom_x, dom_y, _ = _floats(args, 3, "domain", ln)
    args, ln = require("dx_dy_dz")
    cell = _floats(args, 3, "dx_dy_dz", ln)[0]
    args, ln = require("time_window")
    time_window = _floats(args, 1, "time_window", ln)[0]

    surface_y = dom_y
    if "box" in found:
        args, ln = found["box"]
        vals = _floats(args, 6, "box", ln)
        surface_y = min(vals[4], dom_y)

    soil = SoilSpec()
    if "material" in found:
        args, ln = found["material"]
        vals = _floats(args, 4, "material", ln)
        soil = replace(soil, mean_rel_permittivity=vals[0], conductivity=vals[1])
    if "soil_peplinski" in found:
        args, ln = found["soil_peplinski"]
        vals = _floats(args, 6, "soil_peplinski", ln)
        soil = replace(soil, peplinski_params=tuple(vals) + (args[6],))

    args, ln = require("waveform")
    if args[0] != "ricker":
        raise GprMaxParseError(f"unsupported waveform type {args[0]!r}", ln)
    amp, fc = _floats(args[1:], 2, "waveform", ln)
    waveform = Waveform(kind="ricker", center_frequency=fc, amplitude=amp)

    args, ln = require("cylinder")
    vals = _floats(args, 7, "cylinder", ln)
    material_token = args[7]
    if material_token not in _GPRMAX_TO_MATERIAL:
        raise GprMaxParseError(f"unknown cylinder material {material_token!r}", ln)
    cylinder = CylinderSpec(
        material=ClassLabel.from_name(_GPRMAX_TO_MATERIAL[material_token]),
        center_x=vals[0],
        center_depth=surface_y - vals[1],
        radius=vals[6],
    )

    args, ln = require("hertzian_dipole")
    tx = _floats(args[1:], 3, "hertzian_dipole", ln)
    args, ln = require("rx")
    rx = _floats(args, 3, "rx", ln)
    args, ln = require("src_steps")
    step = _floats(args, 3, "src_steps", ln)[0]
    require("rx_steps")

    traversal = AntennaTraversal(
        tx_start=tx[0],
        rx_start=rx[0],
        step=step,
        num_traces=AntennaTraversal().num_traces,
        tx_rx_offset=abs(tx[0] - rx[0]),
    )

    return SimulationScene(
        domain_size=(dom_x, dom_y),
        cell_size=cell,
        time_window=time_window,
        waveform=waveform,
        soil=soil,
        cylinder=cylinder,
        traversal=traversal,
        air_thickness=dom_y - surface_y,
    )


_ARITY = {
    "domain": (3, 3),
    "dx_dy_dz": (3, 3),
    "time_window": (1, 1),
    "material": (5, 5),
    "box": (7, 8),
    "soil_peplinski": (7, 7),
    "cylinder": (8, 9),
    "waveform": (4, 4),
    "hertzian_dipole": (5, 5),
    "rx": (3, 4),
    "src_steps": (3, 3),
    "rx_steps": (3, 3),
}
