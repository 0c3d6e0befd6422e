"""B-scan synthesis: analytic point-scatterer model, 2-D FDTD, config interop."""

from .analytic import analytic_bscan
from .fdtd import HAVE_COMPILED, active_kernel, fdtd_bscan
from .gprmax_io import emit_gprmax_config, parse_gprmax_config
from .scene import (
    AntennaTraversal,
    CylinderSpec,
    SceneRandomization,
    SimulationScene,
    SoilSpec,
    paper_default_scene,
    sample_scenes,
)
from .waveform import Waveform, ricker

__all__ = [
    "AntennaTraversal",
    "CylinderSpec",
    "HAVE_COMPILED",
    "SceneRandomization",
    "SimulationScene",
    "SoilSpec",
    "Waveform",
    "active_kernel",
    "analytic_bscan",
    "emit_gprmax_config",
    "fdtd_bscan",
    "paper_default_scene",
    "parse_gprmax_config",
    "ricker",
    "sample_scenes",
]
