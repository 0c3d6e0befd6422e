"""Scene description for B-scan synthesis and randomized scene sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import constants

from ..bscan import CLASS_NAMES, ClassLabel
from ..errors import InfeasibleSceneError
from .waveform import Waveform

C0 = constants.c

# Fraction of the Courant limit used when deriving the simulation time step
# from the cell size; shared by both engines so sample counts agree.
COURANT_FACTOR = 0.95

# Handbook-typical material parameters (configurable per call where needed):
# metallic targets are modelled as perfect electric conductors.
MATERIAL_PERMITTIVITY = {"concrete": 6.0, "metallic": None, "pvc": 3.0}
MATERIAL_REFLECTIVITY = {"concrete": 0.5, "metallic": 1.0, "pvc": 0.25}

RADIUS_MIN = 0.002
RADIUS_MAX = 0.080


@dataclass(frozen=True)
class SoilSpec:
    mean_rel_permittivity: float = 6.0
    heterogeneity: float = 0.0
    correlation_length: float = 0.05
    conductivity: float = 1e-3
    peplinski_params: tuple | None = None  # carried verbatim for config emission

    def __post_init__(self):
        if self.mean_rel_permittivity < 1.0:
            raise ValueError("mean_rel_permittivity must be >= 1")
        if self.heterogeneity < 0 or self.conductivity < 0:
            raise ValueError("heterogeneity and conductivity must be non-negative")
        if self.mean_rel_permittivity - 3.0 * self.heterogeneity < 1.0:
            raise ValueError(
                "heterogeneity too large: mean permittivity minus three sigma dips below 1"
            )
        if self.correlation_length <= 0:
            raise ValueError("correlation_length must be positive")

    @property
    def wave_speed(self) -> float:
        return C0 / math.sqrt(self.mean_rel_permittivity)


@dataclass(frozen=True)
class CylinderSpec:
    material: ClassLabel
    center_x: float
    center_depth: float  # below the soil surface, metres
    radius: float

    def __post_init__(self):
        if not RADIUS_MIN <= self.radius <= RADIUS_MAX:
            raise ValueError(
                f"radius {self.radius} outside supported range [{RADIUS_MIN}, {RADIUS_MAX}]"
            )
        if self.center_depth <= 0:
            raise ValueError("center_depth must be positive")


@dataclass(frozen=True)
class AntennaTraversal:
    tx_start: float = 0.1
    rx_start: float = 0.14
    step: float = 0.002
    num_traces: int = 150
    tx_rx_offset: float = 0.04

    def __post_init__(self):
        if self.num_traces < 1:
            raise ValueError("num_traces must be >= 1")
        if self.step <= 0:
            raise ValueError("step must be positive")

    def midpoints(self) -> np.ndarray:
        """Antenna midpoint x position per trace."""
        start = 0.5 * (self.tx_start + self.rx_start)
        return start + self.step * np.arange(self.num_traces)


@dataclass(frozen=True)
class SimulationScene:
    domain_size: tuple[float, float] = (1.0, 1.0)
    cell_size: float = 0.002
    time_window: float = 12e-9
    waveform: Waveform = field(default_factory=Waveform)
    soil: SoilSpec = field(default_factory=SoilSpec)
    cylinder: CylinderSpec = field(
        default_factory=lambda: CylinderSpec(ClassLabel(1), 0.5, 0.2, 0.02)
    )
    traversal: AntennaTraversal = field(default_factory=AntennaTraversal)
    air_thickness: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.time_window <= 0 or self.cell_size <= 0:
            raise ValueError("time_window and cell_size must be positive")
        if self.air_thickness < 0 or self.air_thickness >= self.domain_size[1]:
            raise ValueError("air_thickness must lie inside the domain")
        cyl = self.cylinder
        surface_y = self.domain_size[1] - self.air_thickness
        if not (cyl.radius <= cyl.center_x <= self.domain_size[0] - cyl.radius):
            raise ValueError("cylinder extends outside the domain in x")
        if cyl.center_depth + cyl.radius > surface_y or cyl.center_depth < cyl.radius:
            raise ValueError("cylinder extends outside the soil in depth")

    @property
    def sample_dt(self) -> float:
        """Time step derived from the cell size at COURANT_FACTOR of the 2-D limit."""
        return COURANT_FACTOR * self.cell_size / (C0 * math.sqrt(2.0))

    @property
    def num_samples(self) -> int:
        return int(math.ceil(self.time_window / self.sample_dt))

    @property
    def surface_y(self) -> float:
        return self.domain_size[1] - self.air_thickness

    def with_seed(self, seed: int) -> "SimulationScene":
        return replace(self, seed=seed)


def paper_default_scene(material: str = "metallic", seed: int = 0) -> SimulationScene:
    """The stock 1 m x 1 m, 2 mm cell, 12 ns, 1.5 GHz Ricker scene."""
    return SimulationScene(
        cylinder=CylinderSpec(ClassLabel.from_name(material), 0.33, 0.33, 0.01),
        seed=seed,
    )


@dataclass(frozen=True)
class SceneRandomization:
    """Uniform sampling ranges for randomized scene batches."""

    materials: tuple[str, ...] = CLASS_NAMES
    radius: tuple[float, float] = (0.01, 0.05)
    depth: tuple[float, float] = (0.1, 0.3)
    center_x: tuple[float, float] = (0.3, 0.7)
    permittivity: tuple[float, float] = (4.0, 9.0)
    heterogeneity: tuple[float, float] = (0.0, 0.4)
    base: SimulationScene = field(default_factory=SimulationScene)

    def __post_init__(self):
        if len(self.materials) == 0:
            raise InfeasibleSceneError("materials set is empty")
        for name in self.materials:
            if name not in CLASS_NAMES:
                raise InfeasibleSceneError(f"unknown material {name!r}")
        for lo, hi in (self.radius, self.depth, self.center_x, self.permittivity,
                       self.heterogeneity):
            if hi < lo:
                raise InfeasibleSceneError(f"empty range [{lo}, {hi}]")


def _check_feasible(rand: SceneRandomization):
    base = rand.base
    surface = base.surface_y
    r_lo, r_hi = rand.radius
    if r_lo < RADIUS_MIN or r_hi > RADIUS_MAX:
        raise InfeasibleSceneError(
            f"radius range {rand.radius} outside supported [{RADIUS_MIN}, {RADIUS_MAX}]"
        )
    # worst case: largest radius with shallowest/deepest center and extreme x
    d_lo, d_hi = rand.depth
    if d_lo < r_hi or d_hi + r_hi > surface:
        raise InfeasibleSceneError("cylinder cannot fit inside the soil for these ranges")
    x_lo, x_hi = rand.center_x
    if x_lo < r_hi or x_hi + r_hi > base.domain_size[0]:
        raise InfeasibleSceneError("cylinder cannot fit inside the domain in x")
    p_lo = rand.permittivity[0]
    if p_lo - 3.0 * rand.heterogeneity[1] < 1.0:
        raise InfeasibleSceneError("permittivity/heterogeneity ranges can dip below vacuum")


def sample_scenes(randomization: SceneRandomization, n: int, seed: int) -> list[SimulationScene]:
    """Draw ``n`` independent scenes; scene i uses derived seed ``seed + i``.

    Per-scene attributes come from a generator seeded with the derived seed,
    so batch generation can be split across workers and still reproduce.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    _check_feasible(randomization)
    base = randomization.base
    scenes = []
    for i in range(n):
        scene_seed = seed + i
        rng = np.random.default_rng(scene_seed)
        material = randomization.materials[rng.integers(len(randomization.materials))]
        cyl = CylinderSpec(
            material=ClassLabel.from_name(material),
            center_x=float(rng.uniform(*randomization.center_x)),
            center_depth=float(rng.uniform(*randomization.depth)),
            radius=float(rng.uniform(*randomization.radius)),
        )
        soil = replace(
            base.soil,
            mean_rel_permittivity=float(rng.uniform(*randomization.permittivity)),
            heterogeneity=float(rng.uniform(*randomization.heterogeneity)),
        )
        scenes.append(replace(base, cylinder=cyl, soil=soil, seed=scene_seed))
    return scenes
