"""2-D TMz FDTD B-scan synthesis.

The Yee stepping itself lives in two interchangeable kernels: a compiled
Cython extension (``gprlab.sim._fdtd_core``) and a pure-NumPy fallback with
identical semantics.  Selection happens at import, overridable with the
``GPRLAB_FDTD_KERNEL`` environment variable (``auto``, ``compiled`` or
``numpy``) or per call.

Geometry: the domain is (x, y) with y up.  Soil fills everything below
``scene.surface_y``; above is air.  The line source and receiver sit two
cells above the surface (or two cells below the top boundary when there is
no air layer), advance by ``traversal.step`` per trace, and each trace is an
independent run over the same material grid.
"""

from __future__ import annotations

import math
import os

import numpy as np
from scipy import ndimage

from ..bscan import BScan, ClassLabel
from ..errors import CourantViolationError, DegenerateInputError
from . import _fdtd_numpy
from .scene import C0, MATERIAL_PERMITTIVITY, SimulationScene

try:
    from . import _fdtd_core
except ImportError:
    _fdtd_core = None

HAVE_COMPILED = _fdtd_core is not None

MAX_GRID = 1024


def active_kernel(kernel: str | None = None) -> str:
    """Resolve 'auto'/'compiled'/'numpy' to the kernel that will run."""
    choice = kernel or os.environ.get("GPRLAB_FDTD_KERNEL", "auto")
    if choice == "auto":
        return "compiled" if HAVE_COMPILED else "numpy"
    if choice == "compiled" and not HAVE_COMPILED:
        raise RuntimeError("compiled FDTD kernel requested but the extension is not built")
    if choice not in ("compiled", "numpy"):
        raise ValueError(f"unknown FDTD kernel {choice!r}")
    return choice


def build_material_grids(scene: SimulationScene):
    """Permittivity, conductivity, and PEC cell indices for a scene."""
    cell = scene.cell_size
    nx = int(round(scene.domain_size[0] / cell))
    ny = int(round(scene.domain_size[1] / cell))
    if nx < 8 or ny < 8:
        raise DegenerateInputError(f"grid {nx}x{ny} too small for FDTD")
    if nx > MAX_GRID or ny > MAX_GRID:
        raise DegenerateInputError(f"grid {nx}x{ny} exceeds the {MAX_GRID}^2 limit")

    ys = (np.arange(ny) + 0.5) * cell
    soil_cols = ys < scene.surface_y

    eps_r = np.ones((nx, ny), dtype=np.float64)
    sigma = np.zeros((nx, ny), dtype=np.float64)

    soil = scene.soil
    soil_eps = np.full((nx, ny), soil.mean_rel_permittivity)
    if soil.heterogeneity > 0:
        rng = np.random.default_rng(scene.seed)
        noise = rng.standard_normal((nx, ny))
        smooth = ndimage.gaussian_filter(noise, sigma=soil.correlation_length / cell,
                                         mode="reflect")
        std = smooth.std()
        if std > 0:
            soil_eps = soil_eps + soil.heterogeneity * smooth / std
        soil_eps = np.maximum(soil_eps, 1.0)
    eps_r[:, soil_cols] = soil_eps[:, soil_cols]
    sigma[:, soil_cols] = soil.conductivity

    cyl = scene.cylinder
    cx = cyl.center_x
    cy = scene.surface_y - cyl.center_depth
    xs = (np.arange(nx) + 0.5) * cell
    inside = (xs[:, None] - cx) ** 2 + (ys[None, :] - cy) ** 2 <= cyl.radius**2

    pec = None
    target_eps = MATERIAL_PERMITTIVITY[cyl.material.name]
    if target_eps is None:
        pec = np.nonzero(inside)
    else:
        eps_r[inside] = target_eps
        sigma[inside] = 0.0
    return eps_r, sigma, pec


def _position_to_index(x: float, cell: float, n: int) -> int:
    return int(np.clip(round(x / cell), 2, n - 3))


def fdtd_bscan(
    scene: SimulationScene,
    *,
    dt: float | None = None,
    kernel: str | None = None,
) -> tuple[BScan, ClassLabel]:
    cell = scene.cell_size
    courant = cell / (C0 * math.sqrt(2.0))
    if dt is None:
        dt = scene.sample_dt
    if dt > courant * (1.0 + 1e-12):
        raise CourantViolationError(
            f"dt={dt:.3e}s exceeds the 2-D Courant limit {courant:.3e}s for "
            f"cell_size={cell}m"
        )

    which = active_kernel(kernel)
    eps_r, sigma, pec = build_material_grids(scene)
    nx, ny = eps_r.shape

    n_steps = int(math.ceil(scene.time_window / dt))
    source = scene.waveform.sample(np.arange(n_steps) * dt)

    if scene.air_thickness > 0:
        y_ant = scene.surface_y + 2 * cell
    else:
        y_ant = scene.domain_size[1] - 2 * cell
    j_ant = _position_to_index(y_ant, cell, ny)

    trav = scene.traversal
    traces = np.empty((trav.num_traces, n_steps), dtype=np.float64)
    for t in range(trav.num_traces):
        tx_x = trav.tx_start + t * trav.step
        rx_x = trav.rx_start + t * trav.step
        si = _position_to_index(tx_x, cell, nx)
        ri = _position_to_index(rx_x, cell, nx)
        traces[t] = _run_one(which, eps_r, sigma, pec, (si, j_ant), (ri, j_ant),
                             source, cell, dt)

    bscan = BScan(traces, dt=dt, trace_spacing=trav.step)
    return bscan, scene.cylinder.material


def _run_one(which, eps_r, sigma, pec, src, rx, source, dx, dt):
    if which == "numpy":
        return _fdtd_numpy.run_trace(eps_r, sigma, pec, src, rx, source, dx, dt)
    ca, cb_dx = _fdtd_numpy.prepare_coefficients(eps_r, sigma, dx, dt)
    ch = dt / (_fdtd_numpy.MU0 * dx)
    if pec is None:
        pec_i = np.empty(0, dtype=np.int64)
        pec_j = np.empty(0, dtype=np.int64)
    else:
        pec_i = np.ascontiguousarray(pec[0], dtype=np.int64)
        pec_j = np.ascontiguousarray(pec[1], dtype=np.int64)
    return _fdtd_core.run_trace(
        np.ascontiguousarray(ca),
        np.ascontiguousarray(cb_dx),
        ch,
        _fdtd_numpy.mur_coefficient(eps_r[0, :], dx, dt),
        _fdtd_numpy.mur_coefficient(eps_r[-1, :], dx, dt),
        _fdtd_numpy.mur_coefficient(eps_r[:, 0], dx, dt),
        _fdtd_numpy.mur_coefficient(eps_r[:, -1], dx, dt),
        pec_i,
        pec_j,
        src[0],
        src[1],
        rx[0],
        rx[1],
        source,
    )
