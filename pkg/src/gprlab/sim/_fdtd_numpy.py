"""Pure-NumPy 2-D TMz Yee kernel (fallback for the compiled extension).

Field layout: ``ez`` on the (nx, ny) grid, ``hx`` staggered in y with shape
(nx, ny-1), ``hy`` staggered in x with shape (nx-1, ny).  First-order Mur
absorbing boundaries on all four sides, soft additive line source, PEC cells
forced to zero after every electric-field update.
"""

from __future__ import annotations

import numpy as np
from scipy import constants

C0 = constants.c
EPS0 = constants.epsilon_0
MU0 = constants.mu_0


def prepare_coefficients(eps_r: np.ndarray, sigma: np.ndarray, dx: float, dt: float):
    """Update coefficients ca, cb/dx for the lossy electric-field update."""
    eps = EPS0 * eps_r
    loss = sigma * dt / (2.0 * eps)
    ca = (1.0 - loss) / (1.0 + loss)
    cb_dx = (dt / eps) / (1.0 + loss) / dx
    return ca, cb_dx


def mur_coefficient(eps_r_line: np.ndarray, dx: float, dt: float) -> np.ndarray:
    v = C0 / np.sqrt(eps_r_line)
    return (v * dt - dx) / (v * dt + dx)


def run_trace(
    eps_r: np.ndarray,
    sigma: np.ndarray,
    pec: tuple[np.ndarray, np.ndarray] | None,
    src: tuple[int, int],
    rx: tuple[int, int],
    source: np.ndarray,
    dx: float,
    dt: float,
) -> np.ndarray:
    """Run one A-scan; ``pec`` is a pair of index arrays of conductor cells."""
    nx, ny = eps_r.shape
    ca, cb_dx = prepare_coefficients(eps_r, sigma, dx, dt)
    ch = dt / (MU0 * dx)

    k_left = mur_coefficient(eps_r[0, :], dx, dt)
    k_right = mur_coefficient(eps_r[-1, :], dx, dt)
    k_bot = mur_coefficient(eps_r[:, 0], dx, dt)
    k_top = mur_coefficient(eps_r[:, -1], dx, dt)

    ez = np.zeros((nx, ny), dtype=np.float64)
    hx = np.zeros((nx, ny - 1), dtype=np.float64)
    hy = np.zeros((nx - 1, ny), dtype=np.float64)
    si, sj = src
    ri, rj = rx
    record = np.empty(len(source), dtype=np.float64)

    for n in range(len(source)):
        hx -= ch * (ez[:, 1:] - ez[:, :-1])
        hy += ch * (ez[1:, :] - ez[:-1, :])

        old_left = ez[0:2, :].copy()
        old_right = ez[-2:, :].copy()
        old_bot = ez[:, 0:2].copy()
        old_top = ez[:, -2:].copy()

        curl = (hy[1:, 1:-1] - hy[:-1, 1:-1]) - (hx[1:-1, 1:] - hx[1:-1, :-1])
        ez[1:-1, 1:-1] = ca[1:-1, 1:-1] * ez[1:-1, 1:-1] + cb_dx[1:-1, 1:-1] * curl

        ez[0, :] = old_left[1, :] + k_left * (ez[1, :] - old_left[0, :])
        ez[-1, :] = old_right[0, :] + k_right * (ez[-2, :] - old_right[1, :])
        ez[:, 0] = old_bot[:, 1] + k_bot * (ez[:, 1] - old_bot[:, 0])
        ez[:, -1] = old_top[:, 0] + k_top * (ez[:, -2] - old_top[:, 1])

        ez[si, sj] += source[n]
        if pec is not None:
            ez[pec[0], pec[1]] = 0.0
        record[n] = ez[ri, rj]

    return record
