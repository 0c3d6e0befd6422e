# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled 2-D TMz Yee kernel; semantics mirror gprlab.sim._fdtd_numpy."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def run_trace(
    double[:, ::1] ca,
    double[:, ::1] cb_dx,
    double ch,
    double[::1] k_left,
    double[::1] k_right,
    double[::1] k_bot,
    double[::1] k_top,
    long[::1] pec_i,
    long[::1] pec_j,
    int si,
    int sj,
    int ri,
    int rj,
    double[::1] source,
):
    cdef int nx = ca.shape[0]
    cdef int ny = ca.shape[1]
    cdef int n_steps = source.shape[0]
    cdef int n_pec = pec_i.shape[0]
    cdef int n, i, j, p

    ez_arr = np.zeros((nx, ny), dtype=np.float64)
    hx_arr = np.zeros((nx, ny - 1), dtype=np.float64)
    hy_arr = np.zeros((nx - 1, ny), dtype=np.float64)
    record_arr = np.empty(n_steps, dtype=np.float64)
    old_l = np.empty((2, ny), dtype=np.float64)
    old_r = np.empty((2, ny), dtype=np.float64)
    old_b = np.empty((nx, 2), dtype=np.float64)
    old_t = np.empty((nx, 2), dtype=np.float64)

    cdef double[:, ::1] ez = ez_arr
    cdef double[:, ::1] hx = hx_arr
    cdef double[:, ::1] hy = hy_arr
    cdef double[::1] record = record_arr
    cdef double[:, ::1] ol = old_l
    cdef double[:, ::1] orr = old_r
    cdef double[:, ::1] ob = old_b
    cdef double[:, ::1] ot = old_t
    cdef double curl

    for n in range(n_steps):
        for i in range(nx):
            for j in range(ny - 1):
                hx[i, j] -= ch * (ez[i, j + 1] - ez[i, j])
        for i in range(nx - 1):
            for j in range(ny):
                hy[i, j] += ch * (ez[i + 1, j] - ez[i, j])

        for j in range(ny):
            ol[0, j] = ez[0, j]
            ol[1, j] = ez[1, j]
            orr[0, j] = ez[nx - 2, j]
            orr[1, j] = ez[nx - 1, j]
        for i in range(nx):
            ob[i, 0] = ez[i, 0]
            ob[i, 1] = ez[i, 1]
            ot[i, 0] = ez[i, ny - 2]
            ot[i, 1] = ez[i, ny - 1]

        for i in range(1, nx - 1):
            for j in range(1, ny - 1):
                curl = (hy[i, j] - hy[i - 1, j]) - (hx[i, j] - hx[i, j - 1])
                ez[i, j] = ca[i, j] * ez[i, j] + cb_dx[i, j] * curl

        for j in range(ny):
            ez[0, j] = ol[1, j] + k_left[j] * (ez[1, j] - ol[0, j])
            ez[nx - 1, j] = orr[0, j] + k_right[j] * (ez[nx - 2, j] - orr[1, j])
        for i in range(nx):
            ez[i, 0] = ob[i, 1] + k_bot[i] * (ez[i, 1] - ob[i, 0])
            ez[i, ny - 1] = ot[i, 0] + k_top[i] * (ez[i, ny - 2] - ot[i, 1])

        ez[si, sj] += source[n]
        for p in range(n_pec):
            ez[pec_i[p], pec_j[p]] = 0.0
        record[n] = ez[ri, rj]

    return record_arr
