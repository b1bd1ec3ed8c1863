# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled element kernels for the fixed-point hot loop."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def apply_nodal_potential(double[:, ::1] u, double complex[:, ::1] z,
                          double[:, :, ::1] Q):
    """Same contract as the pure-Python kernel: load of u-weighted potential."""
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t ey, ex, a, b, c
    cdef double uc[4]
    cdef double complex zc[4]
    cdef double complex rc[4]
    cdef double ycab
    out_arr = np.zeros((n, n), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr

    for ey in range(n - 1):
        for ex in range(n - 1):
            uc[0] = u[ey, ex]
            uc[1] = u[ey, ex + 1]
            uc[2] = u[ey + 1, ex]
            uc[3] = u[ey + 1, ex + 1]
            zc[0] = z[ey, ex]
            zc[1] = z[ey, ex + 1]
            zc[2] = z[ey + 1, ex]
            zc[3] = z[ey + 1, ex + 1]
            for a in range(4):
                rc[a] = 0
            for a in range(4):
                for b in range(4):
                    ycab = 0
                    for c in range(4):
                        ycab += uc[c] * Q[c, a, b]
                    rc[a] = rc[a] + ycab * zc[b]
            out[ey, ex] += rc[0]
            out[ey, ex + 1] += rc[1]
            out[ey + 1, ex] += rc[2]
            out[ey + 1, ex + 1] += rc[3]
    return out_arr


def weighted_density(double complex[:, ::1] z, double[:, :, ::1] Q):
    """Same contract as the pure-Python kernel: (hat_c, |psi_h|^2) at all nodes."""
    cdef Py_ssize_t n = z.shape[0]
    cdef Py_ssize_t ey, ex, a, b, c
    cdef double complex zc[4]
    cdef double pab
    cdef double gc[4]
    out_arr = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr

    for ey in range(n - 1):
        for ex in range(n - 1):
            zc[0] = z[ey, ex]
            zc[1] = z[ey, ex + 1]
            zc[2] = z[ey + 1, ex]
            zc[3] = z[ey + 1, ex + 1]
            for c in range(4):
                gc[c] = 0
            for a in range(4):
                for b in range(4):
                    pab = (zc[a].conjugate() * zc[b]).real
                    for c in range(4):
                        gc[c] += Q[c, a, b] * pab
            out[ey, ex] += gc[0]
            out[ey, ex + 1] += gc[1]
            out[ey + 1, ex] += gc[2]
            out[ey + 1, ex + 1] += gc[3]
    return out_arr
