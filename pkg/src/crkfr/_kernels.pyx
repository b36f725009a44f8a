# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twins of the hot per-element kernels.

Same contracts as crkfr._kernels_py; loops are fused so the scaling and
correction terms need no temporaries.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def batched_diff(const double[:, ::1] dmat, const double[:, :, ::1] values, const double[::1] scale):
    """scale[b] * (dmat @ values[b]); values (B, Q, K) -> (B, P, K)."""
    cdef Py_ssize_t B = values.shape[0]
    cdef Py_ssize_t Q = values.shape[1]
    cdef Py_ssize_t K = values.shape[2]
    cdef Py_ssize_t P = dmat.shape[0]
    out_arr = np.empty((B, P, K), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t b, p, q, k
    cdef double acc, d, s
    for b in range(B):
        s = scale[b]
        for p in range(P):
            for k in range(K):
                out[b, p, k] = 0.0
            for q in range(Q):
                d = dmat[p, q]
                if d != 0.0:
                    for k in range(K):
                        out[b, p, k] += d * values[b, q, k]
            for k in range(K):
                out[b, p, k] *= s
    return out_arr


def fr_residual(const double[:, :, ::1] dflux, const double[:, ::1] jump_left,
                const double[:, ::1] jump_right, const double[::1] gl_prime,
                const double[::1] gr_prime, const double[::1] inv_dx):
    """dflux plus the correction terms; shapes as in the python backend."""
    cdef Py_ssize_t B = dflux.shape[0]
    cdef Py_ssize_t P = dflux.shape[1]
    cdef Py_ssize_t K = dflux.shape[2]
    out_arr = np.empty((B, P, K), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t b, p, k
    cdef double s, gl, gr
    for b in range(B):
        s = inv_dx[b]
        for p in range(P):
            gl = gl_prime[p] * s
            gr = gr_prime[p] * s
            for k in range(K):
                out[b, p, k] = dflux[b, p, k] + jump_right[b, k] * gr + jump_left[b, k] * gl
    return out_arr
