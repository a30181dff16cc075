# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same contracts as ``ecomode._kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()

IMPLEMENTATION = "cython"


cdef void _solve_range(const double[:, ::1] P, const double[:, ::1] Q, const cnp.npy_bool[:, ::1] offered,
                       const double[::1] qprime, const cnp.intp_t[::1] clicked, double alpha, double beta,
                       cnp.intp_t[::1] out, Py_ssize_t start, Py_ssize_t stop) noexcept nogil:
    cdef Py_ssize_t i, j, best, n = P.shape[1]
    cdef double obj, best_obj, best_p
    cdef cnp.intp_t c
    for i in range(start, stop):
        best = -1
        best_obj = INFINITY
        best_p = INFINITY
        c = clicked[i]
        for j in range(n):
            if not offered[i, j] or Q[i, j] > qprime[i]:
                continue
            obj = alpha * P[i, j] + beta * Q[i, j]
            if best < 0 or obj < best_obj:
                best, best_obj, best_p = j, obj, P[i, j]
            elif obj == best_obj:
                if P[i, j] < best_p:
                    best, best_p = j, P[i, j]
                elif P[i, j] == best_p and j == c:
                    best = j
        out[i] = best


def solve_rows(P, Q, offered, qprime, clicked, double alpha, double beta):
    cdef const double[:, ::1] P_v = np.ascontiguousarray(P, dtype=np.float64)
    cdef const double[:, ::1] Q_v = np.ascontiguousarray(Q, dtype=np.float64)
    cdef const cnp.npy_bool[:, ::1] o_v = np.ascontiguousarray(offered, dtype=np.bool_).view(np.uint8)
    cdef const double[::1] q_v = np.ascontiguousarray(qprime, dtype=np.float64)
    cdef const cnp.intp_t[::1] c_v = np.ascontiguousarray(clicked, dtype=np.intp)
    out = np.empty(P_v.shape[0], dtype=np.intp)
    cdef cnp.intp_t[::1] out_v = out
    with nogil:
        _solve_range(P_v, Q_v, o_v, q_v, c_v, alpha, beta, out_v, 0, P_v.shape[0])
    return out


def enumerate_min(values):
    cdef Py_ssize_t m = len(values)
    if m == 0:
        return 0.0, np.zeros(0, dtype=np.intp)
    sizes_a = np.array([len(v) for v in values], dtype=np.intp)
    offsets_a = np.zeros(m, dtype=np.intp)
    offsets_a[1:] = np.cumsum(sizes_a)[:-1]
    flat_a = np.ascontiguousarray(np.concatenate([np.asarray(v, dtype=np.float64) for v in values]))
    best_a = np.zeros(m, dtype=np.intp)
    cdef const cnp.intp_t[::1] sizes = sizes_a
    cdef const cnp.intp_t[::1] offsets = offsets_a
    cdef const double[::1] flat = flat_a
    cdef cnp.intp_t[::1] best = best_a
    cdef cnp.intp_t[::1] idx = np.zeros(m, dtype=np.intp)
    # prefix[k] = sum of rows 0..k-1 at the current picks, added left to right
    cdef double[::1] prefix = np.zeros(m + 1, dtype=np.float64)
    cdef double best_total = INFINITY, total
    cdef Py_ssize_t k, level
    cdef bint found = False
    with nogil:
        for k in range(m):
            prefix[k + 1] = prefix[k] + flat[offsets[k]] if k > 0 else flat[offsets[0]]
        while True:
            total = prefix[m]
            # strict comparison keeps the lexicographically first minimum
            if not found or total < best_total:
                best_total = total
                found = True
                for k in range(m):
                    best[k] = idx[k]
            level = m - 1
            while level >= 0:
                idx[level] += 1
                if idx[level] < sizes[level]:
                    break
                idx[level] = 0
                level -= 1
            if level < 0:
                break
            for k in range(level, m):
                if k == 0:
                    prefix[1] = flat[offsets[0] + idx[0]]
                else:
                    prefix[k + 1] = prefix[k] + flat[offsets[k] + idx[k]]
    return float(best_total), best_a
