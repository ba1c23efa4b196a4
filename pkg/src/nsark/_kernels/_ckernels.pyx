# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Signatures match ``nsark._kernels._pure``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, fma

cnp.import_array()

from ._pure import PIVOT_TOL, SingularSystemError

cdef double _PIVOT = PIVOT_TOL


def solve_dense(A, b):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] M = np.array(A, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] x = np.array(b, dtype=np.float64)
    cdef Py_ssize_t n = M.shape[0], i, j, k, p
    cdef double best, t, f
    for k in range(n):
        p = k
        best = fabs(M[k, k])
        for i in range(k + 1, n):
            if fabs(M[i, k]) > best:
                best = fabs(M[i, k])
                p = i
        if best < _PIVOT:
            raise SingularSystemError(f"pivot {M[p, k]!r} in column {k}")
        if p != k:
            for j in range(k, n):
                t = M[k, j]; M[k, j] = M[p, j]; M[p, j] = t
            t = x[k]; x[k] = x[p]; x[p] = t
        for i in range(k + 1, n):
            f = M[i, k] / M[k, k]
            if f != 0.0:
                for j in range(k, n):
                    M[i, j] -= f * M[k, j]
                x[i] -= f * x[k]
    for k in range(n - 1, -1, -1):
        t = x[k]
        for j in range(k + 1, n):
            t -= M[k, j] * x[j]
        x[k] = t / M[k, k]
    return x


def solve_patankar(M, b):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] W = np.array(M, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] x = np.array(b, dtype=np.float64)
    cdef Py_ssize_t n = W.shape[0], i, j, k
    cdef cnp.ndarray[cnp.float64_t, ndim=1] colsum = np.ones(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] piv = np.empty(n, dtype=np.float64)
    cdef double d, f, t
    for k in range(n):
        d = colsum[k]
        for i in range(k + 1, n):
            d -= W[i, k]
        if d < _PIVOT:
            raise SingularSystemError(f"pivot {d!r} in column {k}")
        piv[k] = d
        for j in range(k + 1, n):
            colsum[j] -= W[k, j] * (colsum[k] / d)
        for i in range(k + 1, n):
            f = W[i, k] / d
            if f != 0.0:
                for j in range(k + 1, n):
                    W[i, j] -= f * W[k, j]
                x[i] -= f * x[k]
    for k in range(n - 1, -1, -1):
        t = x[k]
        for j in range(k + 1, n):
            t -= W[k, j] * x[j]
        x[k] = t / piv[k]
    return x


def patankar_matrix(P, weights, double h):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] Pa = np.asarray(P, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] w = np.asarray(weights, dtype=np.float64)
    cdef Py_ssize_t n = Pa.shape[0], m, v
    cdef cnp.ndarray[cnp.float64_t, ndim=2] M = np.empty((n, n), dtype=np.float64)
    cdef double col
    for m in range(n):
        col = 0.0
        for v in range(n):
            if v != m:
                col += Pa[v, m]
                M[m, v] = -h * Pa[m, v] / w[v]
        M[m, m] = 1.0 + h * col / w[m]
    return M


def label_sum(parents, colors, A, b):
    cdef cnp.ndarray[cnp.float64_t, ndim=3] Aa = np.asarray(A, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] ba = np.asarray(b, dtype=np.float64)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] par = np.asarray(parents, dtype=np.intp)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] col = np.asarray(colors, dtype=np.intp)
    cdef Py_ssize_t s = ba.shape[1], n = par.shape[0], k, pos
    cdef cnp.ndarray[cnp.intp_t, ndim=1] lab = np.zeros(n, dtype=np.intp)
    cdef double total = 0.0, comp = 0.0, tail = 0.0, hi, lo, a, p, e, t
    # products in double-double, Neumaier summation of the leading parts:
    # the expanded terms cancel heavily for bushy trees
    while True:
        hi = ba[col[0], lab[0]]
        lo = 0.0
        for k in range(1, n):
            if hi == 0.0:
                break
            a = Aa[col[k], lab[par[k]], lab[k]]
            p = hi * a
            e = fma(hi, a, -p) + lo * a
            hi = p + e
            lo = e - (hi - p)
        t = total + hi
        if fabs(total) >= fabs(hi):
            comp += (total - t) + hi
        else:
            comp += (hi - t) + total
        total = t
        tail += lo
        # odometer increment over labels
        pos = n - 1
        while pos >= 0:
            lab[pos] += 1
            if lab[pos] < s:
                break
            lab[pos] = 0
            pos -= 1
        if pos < 0:
            break
    return total + (comp + tail)
