# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_pykernels``."""

import numpy as np
from libc.math cimport sqrt, isnan, INFINITY


def halfspace_mask(const double[:, ::1] points, const double[:, ::1] A, const double[::1] b,
                   const double[::1] lo, const double[::1] hi, double slack):
    cdef Py_ssize_t n = points.shape[0], m = points.shape[1], k = A.shape[0]
    cdef Py_ssize_t i, j, r
    cdef double s
    out = np.ones(n, dtype=np.bool_)
    cdef unsigned char[::1] ok = out.view(np.uint8)
    for i in range(n):
        for j in range(m):
            if points[i, j] < lo[j] - slack or points[i, j] > hi[j] + slack:
                ok[i] = 0
                break
        if not ok[i]:
            continue
        for r in range(k):
            s = 0.0
            for j in range(m):
                s += A[r, j] * points[i, j]
            if s > b[r] + slack:
                ok[i] = 0
                break
    return out


cdef inline bint _lex_less(const double[:, ::1] p, Py_ssize_t a, Py_ssize_t b):
    cdef Py_ssize_t j
    for j in range(p.shape[1]):
        if p[a, j] < p[b, j]:
            return True
        if p[a, j] > p[b, j]:
            return False
    return False


def argmax_lex(const double[::1] values, const double[:, ::1] points, double tie_tol):
    cdef Py_ssize_t n = values.shape[0], i, pick = -1
    cdef double best = -INFINITY, v
    for i in range(n):
        v = values[i]
        if not isnan(v) and v > best:
            best = v
    if best == -INFINITY:
        return -1
    for i in range(n):
        v = values[i]
        if isnan(v) or v < best - tie_tol:
            continue
        if pick < 0 or _lex_less(points, i, pick):
            pick = i
    return pick


cdef double _directed(const double[:, ::1] a, const double[:, ::1] b):
    cdef Py_ssize_t i, j, k
    cdef double worst = 0.0, nearest, d, t
    for i in range(a.shape[0]):
        nearest = INFINITY
        for j in range(b.shape[0]):
            d = 0.0
            for k in range(a.shape[1]):
                t = a[i, k] - b[j, k]
                d += t * t
                if d >= nearest:
                    break
            if d < nearest:
                nearest = d
                if nearest <= worst:
                    break
        if nearest > worst:
            worst = nearest
    return worst


def hausdorff(const double[:, ::1] a, const double[:, ::1] b):
    cdef double x = _directed(a, b), y = _directed(b, a)
    return sqrt(x if x > y else y)


def count_dominating(const double[:, ::1] values, const double[::1] thresholds, mask):
    cdef unsigned char[::1] ok = np.array(mask, dtype=np.bool_).view(np.uint8)
    cdef Py_ssize_t n = values.shape[0], N = values.shape[1], i, j
    cdef Py_ssize_t total = 0
    cdef double t
    # row by row over contiguous memory, branch-free so the compiler can vectorize
    for i in range(n):
        t = thresholds[i]
        for j in range(N):
            ok[j] &= values[i, j] >= t
    for j in range(N):
        total += ok[j]
    return total
