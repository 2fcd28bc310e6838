# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops in ``_pykernels``."""
import math

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, INFINITY, isfinite

cnp.import_array()

cdef double TIE_TOL = 1e-12


def dominance_mask(losses, double tol=0.0):
    cdef double[:, ::1] L = np.ascontiguousarray(losses, dtype=np.float64)
    cdef Py_ssize_t n = L.shape[0], m = L.shape[1]
    cdef Py_ssize_t i, j, c
    cdef bint weak, strict
    keep = np.ones(n, dtype=np.uint8)
    cdef unsigned char[::1] k = keep
    for i in range(n):
        for j in range(n):
            if j == i:
                continue
            weak = True
            strict = False
            for c in range(m):
                if L[j, c] > L[i, c] + tol:
                    weak = False
                    break
                if L[j, c] < L[i, c] - tol:
                    strict = True
            if weak and strict:
                k[i] = 0
                break
    return keep.astype(bool)


def nearest_index(points, w):
    cdef double[:, ::1] P = np.ascontiguousarray(points, dtype=np.float64)
    cdef double[::1] x = np.ascontiguousarray(w, dtype=np.float64)
    cdef Py_ssize_t i, c, best = -1
    cdef double d, best_d = INFINITY
    for i in range(P.shape[0]):
        d = 0.0
        for c in range(P.shape[1]):
            d += fabs(P[i, c] - x[c])
        if d < best_d - TIE_TOL:
            best_d = d
            best = i
    return best, best_d


def composition_grid(Py_ssize_t m, Py_ssize_t k):
    if m < 1:
        raise ValueError("m must be >= 1")
    cdef Py_ssize_t count = math.comb(k + m - 1, m - 1)
    out = np.zeros((count, m), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] o = out
    cdef cnp.int64_t[::1] j = np.zeros(m, dtype=np.int64)
    cdef Py_ssize_t row, i, l, c
    cdef cnp.int64_t tail
    j[m - 1] = k
    for row in range(count):
        for c in range(m):
            o[row, c] = j[c]
        tail = j[m - 1]
        i = m - 2
        while i >= 0 and tail == 0:
            tail += j[i]
            i -= 1
        if i < 0:
            break
        j[i] += 1
        for l in range(i + 1, m - 1):
            j[l] = 0
        j[m - 1] = tail - 1
    return out


def scalar_losses(double a, double b, gains, q, r):
    cdef double[::1] g = np.ascontiguousarray(gains, dtype=np.float64)
    cdef double[::1] qq = np.ascontiguousarray(q, dtype=np.float64)
    cdef double[::1] rr = np.ascontiguousarray(r, dtype=np.float64)
    out = np.empty((g.shape[0], qq.shape[0]))
    cdef double[:, ::1] o = out
    cdef Py_ssize_t i, j
    cdef double k, cl, denom
    for i in range(g.shape[0]):
        k = g[i]
        cl = a + b * k
        denom = 1.0 - cl * cl
        for j in range(qq.shape[0]):
            if denom > 0.0:
                o[i, j] = (qq[j] + rr[j] * k * k) / denom
            else:
                o[i, j] = INFINITY
    return out


def scalar_dare(double a, double b, double q, double r, double tol=1e-12, Py_ssize_t max_iter=10_000):
    cdef double p = q, nxt, res
    cdef Py_ssize_t it
    for it in range(max_iter):
        nxt = a * a * p * r / (r + b * b * p) + q
        res = fabs(p - nxt)
        if not isfinite(nxt):
            return p, INFINITY, it
        if res <= tol * max(1.0, fabs(p)):
            return p, res, it
        p = nxt
    return p, fabs(p - (a * a * p * r / (r + b * b * p) + q)), max_iter
