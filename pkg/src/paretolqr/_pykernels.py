"""Pure-Python implementations of the hot loops.

Each function here has a compiled twin in ``_ckernels.pyx`` with the same
signature and results. ``kernels`` picks one at import time.
"""
import math

TIE_TOL = 1e-12

import numpy as np


def dominance_mask(losses, tol=0.0):
    """Boolean mask of rows not dominated by any other row.

    Row ``j`` dominates row ``i`` when ``l_j <= l_i + tol`` everywhere and
    ``l_j < l_i - tol`` somewhere.
    """
    losses = np.ascontiguousarray(losses, dtype=np.float64)
    n = losses.shape[0]
    keep = np.ones(n, dtype=bool)
    for i in range(n):
        li = losses[i]
        weak = np.all(losses <= li + tol, axis=1)
        strict = np.any(losses < li - tol, axis=1)
        if np.any(weak & strict):
            keep[i] = False
    return keep


def nearest_index(points, w):
    """Index and l1 distance of the nearest row.

    Distances within TIE_TOL of the best count as ties and go to the lowest index.
    """
    points = np.asarray(points, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    best = -1
    best_d = math.inf
    for i in range(points.shape[0]):
        d = 0.0
        row = points[i]
        for c in range(points.shape[1]):
            d += abs(row[c] - w[c])
        if d < best_d - TIE_TOL:
            best_d = d
            best = i
    return best, best_d


def composition_grid(m, k):
    """All nonnegative integer vectors of length m summing to k, lexicographically ascending."""
    if m < 1:
        raise ValueError("m must be >= 1")
    count = math.comb(k + m - 1, m - 1)
    out = np.zeros((count, m), dtype=np.int64)
    j = [0] * m
    j[m - 1] = k
    for row in range(count):
        out[row] = j
        # advance to the next composition in lex order
        tail = j[m - 1]
        i = m - 2
        while i >= 0 and tail == 0:
            tail += j[i]
            i -= 1
        if i < 0:
            break
        # i is the rightmost index with positive mass strictly to its right
        j[i] += 1
        for l in range(i + 1, m - 1):
            j[l] = 0
        j[m - 1] = tail - 1
    return out


def scalar_losses(a, b, gains, q, r):
    """Loss matrix (len(gains), len(q)) for the scalar system; inf where unstable."""
    gains = np.asarray(gains, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    out = np.empty((gains.shape[0], q.shape[0]))
    for i in range(gains.shape[0]):
        k = gains[i]
        cl = a + b * k
        denom = 1.0 - cl * cl
        for j in range(q.shape[0]):
            out[i, j] = (q[j] + r[j] * k * k) / denom if denom > 0.0 else math.inf
    return out


def scalar_dare(a, b, q, r, tol=1e-12, max_iter=10_000):
    """Riccati fixed point for n = d = 1. Returns (p, residual, iterations)."""
    p = q
    for it in range(max_iter):
        nxt = a * a * p * r / (r + b * b * p) + q
        res = abs(p - nxt)
        if not math.isfinite(nxt):
            return p, math.inf, it
        if res <= tol * max(1.0, abs(p)):
            return p, res, it
        p = nxt
    return p, abs(p - (a * a * p * r / (r + b * b * p) + q)), max_iter
