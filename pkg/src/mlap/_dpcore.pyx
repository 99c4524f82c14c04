# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled oracle DP kernel.

Mirrors mlap._dppy.solve_dp exactly (same iteration order, same strict
tie-breaking), so the two kernels return identical floats. Keep any
semantic change in sync with the pure-Python fallback.
"""

from libc.math cimport INFINITY

import numpy as np

KERNEL_NAME = "cython"


def solve_dp(int n_grid, int n_req, class_weight, class_mask, arrived, wait):
    cdef double[::1] cw = np.ascontiguousarray(class_weight, dtype=np.float64)
    cdef long long[::1] cm = np.ascontiguousarray(class_mask, dtype=np.int64)
    cdef long long[::1] arr = np.ascontiguousarray(arrived, dtype=np.int64)
    cdef double[:, ::1] wt = np.ascontiguousarray(wait, dtype=np.float64)

    cdef long long n_states = 1LL << n_req
    cdef int n_classes = cw.shape[0]

    best_np = np.full((n_grid + 1, n_states), INFINITY, dtype=np.float64)
    prev_np = np.zeros((n_grid + 1, n_states), dtype=np.int64)
    choice_np = np.zeros((n_grid + 1, n_states), dtype=np.int32)
    cdef double[:, ::1] best = best_np
    cdef long long[:, ::1] prev = prev_np
    cdef int[:, ::1] choice = choice_np

    best[0, 0] = 0.0

    cdef int g, c, r
    cdef long long m, nm, bits, a
    cdef double base, add, w, cost
    cdef bint feasible

    for g in range(n_grid):
        a = arr[g]
        for m in range(n_states):
            base = best[g, m]
            if base == INFINITY:
                continue
            for c in range(n_classes):
                nm = m | (cm[c] & a)
                if c != 0 and nm == m:
                    continue
                add = cw[c]
                bits = nm & ~m
                feasible = True
                while bits:
                    r = _lowest_bit(bits)
                    w = wt[g, r]
                    if w == INFINITY:
                        feasible = False
                        break
                    add += w
                    bits &= bits - 1
                if not feasible:
                    continue
                cost = base + add
                if cost < best[g + 1, nm]:
                    best[g + 1, nm] = cost
                    prev[g + 1, nm] = m
                    choice[g + 1, nm] = c

    cdef long long full = n_states - 1
    cost = best[n_grid, full]
    if cost == INFINITY:
        return INFINITY, None
    choices = [0] * n_grid
    m = full
    for g in range(n_grid, 0, -1):
        choices[g - 1] = choice[g, m]
        m = prev[g, m]
    return cost, choices


cdef inline int _lowest_bit(long long bits):
    cdef int r = 0
    while not (bits & 1):
        bits >>= 1
        r += 1
    return r
