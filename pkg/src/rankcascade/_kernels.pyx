# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled implementations of the hot kernels.

Mirrors rankcascade._kernels_py exactly (same arithmetic order, same tie
rules); the backend selector prefers this module when it imports.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "compiled"


def dp_tableau(a_in, b_in, int spans, double tol):
    cdef double[::1] a = np.ascontiguousarray(a_in, dtype=np.float64)
    cdef double[::1] b = np.ascontiguousarray(b_in, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0]
    H_arr = np.zeros((spans + 1, n + 1), dtype=np.float64)
    take_arr = np.zeros((spans + 1, n + 1), dtype=np.uint8)
    cdef double[:, ::1] H = H_arr
    cdef unsigned char[:, ::1] take = take_arr
    cdef Py_ssize_t k, j
    cdef double cand, nxt
    for k in range(1, spans + 1):
        for j in range(n - 1, -1, -1):
            cand = a[j] + b[j] * H[k - 1, j + 1]
            nxt = H[k, j + 1]
            if cand >= nxt - tol:
                take[k, j] = 1
            H[k, j] = cand if cand > nxt else nxt
    return H_arr, take_arr


def dp_extract(take_in, int spans):
    cdef unsigned char[:, ::1] take = np.ascontiguousarray(take_in, dtype=np.uint8)
    cdef Py_ssize_t n = take.shape[1] - 1
    out_arr = np.empty(spans if spans < n else n, dtype=np.int64)
    cdef long long[::1] out = out_arr
    cdef Py_ssize_t k = spans, j = 0, c = 0
    while k > 0 and j < n:
        if take[k, j]:
            out[c] = j
            c += 1
            k -= 1
        j += 1
    return out_arr[:c].copy()


def assortopt_steps(lam_in, r_in, int spans, double tol):
    cdef double[::1] lam = np.ascontiguousarray(lam_in, dtype=np.float64)
    cdef double[::1] r = np.ascontiguousarray(r_in, dtype=np.float64)
    cdef Py_ssize_t n = lam.shape[0]
    values_arr = np.empty(spans, dtype=np.float64)
    added_arr = np.empty(spans, dtype=np.int64)
    cdef double[::1] values = values_arr
    cdef long long[::1] added = added_arr
    lr_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] lr = lr_arr
    cdef unsigned char[::1] used = np.zeros(n, dtype=np.uint8)
    # chosen: sorted indices of the current ranking; P/A/B per insertion slot
    cdef long long[::1] chosen = np.empty(spans, dtype=np.int64)
    cdef double[::1] P = np.empty(spans + 1, dtype=np.float64)
    cdef double[::1] A = np.empty(spans + 1, dtype=np.float64)
    cdef double[::1] vals = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t x, m, i, j, ptr, bestj, ins
    cdef double t, vmax, v, tailsum
    for j in range(n):
        lr[j] = lam[j] * r[j]
    m = 0
    for x in range(1, spans + 1):
        P[0] = 1.0
        A[0] = 0.0
        for i in range(m):
            t = P[i] * lr[chosen[i]]
            A[i + 1] = A[i] + t
            P[i + 1] = P[i] * (1.0 - lam[chosen[i]])
        tailsum = A[m]
        vmax = -np.inf
        ptr = 0
        for j in range(n):
            while ptr < m and chosen[ptr] < j:
                ptr += 1
            if used[j]:
                vals[j] = -np.inf
                continue
            v = A[ptr] + P[ptr] * lr[j] + (1.0 - lam[j]) * (tailsum - A[ptr])
            vals[j] = v
            if v > vmax:
                vmax = v
        bestj = 0
        for j in range(n):
            if vals[j] >= vmax - tol:
                bestj = j
                break
        values[x - 1] = vals[bestj]
        added[x - 1] = bestj
        used[bestj] = 1
        ins = 0
        while ins < m and chosen[ins] < bestj:
            ins += 1
        for i in range(m, ins, -1):
            chosen[i] = chosen[i - 1]
        chosen[ins] = bestj
        m += 1
    return values_arr, added_arr


def best_insertion(cur_lam_in, cur_lr_in, G_in, cand_lam_in, cand_lr_in, double tol):
    cdef double[::1] cur_lam = np.ascontiguousarray(cur_lam_in, dtype=np.float64)
    cdef double[::1] cur_lr = np.ascontiguousarray(cur_lr_in, dtype=np.float64)
    cdef double[::1] G = np.ascontiguousarray(G_in, dtype=np.float64)
    cdef double[::1] cand_lam = np.ascontiguousarray(cand_lam_in, dtype=np.float64)
    cdef double[::1] cand_lr = np.ascontiguousarray(cand_lr_in, dtype=np.float64)
    cdef Py_ssize_t m = cur_lam.shape[0]
    cdef Py_ssize_t q = cand_lam.shape[0]
    cdef double[::1] P = np.empty(m + 1, dtype=np.float64)
    cdef double[::1] A = np.empty(m + 1, dtype=np.float64)
    cdef double[::1] B = np.empty(m + 1, dtype=np.float64)
    cdef double[::1] PG = np.empty(m + 1, dtype=np.float64)
    cdef Py_ssize_t i, c, p, best_c, best_p
    cdef double t, v, vmax, clr, one_minus
    P[0] = 1.0
    A[0] = 0.0
    for i in range(m):
        t = P[i] * cur_lr[i]
        A[i + 1] = A[i] + t * G[i]
        P[i + 1] = P[i] * (1.0 - cur_lam[i])
    B[m] = 0.0
    for i in range(m - 1, -1, -1):
        B[i] = B[i + 1] + (P[i] * cur_lr[i]) * G[i + 1]
    for i in range(m + 1):
        PG[i] = P[i] * G[i]
    vmax = -np.inf
    for c in range(q):
        clr = cand_lr[c]
        one_minus = 1.0 - cand_lam[c]
        for p in range(m + 1):
            v = A[p] + clr * PG[p] + one_minus * B[p]
            if v > vmax:
                vmax = v
    best_c = 0
    best_p = 0
    for c in range(q):
        clr = cand_lr[c]
        one_minus = 1.0 - cand_lam[c]
        for p in range(m + 1):
            v = A[p] + clr * PG[p] + one_minus * B[p]
            if v >= vmax - tol:
                best_c = c
                best_p = p
                return (
                    A[best_p] + cand_lr[best_c] * PG[best_p]
                    + (1.0 - cand_lam[best_c]) * B[best_p],
                    best_c,
                    best_p,
                )
    return -np.inf, 0, 0
