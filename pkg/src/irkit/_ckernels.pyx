# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twins of the kernels in ``_pykernels``.

Every function mirrors the NumPy implementation operation for operation:
float64 arithmetic runs in the same order (sequential accumulation over rows,
classes and columns, strict-less-than minima), and the extension is compiled
with FP contraction disabled, so results are bit-identical across backends.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def slic_assign(double[:, ::1] feats, double[:, ::1] centers):
    cdef Py_ssize_t p = feats.shape[0]
    cdef Py_ssize_t k = centers.shape[0]
    labels_arr = np.zeros(p, dtype=np.int32)
    cdef int[::1] labels = labels_arr
    cdef Py_ssize_t i, j
    cdef double d, t, best
    for i in range(p):
        best = np.inf
        for j in range(k):
            t = feats[i, 0] - centers[j, 0]
            d = t * t
            t = feats[i, 1] - centers[j, 1]
            d = d + t * t
            t = feats[i, 2] - centers[j, 2]
            d = d + t * t
            t = feats[i, 3] - centers[j, 3]
            d = d + t * t
            t = feats[i, 4] - centers[j, 4]
            d = d + t * t
            if d < best:
                best = d
                labels[i] = <int> j
    return labels_arr


def slic_update(double[:, ::1] feats, int[::1] labels, Py_ssize_t k):
    cdef Py_ssize_t p = feats.shape[0]
    cdef Py_ssize_t m = feats.shape[1]
    sums_arr = np.zeros((k, m), dtype=np.float64)
    counts_arr = np.zeros(k, dtype=np.float64)
    cdef double[:, ::1] sums = sums_arr
    cdef double[::1] counts = counts_arr
    cdef Py_ssize_t i, j, lab
    for i in range(p):
        lab = labels[i]
        counts[lab] = counts[lab] + 1.0
        for j in range(m):
            sums[lab, j] = sums[lab, j] + feats[i, j]
    return sums_arr, counts_arr


def split_scan_gini(double[::1] values, int[::1] labels, int n_classes,
                    int min_leaf):
    cdef Py_ssize_t n = values.shape[0]
    if n < 2 * min_leaf:
        return -1, np.inf
    total_arr = np.zeros(n_classes, dtype=np.float64)
    left_arr = np.zeros(n_classes, dtype=np.float64)
    cdef double[::1] total = total_arr
    cdef double[::1] left = left_arr
    cdef Py_ssize_t i, pos
    cdef int c
    for i in range(n):
        total[labels[i]] = total[labels[i]] + 1.0

    # Running integer-valued class counts; their squares stay exact in
    # float64, so the incremental update equals the recomputed sum.
    cdef double sumsq_l = 0.0
    cdef double sumsq_r = 0.0
    for c in range(n_classes):
        sumsq_r = sumsq_r + total[c] * total[c]

    cdef double best_cost = np.inf
    cdef Py_ssize_t best_pos = -1
    cdef double n_left, n_right, cnt, cost
    for pos in range(n - 1):
        c = labels[pos]
        cnt = left[c]
        sumsq_l = sumsq_l + 2.0 * cnt + 1.0
        cnt = total[c] - left[c]
        sumsq_r = sumsq_r - 2.0 * cnt + 1.0
        left[c] = left[c] + 1.0

        n_left = <double> (pos + 1)
        n_right = <double> (n - pos - 1)
        if values[pos] >= values[pos + 1]:
            continue
        if n_left < min_leaf or n_right < min_leaf:
            continue
        cost = (n_left - sumsq_l / n_left) + (n_right - sumsq_r / n_right)
        if cost < best_cost:
            best_cost = cost
            best_pos = pos
    if best_pos < 0:
        return -1, np.inf
    return int(best_pos), float(best_cost)


def split_scan_mse(double[::1] values, y, int min_leaf):
    cdef Py_ssize_t n = values.shape[0]
    if n < 2 * min_leaf:
        return -1, np.inf
    y2_arr = np.ascontiguousarray(y if getattr(y, "ndim", 1) == 2 else
                                  np.asarray(y)[:, None], dtype=np.float64)
    cdef double[:, ::1] y2 = y2_arr
    cdef Py_ssize_t m = y2.shape[1]

    s_tot_arr = np.zeros(m, dtype=np.float64)
    q_tot_arr = np.zeros(m, dtype=np.float64)
    s_l_arr = np.zeros(m, dtype=np.float64)
    q_l_arr = np.zeros(m, dtype=np.float64)
    cdef double[::1] s_tot = s_tot_arr
    cdef double[::1] q_tot = q_tot_arr
    cdef double[::1] s_l = s_l_arr
    cdef double[::1] q_l = q_l_arr

    cdef Py_ssize_t i, c, pos
    cdef double v
    for c in range(m):
        for i in range(n):
            v = y2[i, c]
            s_tot[c] = s_tot[c] + v
            q_tot[c] = q_tot[c] + v * v

    cdef double best_cost = np.inf
    cdef Py_ssize_t best_pos = -1
    cdef double n_left, n_right, cost, term_l, term_r, sl, ql, sr
    for pos in range(n - 1):
        for c in range(m):
            v = y2[pos, c]
            s_l[c] = s_l[c] + v
            q_l[c] = q_l[c] + v * v
        n_left = <double> (pos + 1)
        n_right = <double> (n - pos - 1)
        if values[pos] >= values[pos + 1]:
            continue
        if n_left < min_leaf or n_right < min_leaf:
            continue
        cost = 0.0
        for c in range(m):
            sl = s_l[c]
            ql = q_l[c]
            term_l = ql - (sl * sl) / n_left
            sr = s_tot[c] - sl
            term_r = (q_tot[c] - ql) - (sr * sr) / n_right
            if term_l < 0.0:
                term_l = 0.0
            if term_r < 0.0:
                term_r = 0.0
            cost = cost + (term_l + term_r)  # match the fallback's grouping
        if cost < best_cost:
            best_cost = cost
            best_pos = pos
    if best_pos < 0:
        return -1, np.inf
    return int(best_pos), float(best_cost)
