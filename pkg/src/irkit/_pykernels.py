"""NumPy implementations of the hot kernels.

These are the reference semantics for the compiled twins in ``_ckernels.pyx``.
Both backends perform float64 arithmetic in the same order (sequential
accumulation over the same axes), so they produce bit-identical results; the
backend tests assert exact equality.

Kernel contracts
----------------
slic_assign(feats, centers)        -> int32 labels, nearest center per row,
                                      ties to the lowest center index.
slic_update(feats, labels, k)      -> (per-cluster feature sums, counts).
split_scan_gini(values, labels,
                n_classes, min_leaf) -> (pos, cost): best "split after index
                                      pos" minimizing n_l*G_l + n_r*G_r.
split_scan_mse(values, y, min_leaf) -> (pos, cost): same, minimizing
                                      n_l*MSE_l + n_r*MSE_r summed over the
                                      columns of y.

Split-scan inputs must be sorted by ``values`` ascending; a position is a
candidate only where consecutive values differ and both children would hold
at least ``min_leaf`` rows. Ties in cost resolve to the lowest position
(hence the lowest threshold). ``(-1, inf)`` means no valid split.
For conditioning, callers should center y on the node mean before calling
split_scan_mse; the cost is shift-invariant.
"""

from __future__ import annotations

import numpy as np


def slic_assign(feats: np.ndarray, centers: np.ndarray) -> np.ndarray:
    p = feats.shape[0]
    best = np.full(p, np.inf, dtype=np.float64)
    labels = np.zeros(p, dtype=np.int32)
    for k in range(centers.shape[0]):
        d = (feats[:, 0] - centers[k, 0]) ** 2
        d += (feats[:, 1] - centers[k, 1]) ** 2
        d += (feats[:, 2] - centers[k, 2]) ** 2
        d += (feats[:, 3] - centers[k, 3]) ** 2
        d += (feats[:, 4] - centers[k, 4]) ** 2
        take = d < best
        best[take] = d[take]
        labels[take] = k
    return labels


def slic_update(feats: np.ndarray, labels: np.ndarray, k: int):
    counts = np.bincount(labels, minlength=k).astype(np.float64)
    sums = np.empty((k, feats.shape[1]), dtype=np.float64)
    for j in range(feats.shape[1]):
        sums[:, j] = np.bincount(labels, weights=feats[:, j], minlength=k)
    return sums, counts


def split_scan_gini(values: np.ndarray, labels: np.ndarray, n_classes: int,
                    min_leaf: int):
    n = values.shape[0]
    if n < 2 * min_leaf:
        return -1, np.inf
    onehot = np.zeros((n, n_classes), dtype=np.float64)
    onehot[np.arange(n), labels] = 1.0
    left = np.cumsum(onehot, axis=0)[:-1]          # counts after each position
    total = left[-1] + onehot[-1]
    right = total - left

    n_left = np.arange(1, n, dtype=np.float64)
    n_right = n - n_left
    sumsq_l = np.zeros(n - 1, dtype=np.float64)
    sumsq_r = np.zeros(n - 1, dtype=np.float64)
    for c in range(n_classes):                      # fixed class order
        sumsq_l += left[:, c] * left[:, c]
        sumsq_r += right[:, c] * right[:, c]
    cost = (n_left - sumsq_l / n_left) + (n_right - sumsq_r / n_right)

    valid = values[:-1] < values[1:]
    valid &= (n_left >= min_leaf) & (n_right >= min_leaf)
    if not valid.any():
        return -1, np.inf
    cost[~valid] = np.inf
    pos = int(np.argmin(cost))                      # first minimum
    return pos, float(cost[pos])


def split_scan_mse(values: np.ndarray, y: np.ndarray, min_leaf: int):
    n = values.shape[0]
    if n < 2 * min_leaf:
        return -1, np.inf
    y2 = y if y.ndim == 2 else y[:, None]
    s = np.cumsum(y2, axis=0)
    q = np.cumsum(y2 * y2, axis=0)
    s_l, q_l = s[:-1], q[:-1]
    s_tot, q_tot = s[-1], q[-1]

    n_left = np.arange(1, n, dtype=np.float64)
    n_right = n - n_left
    cost = np.zeros(n - 1, dtype=np.float64)
    for c in range(y2.shape[1]):                    # fixed column order
        term_l = q_l[:, c] - (s_l[:, c] * s_l[:, c]) / n_left
        term_r = (q_tot[c] - q_l[:, c]) - ((s_tot[c] - s_l[:, c]) ** 2) / n_right
        cost += np.maximum(term_l, 0.0) + np.maximum(term_r, 0.0)

    valid = values[:-1] < values[1:]
    valid &= (n_left >= min_leaf) & (n_right >= min_leaf)
    if not valid.any():
        return -1, np.inf
    cost[~valid] = np.inf
    pos = int(np.argmin(cost))
    return pos, float(cost[pos])
