#!/usr/bin/env python3
"""Benchmark the compiled kernels against the NumPy fallback.

Runs the two hot paths (superpixel k-means iterations and tree split scans)
through both backends, checks that outputs are bit-identical and reports the
speedup. Run after `pip install -e .`:

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from irkit import _pykernels

try:
    from irkit import _ckernels
except ImportError:
    _ckernels = None


def timeit(fn, *args, repeats=5):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_slic(backend, feats, centers, iters=10):
    def run():
        c = centers.copy()
        labels = None
        for _ in range(iters):
            labels = backend.slic_assign(feats, c)
            sums, counts = backend.slic_update(feats, labels, len(c))
            occupied = counts > 0
            c = c.copy()
            c[occupied] = sums[occupied] / counts[occupied, None]
        return labels

    return timeit(run)


def bench_split(backend, values, labels, y):
    def run():
        g = backend.split_scan_gini(values, labels, 3, 1)
        m = backend.split_scan_mse(values, y, 1)
        return g, m

    return timeit(run, repeats=20)


def main():
    rng = np.random.default_rng(42)
    print(f"{'kernel':<28}{'python':>12}{'cython':>12}{'speedup':>10}  identical")

    # SLIC on a 256x256 image with 40 clusters, 10 iterations
    h = w = 256
    img = rng.integers(0, 256, (h, w, 3)).astype(np.float64)
    interval = np.sqrt(h * w / 40)
    feats = np.empty((h * w, 5))
    feats[:, :3] = img.reshape(-1, 3)
    feats[:, 3] = np.tile(np.arange(w, dtype=float), h) * (10.0 / interval)
    feats[:, 4] = np.repeat(np.arange(h, dtype=float), w) * (10.0 / interval)
    seeds = rng.choice(h * w, 40, replace=False)
    centers = feats[np.sort(seeds)].copy()

    t_py, out_py = bench_slic(_pykernels, feats, centers)
    if _ckernels is not None:
        t_cy, out_cy = bench_slic(_ckernels, feats, centers)
        same = np.array_equal(out_py, out_cy)
        print(f"{'slic 256x256 k=40 x10':<28}{t_py:>11.4f}s{t_cy:>11.4f}s"
              f"{t_py / t_cy:>9.1f}x  {same}")
    else:
        print(f"{'slic 256x256 k=40 x10':<28}{t_py:>11.4f}s{'-':>12}{'-':>10}")

    # split scans on 50k sorted rows
    n = 50_000
    values = np.sort(rng.normal(size=n))
    labels = rng.integers(0, 3, n).astype(np.int32)
    y = rng.normal(size=(n, 2))

    t_py, out_py = bench_split(_pykernels, values, labels, y)
    if _ckernels is not None:
        t_cy, out_cy = bench_split(_ckernels, values, labels, y)
        same = out_py == out_cy
        print(f"{'split scans n=50k':<28}{t_py:>11.4f}s{t_cy:>11.4f}s"
              f"{t_py / t_cy:>9.1f}x  {same}")
    else:
        print(f"{'split scans n=50k':<28}{t_py:>11.4f}s{'-':>12}{'-':>10}")

    if _ckernels is None:
        print("\ncompiled extension not available; reinstall with `pip install -e .`")


if __name__ == "__main__":
    main()
