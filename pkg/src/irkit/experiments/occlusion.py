"""Occlusion-strategy sweep over segmentation granularities.

For every image and requested segment count the image is segmented once, the
top class and its probability recorded, and then k = 0..S segments are
occluded (random k-subsets, ``repeats`` draws per k; k=0 and k=S once since
their subsets are forced). The squared error between the original and the
occluded top-class probability is pooled over images and repeats into one
(strategy, n, k) row. Backend failures are recorded per row and the sweep
continues; an image whose baseline prediction fails is skipped entirely.
"""

from __future__ import annotations

import csv
import warnings
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from irkit.blackbox import BlackBox
from irkit.errors import BackendError, IrkitError, ParameterError, ProtocolError
from irkit.image import STRATEGIES, occlude, resize_image, slic_segment
from irkit.rng import RngStream

_PREDICT_CHUNK = 16


@dataclass
class SweepConfig:
    segment_counts: tuple = (5, 10, 15, 20, 30, 40)
    strategies: tuple = STRATEGIES
    repeats: int = 20
    seed: int = 0
    compactness: float = 10.0
    iterations: int = 10
    resize: int | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.repeats < 1:
            raise ParameterError("repeats must be at least 1")
        unknown = set(self.strategies) - set(STRATEGIES)
        if unknown:
            raise ParameterError(f"unknown strategies: {sorted(unknown)}")


@dataclass
class SweepRow:
    strategy: str
    n_segments: int
    k: int
    mse_mean: float
    mse_std: float
    n_obs: int


@dataclass
class SweepFailure:
    image: str
    strategy: str
    n_segments: int
    k: int
    message: str


def occlusion_sweep(images, bb: BlackBox, cfg: SweepConfig):
    """Run the sweep; returns (rows, failures).

    ``images`` is an iterable of (name, uint8 RGB array) pairs. Rows are
    sorted by (strategy, n, k) and aggregate every (image, repeat) squared
    error observed for that bin.
    """
    errors: list[SweepFailure] = []
    pooled: dict = defaultdict(list)  # (strategy, n, k) -> squared errors

    def one_image(item):
        name, img = item
        if cfg.resize:
            img = resize_image(img, cfg.resize)
        local_pool: dict = defaultdict(list)
        local_errors: list[SweepFailure] = []
        try:
            p = bb.predict([img])[0]
        except (BackendError, ProtocolError) as e:
            warnings.warn(f"skipping image {name!r}: baseline prediction failed ({e})")
            return local_pool, local_errors
        top = int(np.argmax(p))
        p0 = float(p[top])

        for n in cfg.segment_counts:
            seg = slic_segment(img, n, cfg.compactness, cfg.iterations)
            s = seg.n_segments
            for strategy in cfg.strategies:
                stream = RngStream(cfg.seed).child("sweep", name, str(n), strategy)
                batch_imgs, batch_keys = [], []

                def flush():
                    if not batch_imgs:
                        return
                    try:
                        probs = bb.predict(batch_imgs)
                    except (BackendError, ProtocolError) as e:
                        for key in batch_keys:
                            local_errors.append(
                                SweepFailure(name, strategy, n, key[2], str(e)))
                        batch_imgs.clear()
                        batch_keys.clear()
                        return
                    for key, row in zip(batch_keys, probs):
                        local_pool[key].append((float(row[top]) - p0) ** 2)
                    batch_imgs.clear()
                    batch_keys.clear()

                for k in range(s + 1):
                    reps = 1 if k in (0, s) else cfg.repeats
                    for _ in range(reps):
                        subset = stream.choice(s, size=k, replace=False)
                        keep = np.ones(s, dtype=np.uint8)
                        keep[subset] = 0
                        batch_imgs.append(occlude(img, seg, keep, strategy, stream))
                        batch_keys.append((strategy, n, k))
                        if len(batch_imgs) >= _PREDICT_CHUNK:
                            flush()
                flush()
        return local_pool, local_errors

    items = list(images)
    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            outcomes = list(pool.map(one_image, items))
    else:
        outcomes = [one_image(it) for it in items]

    for local_pool, local_errors in outcomes:
        for key, ses in local_pool.items():
            pooled[key].extend(ses)
        errors.extend(local_errors)

    rows = []
    for (strategy, n, k) in sorted(pooled):
        ses = np.asarray(pooled[(strategy, n, k)])
        rows.append(SweepRow(strategy, n, k, float(ses.mean()),
                             float(ses.std()), len(ses)))
    return rows, errors


def write_sweep_csv(rows, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["strategy", "n_segments", "k_occluded",
                         "mse_mean", "mse_std", "n_obs"])
        for r in rows:
            writer.writerow([r.strategy, r.n_segments, r.k,
                             repr(r.mse_mean), repr(r.mse_std), r.n_obs])


def write_fig_layout(rows, outdir) -> list:
    """One file per segment count: x = k, one MSE series per strategy."""
    from pathlib import Path
    outdir = Path(outdir)
    by_n: dict = defaultdict(dict)
    strategies = sorted({r.strategy for r in rows})
    for r in rows:
        by_n[r.n_segments][(r.k, r.strategy)] = r
    written = []
    for n, cells in sorted(by_n.items()):
        ks = sorted({k for k, _ in cells})
        path = outdir / f"occlusion_mse_n{n}.csv"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["k"] + strategies + [f"{s}_std" for s in strategies])
            for k in ks:
                row = [k]
                for s in strategies:
                    cell = cells.get((k, s))
                    row.append("" if cell is None else repr(cell.mse_mean))
                for s in strategies:
                    cell = cells.get((k, s))
                    row.append("" if cell is None else repr(cell.mse_std))
                writer.writerow(row)
        written.append(path)
    return written


def write_failures_csv(errors, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["image", "strategy", "n_segments", "k_occluded", "error"])
        for e in errors:
            writer.writerow([e.image, e.strategy, e.n_segments, e.k, e.message])
