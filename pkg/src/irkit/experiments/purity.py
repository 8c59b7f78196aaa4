"""Tree-vs-quartile purity benchmark.

Compares two interpretable representations of a dataset by the weighted
impurity of the cells they induce, globally and locally:

* quartile global: weighted impurity over the distinct bin-coordinate cells
  of a q-quantile discretization of the whole dataset;
* quartile local: per instance, weighted impurity over the binary-encoding
  cells of its neighbourhood (points within ``radius_fraction`` of the
  maximum pairwise distance), averaged over instances;
* tree global: best-first tree fit to the full dataset, impurity read off the
  growth trace at every width;
* tree local: a tree per instance fit to (and scored on) its neighbourhood.

Classification datasets score with Gini, regression with MSE, on the ground
truth. The whole procedure is deterministic. Trees here deliberately use
min_leaf=1: the benchmark probes representational capacity, and the global
crossing happens at widths only reachable with singleton leaves.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import squareform, pdist

from irkit.cells import grouped_weighted_quality
from irkit.dataset import LABEL, NUMERIC, PROBA, TabularDataset
from irkit.discretize import discretize_rows, quantile_discretize
from irkit.errors import ParameterError, SchemaError
from irkit.tree import fit_tree


@dataclass
class PurityBenchConfig:
    widths: tuple = (2, 4, 8, 16, 32, 64, 128, 256)
    local_widths: tuple | None = None   # defaults to widths
    radius_fraction: float = 0.6
    q: int = 4
    min_leaf: int = 1
    standardized_distance: bool = False
    jobs: int = 1

    def __post_init__(self):
        if not 0 < self.radius_fraction <= 1:
            raise ParameterError("radius fraction must be in (0, 1]")
        if not self.widths:
            raise ParameterError("at least one tree width is required")
        if self.local_widths is None:
            self.local_widths = tuple(self.widths)


@dataclass
class PurityResult:
    dataset: str
    metric: str
    n_rows: int
    quartile_global: float
    quartile_used: int
    quartile_theoretical: int
    quartile_local_mean: float
    quartile_local_std: float
    binary_used_mean: float
    binary_theoretical: int
    tree_global: dict = field(default_factory=dict)       # width -> impurity
    tree_local_mean: dict = field(default_factory=dict)
    tree_local_std: dict = field(default_factory=dict)
    tree_global_trace: list = field(default_factory=list)
    skipped: int = 0

    def crossing_width(self) -> int | None:
        """Smallest tree width whose global impurity beats quartile global."""
        for n_leaves, q in self.tree_global_trace:
            if q < self.quartile_global:
                return n_leaves
        return None


def _metric_target(ds: TabularDataset, metric: str):
    if metric == "gini":
        if ds.target_kind != LABEL:
            raise SchemaError("gini scoring needs crisp labels")
        return ds.label_codes(), len(ds.classes)
    if ds.target_kind == LABEL:
        raise SchemaError("mse scoring needs a numeric or probabilistic target")
    return ds.target_vector(), 0


def _partition_quality(codes, n_groups, target, metric, n_classes):
    if metric == "mse" and target.ndim == 2:
        # probabilistic target: per-class MSE summed across classes
        return sum(grouped_weighted_quality(codes, n_groups, target[:, c], "mse")
                   for c in range(target.shape[1]))
    return grouped_weighted_quality(codes, n_groups, target, metric, n_classes)


def _binary_codes(bits: np.ndarray) -> np.ndarray:
    """Group codes for binary rows (packed into integers when arity allows)."""
    if bits.shape[1] <= 62:
        packed = bits.astype(np.int64) @ (1 << np.arange(bits.shape[1], dtype=np.int64))
        _, codes = np.unique(packed, return_inverse=True)
    else:
        _, codes = np.unique(bits, axis=0, return_inverse=True)
    return codes


def purity_benchmark(ds: TabularDataset, cfg: PurityBenchConfig,
                     metric: str | None = None,
                     dataset_name: str = "") -> PurityResult:
    if metric is None:
        metric = "gini" if ds.target_kind == LABEL else "mse"
    target, n_classes = _metric_target(ds, metric)
    n = ds.n_rows

    # --- quartile representation -------------------------------------------
    disc = quantile_discretize(ds, cfg.q)
    coords = discretize_rows(ds, disc)
    _, global_codes = np.unique(coords, axis=0, return_inverse=True)
    quartile_used = int(global_codes.max()) + 1
    quartile_theoretical = math.prod(disc.bin_counts)
    quartile_global = _partition_quality(global_codes, quartile_used, target,
                                         metric, n_classes)

    # --- neighbourhoods -----------------------------------------------------
    matrix = ds.numeric_matrix()
    if cfg.standardized_distance:
        std = matrix.std(axis=0)
        matrix = matrix / np.where(std > 0, std, 1.0)
    distances = squareform(pdist(matrix))
    radius = cfg.radius_fraction * distances.max()

    criterion = metric  # gini for classification, mse for regression
    max_local_width = max(cfg.local_widths)

    def one_instance(i: int):
        nb = np.flatnonzero(distances[i] <= radius)
        if len(nb) < 2:
            return None
        bits = (coords[nb] == coords[i]).astype(np.uint8)
        codes = _binary_codes(bits)
        t = target[nb]
        q_local = _partition_quality(codes, int(codes.max()) + 1, t, metric, n_classes)

        sub = _subset(ds, nb)
        tree = fit_tree(sub, criterion, max_local_width, cfg.min_leaf)
        widths_q = [tree.impurity_at_width(w) for w in cfg.local_widths]
        return q_local, int(codes.max()) + 1, widths_q

    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(one_instance, range(n)))
    else:
        results = [one_instance(i) for i in range(n)]

    kept = [r for r in results if r is not None]
    skipped = n - len(kept)
    if not kept:
        raise ParameterError("every neighbourhood was degenerate; nothing to report")
    q_locals = np.asarray([r[0] for r in kept])
    used_locals = np.asarray([r[1] for r in kept], dtype=np.float64)
    local_trees = np.asarray([r[2] for r in kept])  # (instances, widths)

    # --- global tree ---------------------------------------------------------
    # Grow far enough that the quartile crossing is always discoverable.
    trace_width = max(max(cfg.widths), quartile_used)
    global_tree = fit_tree(ds, criterion, trace_width, cfg.min_leaf)

    result = PurityResult(
        dataset=dataset_name,
        metric=metric,
        n_rows=n,
        quartile_global=quartile_global,
        quartile_used=quartile_used,
        quartile_theoretical=quartile_theoretical,
        quartile_local_mean=float(q_locals.mean()),
        quartile_local_std=float(q_locals.std()),
        binary_used_mean=float(used_locals.mean()),
        binary_theoretical=2 ** ds.arity,
        tree_global={w: global_tree.impurity_at_width(w) for w in cfg.widths},
        tree_local_mean={w: float(local_trees[:, k].mean())
                         for k, w in enumerate(cfg.local_widths)},
        tree_local_std={w: float(local_trees[:, k].std())
                        for k, w in enumerate(cfg.local_widths)},
        tree_global_trace=list(global_tree.growth_trace),
        skipped=skipped,
    )
    return result


def _subset(ds: TabularDataset, idx: np.ndarray) -> TabularDataset:
    rows = ds.rows[idx]
    if ds.target_kind == LABEL:
        return TabularDataset(ds.schema, rows, LABEL,
                              labels=ds.labels[idx], classes=ds.classes)
    if ds.target_kind == NUMERIC:
        return TabularDataset(ds.schema, rows, NUMERIC, values=ds.values[idx])
    return TabularDataset(ds.schema, rows, PROBA,
                          probabilities=ds.probabilities[idx], classes=ds.classes)


def write_purity_csv(result: PurityResult, path) -> None:
    """Width-indexed plot data: four series per row plus encoding metadata."""
    widths = sorted(set(result.tree_global) | set(result.tree_local_mean))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([
            "width", "tree_global", "tree_local_mean", "tree_local_std",
            "quartile_global", "quartile_local_mean", "quartile_local_std",
        ])
        for w in widths:
            writer.writerow([
                w,
                _fmt(result.tree_global.get(w)),
                _fmt(result.tree_local_mean.get(w)),
                _fmt(result.tree_local_std.get(w)),
                repr(result.quartile_global),
                repr(result.quartile_local_mean),
                repr(result.quartile_local_std),
            ])


def write_purity_summary(result: PurityResult, path) -> None:
    import json
    payload = {
        "dataset": result.dataset,
        "metric": result.metric,
        "n_rows": result.n_rows,
        "quartile_global": result.quartile_global,
        "quartile_encodings": {"used": result.quartile_used,
                               "theoretical": result.quartile_theoretical},
        "quartile_local": {"mean": result.quartile_local_mean,
                           "std": result.quartile_local_std,
                           "binary_used_mean": result.binary_used_mean,
                           "binary_theoretical": result.binary_theoretical},
        "crossing_width": result.crossing_width(),
        "skipped_instances": result.skipped,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _fmt(v):
    return "" if v is None else repr(float(v))
