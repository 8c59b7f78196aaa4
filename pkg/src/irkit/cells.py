"""Per-cell statistics and the purity metrics defined over them.

A *cell* is one hyper-rectangle of a partition: a tuple of bin coordinates, a
binary encoding, or a tree leaf. Each cell records its member count, the
target distribution of its members (label histogram, or mean/variance for
numeric and probabilistic targets) and a per-feature Gaussian fit used by the
inverse transform. Variances use the population convention (divide by n)
throughout, matching the brute-force oracles in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from irkit.dataset import LABEL, NUMERIC, PROBA, TabularDataset
from irkit.discretize import Discretization, discretize_rows
from irkit.errors import ParameterError, SchemaError

STD_FLOOR = 1e-12


@dataclass
class CellEntry:
    key: object
    count: int
    member_idx: np.ndarray
    label_counts: dict | None          # crisp targets
    target_mean: object | None         # float (numeric) or per-class array (proba)
    target_var: object | None          # population variance, same shape as mean
    feature_stats: tuple               # per feature (mean, std) or None for categorical


@dataclass
class CellStats:
    cells: dict
    n_total: int
    target_kind: str
    classes: tuple
    # Marginals used by the inverse transform: per feature, per bin (count, mean, std).
    feature_bin_stats: tuple = ()
    global_feature_stats: tuple = ()

    def __iter__(self):
        return iter(self.cells.values())

    def __len__(self):
        return len(self.cells)

    def bin_gaussian(self, j: int, b: int) -> tuple[float, float]:
        """Gaussian fit of feature j inside bin b.

        Bins holding fewer than 2 training points borrow the feature's global
        mean/std (the caller truncates the distribution to the bin's range).
        """
        if not self.feature_bin_stats:
            raise ParameterError("cell statistics were built without feature marginals")
        count, mean, std = self.feature_bin_stats[j].get(b, (0, 0.0, 0.0))
        if count < 2:
            return self.global_feature_stats[j]
        return mean, std


def _entry_from_members(key, idx: np.ndarray, ds: TabularDataset,
                        with_feature_stats: bool) -> CellEntry:
    label_counts = None
    target_mean = target_var = None
    if ds.target_kind == LABEL:
        uniq, counts = np.unique(np.asarray(ds.labels[idx], dtype=object), return_counts=True)
        label_counts = {u: int(c) for u, c in zip(uniq, counts)}
    elif ds.target_kind == NUMERIC:
        y = ds.values[idx]
        target_mean = float(y.mean())
        target_var = float(np.mean((y - target_mean) ** 2))
    else:  # PROBA
        p = ds.probabilities[idx]
        target_mean = p.mean(axis=0)
        target_var = np.mean((p - target_mean) ** 2, axis=0)

    stats = ()
    if with_feature_stats:
        stats = tuple(
            _gaussian_fit(ds.column(j)[idx]) if ds.schema.is_numerical(j) else None
            for j in range(ds.arity))
    return CellEntry(key, len(idx), idx, label_counts, target_mean, target_var, stats)


def _gaussian_fit(values: np.ndarray) -> tuple[float, float]:
    mean = float(values.mean())
    std = float(np.sqrt(np.mean((values - mean) ** 2)))
    return mean, max(std, STD_FLOOR)


def cell_stats_from_groups(groups: dict, ds: TabularDataset,
                           with_feature_stats: bool = True) -> CellStats:
    """Build statistics for an arbitrary row partition {key -> row indices}."""
    cells = {}
    for key, idx in groups.items():
        idx = np.asarray(idx, dtype=np.intp)
        if len(idx) == 0:
            continue  # only non-empty cells are stored
        cells[key] = _entry_from_members(key, idx, ds, with_feature_stats)
    return CellStats(cells, sum(e.count for e in cells.values()),
                     ds.target_kind, ds.classes)


def fit_cell_stats(ds: TabularDataset, d: Discretization,
                   with_feature_stats: bool = True) -> CellStats:
    """Group the dataset by bin coordinates and fit per-cell statistics."""
    coords = discretize_rows(ds, d)
    _, inverse = np.unique(coords, axis=0, return_inverse=True)
    groups: dict = {}
    for i, g in enumerate(inverse):
        groups.setdefault(g, []).append(i)
    keyed = {tuple(int(v) for v in coords[idx[0]]): idx for idx in groups.values()}
    stats = cell_stats_from_groups(keyed, ds, with_feature_stats)

    # Per-(feature, bin) marginals for inverse sampling.
    marginals = []
    global_stats = []
    for j in range(ds.arity):
        if not ds.schema.is_numerical(j):
            marginals.append({})
            global_stats.append(None)
            continue
        col = ds.column(j)
        per_bin = {}
        for b in range(d.bin_count(j)):
            members = col[coords[:, j] == b]
            if len(members):
                m, s = _gaussian_fit(members)
                per_bin[b] = (len(members), m, s)
        marginals.append(per_bin)
        global_stats.append(_gaussian_fit(col))
    stats.feature_bin_stats = tuple(marginals)
    stats.global_feature_stats = tuple(global_stats)
    return stats


def gini_impurity(cell: CellEntry) -> float:
    """Sum of p(1-p) over class proportions inside the cell."""
    if cell.count < 1:
        raise ParameterError("Gini impurity of an empty cell is undefined")
    if cell.label_counts is None:
        raise SchemaError("Gini impurity needs crisp labels")
    p = np.asarray(list(cell.label_counts.values()), dtype=np.float64) / cell.count
    return float(np.sum(p * (1.0 - p)))


def mse_uniformity(cell: CellEntry) -> float:
    """Mean squared deviation from the cell mean (summed across classes
    for probabilistic targets)."""
    if cell.count < 1:
        raise ParameterError("MSE of an empty cell is undefined")
    if cell.target_var is None:
        raise SchemaError("MSE needs a numeric or probabilistic target")
    return float(np.sum(cell.target_var))


def weighted_quality(cells, metric: str) -> float:
    """Count-weighted average of per-cell scores: sum |H|*L(H) / sum |H|."""
    if metric == "gini":
        score = gini_impurity
    elif metric == "mse":
        score = mse_uniformity
    else:
        raise ParameterError(f"metric must be gini or mse, not {metric!r}")
    entries = list(cells.cells.values()) if isinstance(cells, CellStats) else list(cells)
    entries = [e for e in entries if e.count > 0]
    if not entries:
        raise ParameterError("weighted quality needs at least one non-empty cell")
    total = sum(e.count for e in entries)
    return sum(e.count * score(e) for e in entries) / total


def grouped_weighted_quality(codes: np.ndarray, n_groups: int, target,
                             metric: str, n_classes: int = 0) -> float:
    """Vectorized weighted quality for a partition given as group codes.

    ``target`` is an int-coded label vector for gini, or a float vector for
    mse. Used on hot paths (the per-instance purity benchmark) where building
    full CellStats objects would dominate the runtime.
    """
    n = len(codes)
    if n == 0:
        raise ParameterError("weighted quality needs at least one row")
    sizes = np.bincount(codes, minlength=n_groups).astype(np.float64)
    occupied = sizes > 0
    if metric == "gini":
        counts = np.zeros((n_groups, n_classes), dtype=np.float64)
        np.add.at(counts, (codes, target), 1.0)
        with np.errstate(invalid="ignore"):
            p = counts / sizes[:, None]
        gini = np.maximum(1.0 - np.nansum(p * p, axis=1), 0.0)
        return float(np.sum(sizes[occupied] * gini[occupied]) / n)
    if metric == "mse":
        y = np.asarray(target, dtype=np.float64)
        shift = y.mean()  # conditioning only; the metric is shift-invariant
        ys = y - shift
        s = np.bincount(codes, weights=ys, minlength=n_groups)
        q = np.bincount(codes, weights=ys * ys, minlength=n_groups)
        cost = q[occupied] - s[occupied] ** 2 / sizes[occupied]
        return float(np.sum(np.maximum(cost, 0.0)) / n)
    raise ParameterError(f"metric must be gini or mse, not {metric!r}")
