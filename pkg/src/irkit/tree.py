"""Axis-aligned partitioning with best-first decision trees.

Growth is best-first: at every step the frontier leaf whose best split yields
the largest impurity decrease (count-weighted, Gini or MSE) is expanded, so a
tree grown to width w passes through the exact trees of widths 2..w-1 on the
way. ``growth_trace`` records the weighted impurity after every split, which
makes purity-vs-width curves a single fit instead of one per width.

Split candidates are midpoints between consecutive distinct values of a
numerical feature; ties resolve to the lower feature index, then the lower
threshold. Routing matches the discretization convention: x <= threshold goes
left, so leaf boxes are right-closed intervals that tile the feature space.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from irkit.cells import CellStats, cell_stats_from_groups
from irkit.dataset import LABEL, NUMERIC, PROBA, TabularDataset
from irkit.discretize import Discretization
from irkit.errors import ParameterError, SchemaError, ShapeError
from irkit.kernels import split_scan_gini, split_scan_mse


@dataclass
class Leaf:
    cell_id: int
    member_idx: np.ndarray
    prediction: object
    n: int
    cost: float  # member count times impurity

    def prediction_str(self) -> str:
        if isinstance(self.prediction, np.ndarray):
            return "[" + ", ".join(f"{v:.3f}" for v in self.prediction) + "]"
        if isinstance(self.prediction, float):
            return f"{self.prediction:.4g}"
        return str(self.prediction)


@dataclass
class Split:
    feature: int  # schema feature index
    threshold: float
    left: object
    right: object


@dataclass
class TreePartition:
    schema: object
    criterion: str
    root: object
    leaves: list
    boxes: list            # per leaf: {feature index -> (lo, hi]} over split features
    growth_trace: list     # (n_leaves, weighted impurity) after each split
    n_training: int
    classes: tuple = ()

    @property
    def n_leaves(self) -> int:
        return len(self.leaves)

    @property
    def weighted_impurity(self) -> float:
        return self.growth_trace[-1][1]

    def impurity_at_width(self, width: int) -> float:
        """Weighted impurity of the best-first tree capped at ``width`` leaves."""
        if width < 1:
            raise ParameterError("width must be positive")
        value = self.growth_trace[0][1]
        for n_leaves, q in self.growth_trace:
            if n_leaves > width:
                break
            value = q
        return value

    def route(self, x) -> int:
        node = self.root
        while isinstance(node, Split):
            node = node.left if float(x[node.feature]) <= node.threshold else node.right
        return node.cell_id

    def route_rows(self, rows: np.ndarray) -> np.ndarray:
        """Vectorized routing of a row matrix to leaf cell ids."""
        rows = np.asarray(rows)
        out = np.empty(len(rows), dtype=np.int32)
        stack = [(self.root, np.arange(len(rows)))]
        while stack:
            node, idx = stack.pop()
            if isinstance(node, Leaf):
                out[idx] = node.cell_id
                continue
            col = rows[idx, node.feature].astype(np.float64)
            go_left = col <= node.threshold
            stack.append((node.left, idx[go_left]))
            stack.append((node.right, idx[~go_left]))
        return out

    def rules(self) -> list[str]:
        """One readable conjunction per leaf."""
        names = self.schema.names
        lines = []
        for leaf, box in zip(self.leaves, self.boxes):
            terms = []
            for j in sorted(box):
                lo, hi = box[j]
                if np.isfinite(lo):
                    terms.append(f"{names[j]} > {lo:g}")
                if np.isfinite(hi):
                    terms.append(f"{names[j]} <= {hi:g}")
            cond = " and ".join(terms) if terms else "always"
            lines.append(f"{cond} -> leaf {leaf.cell_id} ({leaf.prediction_str()})")
        return lines

    def to_json(self) -> str:
        def encode(node):
            if isinstance(node, Leaf):
                pred = node.prediction
                if isinstance(pred, np.ndarray):
                    pred = [float(v) for v in pred]
                return {"leaf": {"id": node.cell_id, "n": node.n, "prediction": pred}}
            return {"split": {"feature": self.schema.names[node.feature],
                              "threshold": node.threshold,
                              "left": encode(node.left),
                              "right": encode(node.right)}}
        return json.dumps({"criterion": self.criterion, "tree": encode(self.root)},
                          indent=2)


class _GrowNode:
    __slots__ = ("order", "idx", "cost", "best", "node_id", "box")

    def __init__(self, idx, cost, node_id, box):
        self.idx = idx
        self.cost = cost
        self.node_id = node_id
        self.box = box
        self.best = None  # (child_cost, feature_local, threshold, order)


def _node_cost(y, criterion, n_classes):
    n = len(y)
    if criterion == "gini":
        counts = np.bincount(y, minlength=n_classes).astype(np.float64)
        return float(n - np.sum(counts * counts) / n)
    ys = y - y.mean(axis=0)
    ys2 = ys if ys.ndim == 2 else ys[:, None]
    cost = 0.0
    for c in range(ys2.shape[1]):
        col = ys2[:, c]
        cost += max(float(np.sum(col * col) - col.sum() ** 2 / n), 0.0)
    return cost


def _best_split(grow, cols, y, criterion, n_classes, min_leaf):
    """Scan all numerical features; store the winning candidate on the node."""
    best = None
    for j_local, col in enumerate(cols):
        values = col[grow.idx]
        order = np.argsort(values, kind="stable")
        v = values[order]
        if criterion == "gini":
            pos, child_cost = split_scan_gini(v, y[grow.idx][order], n_classes, min_leaf)
        else:
            yn = y[grow.idx]
            yn = yn - yn.mean(axis=0)  # node-mean centering for conditioning
            pos, child_cost = split_scan_mse(v, yn[order], min_leaf)
        if pos < 0:
            continue
        if best is None or child_cost < best[0]:
            a, b = v[pos], v[pos + 1]
            thr = a + (b - a) / 2.0
            if thr >= b:  # adjacent floats: keep a <= thr < b
                thr = a
            best = (child_cost, j_local, float(thr), order)
    grow.best = best


def fit_tree(ds: TabularDataset, criterion: str, max_leaves: int,
             min_leaf: int = 1) -> TreePartition:
    """Grow a best-first tree on the dataset's own target."""
    if max_leaves < 2:
        raise ParameterError(f"max_leaves must be at least 2, got {max_leaves}")
    if min_leaf < 1:
        raise ParameterError("min_leaf must be at least 1")
    if ds.n_rows == 0:
        raise ParameterError("cannot fit a tree on an empty dataset")
    if criterion == "gini":
        if ds.target_kind != LABEL:
            raise SchemaError("gini criterion needs crisp labels")
        y = ds.label_codes()
        n_classes = len(ds.classes)
    elif criterion == "mse":
        if ds.target_kind == LABEL:
            raise SchemaError("mse criterion needs a numeric or probabilistic target")
        y = ds.target_vector().astype(np.float64)
        n_classes = 0
    else:
        raise ParameterError(f"criterion must be gini or mse, not {criterion!r}")

    num_idx = ds.schema.numerical_indices
    if not num_idx:
        raise SchemaError("tree fitting needs at least one numerical feature")
    cols = [ds.column(j) for j in num_idx]

    n = ds.n_rows
    root = _GrowNode(np.arange(n), _node_cost(y, criterion, n_classes), 0, {})
    _best_split(root, cols, y, criterion, n_classes, min_leaf)
    frontier = [root]
    total_cost = root.cost
    trace = [(1, total_cost / n)]
    next_id = 1
    splits = {}  # node_id -> (feature_local, threshold, left GrowNode, right GrowNode)

    while len(frontier) < max_leaves:
        candidate = None
        for g in frontier:
            if g.best is None:
                continue
            decrease = g.cost - g.best[0]
            if decrease <= 0:
                continue
            if candidate is None or decrease > candidate[0]:
                candidate = (decrease, g)
        if candidate is None:
            break
        g = candidate[1]
        child_cost, j_local, thr, order = g.best
        values = cols[j_local][g.idx]
        left_idx = g.idx[values <= thr]
        right_idx = g.idx[values > thr]
        j_global = num_idx[j_local]

        left_box = dict(g.box)
        lo, hi = left_box.get(j_global, (-np.inf, np.inf))
        left_box[j_global] = (lo, thr)
        right_box = dict(g.box)
        right_box[j_global] = (thr, hi)

        left = _GrowNode(left_idx, _node_cost(y[left_idx], criterion, n_classes),
                         next_id, left_box)
        right = _GrowNode(right_idx, _node_cost(y[right_idx], criterion, n_classes),
                          next_id + 1, right_box)
        next_id += 2
        _best_split(left, cols, y, criterion, n_classes, min_leaf)
        _best_split(right, cols, y, criterion, n_classes, min_leaf)

        splits[g.node_id] = (j_global, thr, left, right)
        frontier.remove(g)
        frontier.extend([left, right])
        total_cost += left.cost + right.cost - g.cost
        trace.append((len(frontier), total_cost / n))

    # Materialize the final tree; leaves numbered depth-first, left to right.
    # Iterative post-order walk so deep best-first chains cannot overflow the
    # Python recursion limit.
    leaves: list[Leaf] = []
    boxes: list[dict] = []
    built: dict[int, object] = {}
    stack = [(root, False)]
    while stack:
        grow, expanded = stack.pop()
        if grow.node_id not in splits:
            pred = _leaf_prediction(y[grow.idx], criterion, ds)
            leaf = Leaf(len(leaves), grow.idx, pred, len(grow.idx), grow.cost)
            leaves.append(leaf)
            boxes.append(grow.box)
            built[grow.node_id] = leaf
            continue
        j_global, thr, left, right = splits[grow.node_id]
        if expanded:
            built[grow.node_id] = Split(j_global, thr,
                                        built[left.node_id], built[right.node_id])
        else:
            stack.append((grow, True))
            stack.append((right, False))  # popped after left: left-to-right ids
            stack.append((left, False))

    return TreePartition(ds.schema, criterion, built[root.node_id], leaves, boxes,
                         trace, n, ds.classes)


def _leaf_prediction(y, criterion, ds):
    if criterion == "gini":
        counts = np.bincount(y, minlength=len(ds.classes))
        return ds.classes[int(np.argmax(counts))]  # ties -> lowest class index
    if y.ndim == 2:
        return y.mean(axis=0)
    return float(y.mean())


def leaves_to_cells(tree: TreePartition, ds: TabularDataset,
                    with_feature_stats: bool = False) -> CellStats:
    """Route every dataset row to its leaf and fit cell statistics."""
    if ds.arity != tree.schema.arity:
        raise ShapeError("dataset arity differs from the tree's schema")
    assignments = tree.route_rows(ds.rows)
    groups: dict = {}
    for i, cid in enumerate(assignments):
        groups.setdefault(int(cid), []).append(i)
    return cell_stats_from_groups(groups, ds, with_feature_stats)


def tree_discretize(ds: TabularDataset, max_leaves: int, criterion: str = None,
                    min_leaf: int = 5) -> Discretization:
    """Class-aware discretization: per-feature bins at the tree's thresholds.

    The tree is fit on the dataset's target (pass a re-targeted dataset to
    discretize against black-box predictions); each feature's bin edges are
    the sorted distinct thresholds the tree used for that feature.
    """
    if criterion is None:
        criterion = "gini" if ds.target_kind == LABEL else "mse"
    tree = fit_tree(ds, criterion, max_leaves, min_leaf)
    per_feature: dict[int, set] = {}
    stack = [tree.root]
    while stack:
        node = stack.pop()
        if isinstance(node, Split):
            per_feature.setdefault(node.feature, set()).add(node.threshold)
            stack.extend([node.left, node.right])
    edges = []
    for j in range(ds.arity):
        if ds.schema.is_numerical(j):
            edges.append(np.asarray(sorted(per_feature.get(j, ())), dtype=np.float64))
        else:
            edges.append(None)
    return Discretization(ds.schema, tuple(edges))
