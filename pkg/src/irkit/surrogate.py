"""Surrogate fitting on interpretable representations.

The linear route regresses black-box outputs on the binary representation via
damped normal equations; the closed-form single-concept identity exposes how
the coefficient depends on where the 0-bit samples happen to land. The tree
route fits the surrogate in the original domain instead, which sidesteps the
information loss of binarization entirely.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from irkit.blackbox import BlackBox
from irkit.dataset import LABEL, NUMERIC, PROBA, TabularDataset
from irkit.discretize import Anchor, Discretization, quantile_discretize
from irkit.errors import ConfigError, ParameterError, ShapeError
from irkit.rng import RngStream
from irkit.sampling import GaussianSampler, sample_and_bind
from irkit.tree import TreePartition, fit_tree, tree_discretize

OLS_DAMPING = 1e-10


@dataclass
class LinearExplanation:
    intercept: float
    coefficients: np.ndarray
    concepts: tuple = ()            # human-readable description per concept
    target_class: object = None

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=np.float64)
        if not self.concepts:
            self.concepts = tuple(f"concept_{i}" for i in range(len(self.coefficients)))
        if len(self.concepts) != len(self.coefficients):
            raise ShapeError("one description per coefficient required")

    def ranked(self):
        """(index, description, coefficient) sorted by |coefficient| descending."""
        order = sorted(range(len(self.coefficients)),
                       key=lambda i: (-abs(self.coefficients[i]), i))
        return [(i, self.concepts[i], float(self.coefficients[i])) for i in order]

    def to_json(self) -> str:
        return json.dumps({
            "kind": "linear",
            "target_class": None if self.target_class is None else str(self.target_class),
            "intercept": self.intercept,
            "concepts": [{"concept": i, "description": d, "coefficient": c}
                         for i, d, c in self.ranked()],
        }, indent=2)

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["concept", "description", "coefficient"])
            for i, d, c in self.ranked():
                writer.writerow([i, d, repr(c)])


@dataclass
class TreeExplanation:
    tree: TreePartition
    target_class: object = None

    def to_json(self) -> str:
        return json.dumps({
            "kind": "tree",
            "target_class": None if self.target_class is None else str(self.target_class),
            "rules": self.tree.rules(),
            "tree": json.loads(self.tree.to_json())["tree"],
        }, indent=2)


def fit_ols(X, y, weights=None, concepts=(), target_class=None,
            damping: float = OLS_DAMPING) -> LinearExplanation:
    """Weighted least squares via normal equations with Tikhonov damping.

    The damping keeps rank-deficient designs solvable while leaving
    well-conditioned systems unchanged to ~1e-8.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2:
        raise ShapeError("design matrix must be 2-D")
    n, d = X.shape
    if n == 0:
        raise ParameterError("cannot fit OLS on zero rows")
    if len(y) != n:
        raise ShapeError("target length != design rows")
    Xa = np.hstack([np.ones((n, 1)), X])
    if weights is not None:
        w = np.asarray(weights, dtype=np.float64)
        if len(w) != n:
            raise ShapeError("weight length != design rows")
        Xw = Xa * w[:, None]
    else:
        Xw = Xa
    A = Xw.T @ Xa + damping * np.eye(d + 1)
    b = Xw.T @ y
    beta = np.linalg.solve(A, b)
    return LinearExplanation(float(beta[0]), beta[1:], tuple(concepts), target_class)


def analytic_binary_coefficient(on_bins, off_bins) -> tuple[float, float]:
    """Closed-form OLS solution for a single binary concept.

    ``on_bins`` and ``off_bins`` are (count, mean) pairs describing where the
    samples landed. The coefficient is the contrast of count-weighted means,
    ``mean(bit=1) - mean(bit=0)``, and the intercept is ``mean(bit=0)`` — which
    is exactly why shifting sample counts between off-bins moves the
    explanation even when per-bin outputs stay fixed.
    """
    def pooled(bins):
        bins = [(int(c), float(m)) for c, m in bins]
        total = sum(c for c, _ in bins)
        if total <= 0:
            raise ParameterError("each side of the concept needs at least one sample")
        return sum(c * m for c, m in bins) / total

    mean_on = pooled(on_bins)
    mean_off = pooled(off_bins)
    return mean_off, mean_on - mean_off


@dataclass
class SurrogateConfig:
    n: int = 1000
    scale: float = 1.0
    flip: float = 0.1
    target_class: int | None = None     # class index; None = anchor's top class
    target_output: str = "proba"        # regress on probability or crisp indicator
    kernel_width: float | None = None   # None disables distance weighting
    kind: str = "ols"                   # or "tree"
    tree_leaves: int = 8
    quantile_q: int = 4
    ir_tree_leaves: int = 32
    ir_tree_min_leaf: int = 5

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("sample count must be positive")
        if self.target_output not in ("proba", "crisp"):
            raise ConfigError("target_output must be proba or crisp")
        if self.kind not in ("ols", "tree"):
            raise ConfigError("surrogate kind must be ols or tree")


def with_target(ds: TabularDataset, *, values=None, labels=None,
                probabilities=None, classes=()) -> TabularDataset:
    """Clone a dataset's rows and schema with a replacement target."""
    if values is not None:
        return TabularDataset(ds.schema, ds.rows, NUMERIC, values=values)
    if labels is not None:
        return TabularDataset(ds.schema, ds.rows, LABEL, labels=labels, classes=classes)
    if probabilities is not None:
        return TabularDataset(ds.schema, ds.rows, PROBA, probabilities=probabilities,
                              classes=classes)
    raise ParameterError("one replacement target is required")


def build_ir(ds: TabularDataset, ir, bb: BlackBox | None = None,
             cfg: SurrogateConfig | None = None,
             target_class: int | None = None) -> Discretization:
    """Construct the discretization behind an IR choice.

    ``ir`` is ("quantile", q) or ("tree", max_leaves); tree-based IRs are
    class-aware, fit on the black box's outputs over the dataset rows.
    """
    kind, param = ir
    if kind == "quantile":
        return quantile_discretize(ds, int(param))
    if kind == "tree":
        if bb is None:
            raise ConfigError("a tree-based IR needs a black box for class awareness")
        cfg = cfg or SurrogateConfig()
        probs = bb.predict(np.asarray(ds.rows, dtype=np.float64))
        if cfg.target_output == "crisp":
            labels = np.asarray([int(np.argmax(r)) for r in probs], dtype=object)
            retarget = with_target(ds, labels=labels,
                                   classes=tuple(range(bb.classes)))
            criterion = "gini"
        else:
            tc = target_class if target_class is not None else 0
            retarget = with_target(ds, values=probs[:, tc])
            criterion = "mse"
        return tree_discretize(retarget, int(param), criterion=criterion,
                               min_leaf=cfg.ir_tree_min_leaf)
    raise ConfigError(f"unknown IR kind {kind!r}")


def hamming_weights(bits: np.ndarray, width: float) -> np.ndarray:
    """exp(-d^2 / width^2) with d = normalized Hamming distance to all-ones."""
    d = 1.0 - bits.mean(axis=1)
    return np.exp(-(d * d) / (width * width))


def explain_tabular(x, bb: BlackBox, ds: TabularDataset, ir,
                    cfg: SurrogateConfig, rng: RngStream):
    """End-to-end pipeline: IR, anchor, bound sampling, prediction, surrogate."""
    p_anchor = bb.predict([list(map(float, x))])[0]
    target = (cfg.target_class if cfg.target_class is not None
              else int(np.argmax(p_anchor)))
    if not 0 <= target < bb.classes:
        raise ConfigError(f"target class {target} out of range")

    disc = build_ir(ds, ir, bb, cfg, target)
    anchor = Anchor.from_instance(x, disc)
    sampler = GaussianSampler.from_dataset(ds, cfg.scale, cfg.flip)
    samples = sample_and_bind(anchor, disc, sampler, cfg.n, rng)

    originals = np.asarray([s.original for s in samples], dtype=np.float64)
    bits = np.asarray([s.bits for s in samples], dtype=np.float64)
    probs = bb.predict(originals)
    if cfg.target_output == "proba":
        y = probs[:, target]
    else:
        y = (np.argmax(probs, axis=1) == target).astype(np.float64)

    if cfg.kind == "ols":
        if cfg.n < disc.schema.arity + 1:
            raise ConfigError(
                f"OLS needs at least arity+1 = {disc.schema.arity + 1} samples")
        weights = (hamming_weights(bits, cfg.kernel_width)
                   if cfg.kernel_width else None)
        concepts = tuple(disc.describe_bin(j, anchor.coords[j])
                         for j in range(disc.schema.arity))
        return fit_ols(bits, y, weights, concepts, target)

    surrogate_ds = TabularDataset(ds.schema, originals, NUMERIC, values=y)
    tree = fit_tree(surrogate_ds, "mse", cfg.tree_leaves, min_leaf=1)
    return TreeExplanation(tree, target)


def fit_surrogate_tree(originals, y, schema, max_leaves: int,
                       min_leaf: int = 1) -> TreePartition:
    """Fit a regression tree in the original domain on black-box outputs."""
    ds = TabularDataset(schema, np.asarray(originals, dtype=np.float64),
                        NUMERIC, values=np.asarray(y, dtype=np.float64))
    return fit_tree(ds, "mse", max_leaves, min_leaf)
