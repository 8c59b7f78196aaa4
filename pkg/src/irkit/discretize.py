"""Discretization and anchor-relative binarization of tabular data.

Numerical features are cut into bins by strictly increasing edge lists; a
feature with k edges has k+1 bins. Bin membership is right-closed:

    bin 0 = (-inf, e0],   bin i = (e_{i-1}, e_i],   bin k = (e_k, +inf)

so a value equal to an edge falls in the lower bin. Categorical features keep
one bin per declared category. The binary representation of an instance marks,
per feature, whether it shares the explained instance's bin (1) or not (0);
the explained instance itself always encodes as the all-ones vector.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from irkit.dataset import TabularDataset
from irkit.errors import DomainError, ParameterError, SchemaError, ShapeError
from irkit.schema import FeatureSchema


@dataclass(frozen=True)
class Discretization:
    schema: FeatureSchema
    edges: tuple  # per feature: float64 edge array (numerical) or None (categorical)

    def __post_init__(self):
        if len(self.edges) != self.schema.arity:
            raise ShapeError("one edge list per schema feature required")
        norm = []
        for j, e in enumerate(self.edges):
            if not self.schema.is_numerical(j):
                norm.append(None)
                continue
            e = np.asarray(e, dtype=np.float64)
            if e.ndim != 1:
                raise ParameterError("edge lists must be 1-D")
            if len(e) > 1 and not (np.diff(e) > 0).all():
                raise ParameterError(
                    f"edges of feature {self.schema.names[j]!r} must strictly increase")
            norm.append(e)
        object.__setattr__(self, "edges", tuple(norm))

    def bin_count(self, j: int) -> int:
        if self.schema.is_numerical(j):
            return len(self.edges[j]) + 1
        return len(self.schema.features[j].categories)

    @property
    def bin_counts(self) -> tuple[int, ...]:
        return tuple(self.bin_count(j) for j in range(self.schema.arity))

    def bin_interval(self, j: int, b: int) -> tuple[float, float]:
        """Open/closed bounds (lo, hi] of a numerical bin; infinities on the outside."""
        if not self.schema.is_numerical(j):
            raise SchemaError("bin_interval applies to numerical features")
        e = self.edges[j]
        lo = -np.inf if b == 0 else float(e[b - 1])
        hi = np.inf if b == len(e) else float(e[b])
        return lo, hi

    def describe_bin(self, j: int, b: int) -> str:
        """Human-readable membership condition, e.g. ``40 < x2 <= 80``."""
        name = self.schema.names[j]
        if not self.schema.is_numerical(j):
            return f"{name} = {self.schema.features[j].categories[b]}"
        lo, hi = self.bin_interval(j, b)
        if lo == -np.inf and hi == np.inf:
            return f"any {name}"
        if lo == -np.inf:
            return f"{name} <= {hi:g}"
        if hi == np.inf:
            return f"{lo:g} < {name}"
        return f"{lo:g} < {name} <= {hi:g}"

    def to_json(self) -> str:
        payload = {}
        for j, feat in enumerate(self.schema.features):
            if self.schema.is_numerical(j):
                payload[feat.name] = [float(v) for v in self.edges[j]]
            else:
                payload[feat.name] = {"categories": list(feat.categories)}
        return json.dumps(payload, indent=2)

    @classmethod
    def from_json(cls, text: str, schema: FeatureSchema) -> "Discretization":
        payload = json.loads(text)
        edges = []
        for j, feat in enumerate(schema.features):
            if feat.name not in payload:
                raise SchemaError(f"serialized discretization lacks feature {feat.name!r}")
            edges.append(np.asarray(payload[feat.name], dtype=np.float64)
                         if schema.is_numerical(j) else None)
        return cls(schema, tuple(edges))


def quantile_edges(col: np.ndarray, q: int) -> np.ndarray:
    """Edges at the i/q quantiles (linear interpolation at h = (n-1)p).

    Duplicate edges collapse, and edges equal to the column maximum are
    dropped since their upper bin could never be populated; a constant column
    therefore yields no edges at all (a single bin).
    """
    col = np.asarray(col, dtype=np.float64)
    probs = [i / q for i in range(1, q)]
    edges = np.unique(np.quantile(col, probs))
    return edges[edges < col.max()]


def quantile_discretize(ds: TabularDataset, q: int) -> Discretization:
    if q < 2:
        raise ParameterError(f"q must be at least 2, got {q}")
    edges = []
    for j in range(ds.arity):
        edges.append(quantile_edges(ds.column(j), q) if ds.schema.is_numerical(j) else None)
    return Discretization(ds.schema, tuple(edges))


def _bin_of(value, edges: np.ndarray) -> int:
    # side='left': value == edge goes to the edge's own (lower) bin
    return int(np.searchsorted(edges, value, side="left"))


def discretize_instance(x, d: Discretization) -> np.ndarray:
    """Per-feature bin indices of one instance."""
    if len(x) != d.schema.arity:
        raise ShapeError(f"instance arity {len(x)} != schema arity {d.schema.arity}")
    coords = np.empty(d.schema.arity, dtype=np.int32)
    for j, feat in enumerate(d.schema.features):
        if d.schema.is_numerical(j):
            coords[j] = _bin_of(float(x[j]), d.edges[j])
        else:
            try:
                coords[j] = feat.categories.index(x[j])
            except ValueError:
                raise DomainError(
                    f"{x[j]!r} is not a category of feature {feat.name!r}") from None
    return coords


def discretize_rows(ds: TabularDataset, d: Discretization) -> np.ndarray:
    """Bin indices for every dataset row, shape (n_rows, arity)."""
    if ds.schema is not d.schema and ds.schema != d.schema:
        raise SchemaError("dataset and discretization schemas differ")
    out = np.empty((ds.n_rows, ds.arity), dtype=np.int32)
    for j, feat in enumerate(ds.schema.features):
        col = ds.column(j)
        if ds.schema.is_numerical(j):
            out[:, j] = np.searchsorted(d.edges[j], col, side="left")
        else:
            lut = {c: i for i, c in enumerate(feat.categories)}
            out[:, j] = [lut[v] for v in col]
    return out


@dataclass(frozen=True)
class Anchor:
    """The explained instance and its bin coordinates."""

    instance: tuple
    coords: tuple

    @classmethod
    def from_instance(cls, x, d: Discretization) -> "Anchor":
        return cls(tuple(x), tuple(int(c) for c in discretize_instance(x, d)))


def binarize(coords, anchor: Anchor) -> np.ndarray:
    """Per-feature same-bin-as-anchor bits (uint8)."""
    coords = np.asarray(coords)
    if coords.shape[-1] != len(anchor.coords):
        raise ShapeError(
            f"coordinate arity {coords.shape[-1]} != anchor arity {len(anchor.coords)}")
    return (coords == np.asarray(anchor.coords, dtype=coords.dtype)).astype(np.uint8)


def binarize_rows(coords_matrix: np.ndarray, anchor: Anchor) -> np.ndarray:
    return binarize(coords_matrix, anchor)


def count_encodings(ds: TabularDataset, d: Discretization,
                    anchor: Anchor | None = None) -> tuple[int, int]:
    """(used, theoretical) encoding counts over the dataset rows.

    Without an anchor, encodings are the discrete bin coordinates and the
    theoretical limit is the product of per-feature bin counts; with an
    anchor, encodings are binary vectors with limit 2**arity.
    """
    coords = discretize_rows(ds, d)
    if anchor is None:
        used = len(set(map(tuple, coords)))
        theoretical = 1
        for j in range(ds.arity):
            theoretical *= d.bin_count(j)
        return used, theoretical
    bits = binarize_rows(coords, anchor)
    used = len(set(map(tuple, bits)))
    return used, 2 ** ds.arity
