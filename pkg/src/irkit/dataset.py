"""Tabular datasets: feature matrix, schema and target."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from irkit.errors import DomainError, ParseError, SchemaError, ShapeError
from irkit.schema import CATEGORICAL, NUMERICAL, FeatureSchema

LABEL = "label"
NUMERIC = "numeric"
PROBA = "proba"

_PROBA_TOL = 1e-9


@dataclass
class TabularDataset:
    """N rows conforming to a schema, plus one of three target kinds.

    * ``label``:  crisp class labels drawn from the class set.
    * ``numeric``: a real-valued regression target.
    * ``proba``:  per-class probability vectors (rows sum to 1).
    """

    schema: FeatureSchema
    rows: np.ndarray
    target_kind: str
    labels: np.ndarray | None = None
    values: np.ndarray | None = None
    probabilities: np.ndarray | None = None
    classes: tuple = ()
    _column_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.rows = np.asarray(self.rows)
        if self.rows.ndim != 2:
            raise ShapeError("rows must be a 2-D array")
        if self.rows.shape[1] != self.schema.arity:
            raise ShapeError(
                f"row arity {self.rows.shape[1]} != schema arity {self.schema.arity}"
            )
        for j, feat in enumerate(self.schema.features):
            if feat.kind == CATEGORICAL:
                allowed = set(feat.categories)
                bad = [v for v in self.rows[:, j] if v not in allowed]
                if bad:
                    raise DomainError(
                        f"value {bad[0]!r} not among categories of feature {feat.name!r}"
                    )

        if self.target_kind == LABEL:
            if self.labels is None:
                raise SchemaError("label target requires labels")
            self.labels = np.asarray(self.labels, dtype=object)
            if len(self.labels) != self.n_rows:
                raise ShapeError("label count != row count")
            if not self.classes:
                self.classes = tuple(sorted(set(self.labels), key=str))
            elif not set(self.labels) <= set(self.classes):
                raise DomainError("label outside declared class set")
        elif self.target_kind == NUMERIC:
            if self.values is None:
                raise SchemaError("numeric target requires values")
            self.values = np.asarray(self.values, dtype=np.float64)
            if len(self.values) != self.n_rows:
                raise ShapeError("target count != row count")
        elif self.target_kind == PROBA:
            if self.probabilities is None:
                raise SchemaError("proba target requires probabilities")
            p = np.asarray(self.probabilities, dtype=np.float64)
            if p.ndim != 2 or len(p) != self.n_rows:
                raise ShapeError("probability matrix must be (n_rows, n_classes)")
            if (p < -_PROBA_TOL).any() or (p > 1 + _PROBA_TOL).any():
                raise DomainError("probabilities must lie in [0, 1]")
            if np.abs(p.sum(axis=1) - 1.0).max() > _PROBA_TOL:
                raise DomainError("probability rows must sum to 1")
            self.probabilities = p
            if not self.classes:
                self.classes = tuple(range(p.shape[1]))
            elif len(self.classes) != p.shape[1]:
                raise ShapeError("class count != probability columns")
            # Crisp labels derived by argmax, ties toward the lowest class index.
            self.labels = np.asarray(
                [self.classes[i] for i in p.argmax(axis=1)], dtype=object
            )
        else:
            raise SchemaError(f"unknown target kind {self.target_kind!r}")

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]

    @property
    def arity(self) -> int:
        return self.schema.arity

    def column(self, j: int) -> np.ndarray:
        """Feature column j; numerical columns come back as float64."""
        if j not in self._column_cache:
            col = self.rows[:, j]
            if self.schema.is_numerical(j):
                col = col.astype(np.float64)
            self._column_cache[j] = col
        return self._column_cache[j]

    def numeric_matrix(self) -> np.ndarray:
        """Float64 matrix of the numerical columns (in schema order)."""
        idx = self.schema.numerical_indices
        out = np.empty((self.n_rows, len(idx)), dtype=np.float64)
        for k, j in enumerate(idx):
            out[:, k] = self.column(j)
        return out

    def label_codes(self) -> np.ndarray:
        """Labels encoded as int32 indices into ``classes``."""
        if self.labels is None:
            raise SchemaError("dataset has no crisp labels")
        lut = {c: i for i, c in enumerate(self.classes)}
        return np.asarray([lut[l] for l in self.labels], dtype=np.int32)

    def target_vector(self) -> np.ndarray:
        """Target as floats: numeric values, or (n, C) probabilities."""
        if self.target_kind == NUMERIC:
            return self.values
        if self.target_kind == PROBA:
            return self.probabilities
        raise SchemaError("crisp-label dataset has no numeric target")


def load_tabular_csv(path, schema: FeatureSchema, target_column: str,
                     target_kind: str = LABEL) -> TabularDataset:
    """Load a UTF-8, comma-separated, headered CSV into a dataset.

    The header must contain every schema feature plus ``target_column``; column
    order in the file is free. Numeric parsing always uses the decimal point.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        positions = {}
        for name in list(schema.names) + [target_column]:
            if name not in header:
                raise SchemaError(f"{path}: missing column {name!r}")
            positions[name] = header.index(name)

        rows, raw_target = [], []
        for r, record in enumerate(reader, start=2):  # 1-based incl. header
            row = []
            for j, feat in enumerate(schema.features):
                cell = record[positions[feat.name]]
                if feat.kind == NUMERICAL:
                    try:
                        row.append(float(cell))
                    except ValueError:
                        raise ParseError(
                            f"row {r}, column {feat.name!r}: cannot parse {cell!r} as a number",
                            row=r, column=feat.name) from None
                else:
                    if cell not in feat.categories:
                        raise DomainError(
                            f"row {r}, column {feat.name!r}: {cell!r} not a declared category")
                    row.append(cell)
            rows.append(row)
            raw_target.append(record[positions[target_column]])

    matrix = (np.asarray(rows, dtype=np.float64) if schema.all_numerical
              else np.asarray(rows, dtype=object))
    if matrix.size == 0:
        matrix = matrix.reshape(0, schema.arity)
    if target_kind == NUMERIC:
        try:
            values = np.asarray([float(v) for v in raw_target])
        except ValueError as e:
            raise ParseError(f"{path}: non-numeric target cell ({e})") from None
        return TabularDataset(schema, matrix, NUMERIC, values=values)
    if target_kind == LABEL:
        return TabularDataset(schema, matrix, LABEL, labels=np.asarray(raw_target, dtype=object))
    raise SchemaError(f"CSV ingestion supports label or numeric targets, not {target_kind!r}")
