import sys
from pathlib import Path

import numpy as np
import pytest

from irkit.dataset import LABEL, NUMERIC, TabularDataset
from irkit.schema import FeatureSchema

TESTS_DIR = Path(__file__).resolve().parent

CHILD = [sys.executable, str(TESTS_DIR / "child_models.py")]


def numeric_dataset(rows, target, kind=NUMERIC, names=None, classes=()):
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim == 1:
        rows = rows[:, None]
    schema = FeatureSchema.numeric(names or [f"x{j}" for j in range(rows.shape[1])])
    if kind == LABEL:
        return TabularDataset(schema, rows, LABEL,
                              labels=np.asarray(target, dtype=object), classes=classes)
    return TabularDataset(schema, rows, NUMERIC,
                          values=np.asarray(target, dtype=np.float64))


@pytest.fixture
def one_feature_dataset():
    """8 values 1..8 with a threshold label at x >= 5."""
    rows = np.arange(1.0, 9.0)
    labels = ["lo"] * 4 + ["hi"] * 4
    return numeric_dataset(rows, labels, kind=LABEL)


def random_label_dataset(rng, n=30, d=3, n_classes=3):
    rows = rng.normal(size=(n, d))
    labels = rng.integers(0, n_classes, n)
    return numeric_dataset(rows, [f"c{v}" for v in labels], kind=LABEL)
