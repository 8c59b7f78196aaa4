"""Named benchmark datasets.

Four classic UCI/NCSU tables are bundled as CSVs with pinned SHA-256
checksums: wine and breast-cancer diagnostics (classification), Boston
housing and diabetes (regression). ``load_dataset`` reads the bundled copy,
or a copy in the cache directory ($IRKIT_CACHE, default ~/.cache/irkit) if
the package data was stripped. Nothing is ever downloaded implicitly; see
scripts/fetch_datasets.py for explicit, checksum-verified fetching.
"""

from __future__ import annotations

import csv
import hashlib
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from irkit.dataset import LABEL, NUMERIC, TabularDataset, load_tabular_csv
from irkit.errors import DatasetError
from irkit.schema import FeatureSchema

BUNDLED_SHA256 = {
    "wine.csv": "f31eca90e60d109d79f7a515b95eeab05cedd3ed9af21ebe3da3133a24c34af0",
    "cancer.csv": "1f573a6153eb57b183b3bb3e49cc79e0f37e5e105d8337f9c7eb75b5fb04d347",
    "diabetes.csv": "2d9516499b8b56e76cf361824b4608b0bef572b03e561ba3410ca4b4ce37b5d4",
    "housing.csv": "24ec814c9b6c5bb1cae0f6d203636413195ade13a34b62920787599f63eefd7e",
}


@dataclass(frozen=True)
class DatasetSpec:
    name: str
    filename: str
    target_column: str
    target_kind: str
    metric: str  # purity metric matching the task: gini or mse


REGISTRY = {
    "wine": DatasetSpec("wine", "wine.csv", "class", LABEL, "gini"),
    "cancer": DatasetSpec("cancer", "cancer.csv", "diagnosis", LABEL, "gini"),
    "housing": DatasetSpec("housing", "housing.csv", "medv", NUMERIC, "mse"),
    "diabetes": DatasetSpec("diabetes", "diabetes.csv", "progression", NUMERIC, "mse"),
}


def cache_dir() -> Path:
    env = os.environ.get("IRKIT_CACHE")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "irkit"


def dataset_path(name: str) -> Path:
    """Resolve a dataset file: bundled package data first, then the cache."""
    if name not in REGISTRY:
        raise DatasetError(
            f"unknown dataset {name!r}; known: {', '.join(sorted(REGISTRY))}")
    spec = REGISTRY[name]
    bundled = resources.files("irkit").joinpath("data", spec.filename)
    try:
        with resources.as_file(bundled) as p:
            if p.is_file():
                return Path(p)
    except (FileNotFoundError, ModuleNotFoundError):
        pass
    cached = cache_dir() / spec.filename
    if cached.is_file():
        return cached
    raise DatasetError(
        f"dataset {name!r} not found; run scripts/fetch_datasets.py "
        f"or place {spec.filename} under {cache_dir()}")


def verify_checksum(path: Path, filename: str) -> None:
    digest = hashlib.sha256(path.read_bytes()).hexdigest()
    expected = BUNDLED_SHA256[filename]
    if digest != expected:
        raise DatasetError(
            f"{path} failed its integrity check "
            f"(sha256 {digest}, expected {expected})")


def schema_from_header(path: Path, target_column: str) -> FeatureSchema:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        header = next(csv.reader(fh))
    names = [h for h in header if h != target_column]
    return FeatureSchema.numeric(names)


def load_dataset(name: str, verify: bool = True) -> TabularDataset:
    spec = REGISTRY.get(name)
    if spec is None:
        raise DatasetError(
            f"unknown dataset {name!r}; known: {', '.join(sorted(REGISTRY))}")
    path = dataset_path(name)
    if verify:
        verify_checksum(path, spec.filename)
    schema = schema_from_header(path, spec.target_column)
    return load_tabular_csv(path, schema, spec.target_column, spec.target_kind)


def dataset_metric(name: str) -> str:
    if name not in REGISTRY:
        raise DatasetError(f"unknown dataset {name!r}")
    return REGISTRY[name].metric
