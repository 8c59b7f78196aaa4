#!/usr/bin/env python3
"""Fetch and verify the benchmark datasets into the irkit cache.

The toolkit never downloads anything implicitly; this script is the explicit
path. Wine, breast-cancer and diabetes are re-exported from scikit-learn's
bundled copies when scikit-learn is installed (no network needed). Boston
housing is downloaded from the canonical archive and validated structurally
(506 rows x 14 columns, spot-checked landmark values) before being written.

Every file written is checked against the pinned SHA-256 of the bundled
package data when a pin exists; the cache manifest records the checksum of
whatever was stored so later loads can verify integrity.

Usage: python scripts/fetch_datasets.py [--cache DIR] [names...]
"""

import argparse
import hashlib
import json
import sys
import urllib.request
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from irkit.datasets import BUNDLED_SHA256, REGISTRY, cache_dir  # noqa: E402

HOUSING_URLS = (
    "https://archive.ics.uci.edu/ml/machine-learning-databases/housing/housing.data",
    "http://lib.stat.cmu.edu/datasets/boston",
)
HOUSING_COLUMNS = ["crim", "zn", "indus", "chas", "nox", "rm", "age", "dis",
                   "rad", "tax", "ptratio", "b", "lstat", "medv"]


def _fmt(v: float) -> str:
    return repr(int(v)) if v == int(v) and abs(v) < 1e15 else repr(v)


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def export_sklearn(name: str, dest: Path) -> None:
    from sklearn.datasets import load_breast_cancer, load_diabetes, load_wine

    if name == "wine":
        data = load_wine()
        names = [n.replace("/", "_") for n in data.feature_names]
        target = [str(int(t)) for t in data.target]
    elif name == "cancer":
        data = load_breast_cancer()
        names = [n.replace(" ", "_") for n in data.feature_names]
        target = [str(int(t)) for t in data.target]
    elif name == "diabetes":
        data = load_diabetes(scaled=False)
        names = list(data.feature_names)
        target = [_fmt(float(t)) for t in data.target]
    else:
        raise ValueError(name)
    spec = REGISTRY[name]
    with open(dest, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(names + [spec.target_column]) + "\n")
        for row, t in zip(data.data, target):
            fh.write(",".join(_fmt(float(v)) for v in row) + "," + t + "\n")


def validate_housing(rows: list) -> None:
    assert len(rows) == 506, f"expected 506 rows, got {len(rows)}"
    assert all(len(r) == 14 for r in rows), "expected 14 columns per row"
    medv = [r[13] for r in rows]
    assert min(medv) == 5.0 and max(medv) == 50.0, "MEDV range check failed"
    assert abs(rows[0][0] - 0.00632) < 1e-9, "first CRIM value check failed"
    assert sum(r[3] for r in rows) == 35, "CHAS sum check failed"


def fetch_housing(dest: Path) -> None:
    last_error = None
    for url in HOUSING_URLS:
        try:
            with urllib.request.urlopen(url, timeout=60) as resp:
                text = resp.read().decode("utf-8")
            break
        except OSError as e:
            last_error = e
    else:
        raise SystemExit(f"could not download housing data: {last_error}")

    rows = []
    for line in text.splitlines():
        parts = line.split()
        if len(parts) == 14:
            rows.append([float(v) for v in parts])
        elif rows and len(parts) + len(rows[-1]) == 14:
            rows[-1].extend(float(v) for v in parts)  # wrapped lines
    validate_housing(rows)
    with open(dest, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(HOUSING_COLUMNS) + "\n")
        for r in rows:
            fh.write(",".join(_fmt(v) for v in r) + "\n")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("names", nargs="*", default=[],
                        help="datasets to fetch (default: all)")
    parser.add_argument("--cache", help="cache directory (default $IRKIT_CACHE)")
    args = parser.parse_args()

    dest_dir = Path(args.cache) if args.cache else cache_dir()
    dest_dir.mkdir(parents=True, exist_ok=True)
    names = args.names or sorted(REGISTRY)
    manifest_path = dest_dir / "checksums.json"
    manifest = json.loads(manifest_path.read_text()) if manifest_path.exists() else {}

    for name in names:
        spec = REGISTRY[name]
        dest = dest_dir / spec.filename
        if name == "housing":
            fetch_housing(dest)
        else:
            export_sklearn(name, dest)
        digest = _sha256(dest)
        pinned = BUNDLED_SHA256.get(spec.filename)
        if pinned and digest != pinned:
            print(f"WARNING: {spec.filename} sha256 {digest} differs from the "
                  f"bundled pin {pinned}; upstream file may have changed")
        manifest[spec.filename] = digest
        print(f"{name}: wrote {dest} (sha256 {digest})")

    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
