"""Black-box prediction backends.

Builtin synthetic models have known decision boundaries so representation
faithfulness can be verified exactly; the external backend speaks the wire
protocol of :mod:`irkit.wire` to any user-supplied model (e.g. a CNN).
Every backend returns a row-stochastic probability matrix.
"""

from __future__ import annotations

import shlex

import numpy as np

from irkit.dataset import TabularDataset
from irkit.errors import ParameterError, ProtocolError, ShapeError
from irkit.image import image_to_png_b64
from irkit.wire import WireClient

_ROW_SUM_TOL = 1e-6


class BlackBox:
    """Common validation wrapper; subclasses implement ``_predict``."""

    mode = "tabular"
    arity: int | None = None  # tabular feature count; None means any
    classes: int = 2

    def predict(self, batch) -> np.ndarray:
        if self.mode == "tabular":
            batch = np.asarray(batch, dtype=np.float64)
            if batch.ndim == 1:
                batch = batch[None, :]
            if self.arity is not None and batch.shape[1] != self.arity:
                raise ShapeError(
                    f"instance arity {batch.shape[1]} != model arity {self.arity}")
        out = np.asarray(self._predict(batch), dtype=np.float64)
        if out.shape != (len(batch), self.classes):
            raise ProtocolError(
                f"prediction shape {out.shape} != ({len(batch)}, {self.classes})")
        if np.abs(out.sum(axis=1) - 1.0).max() > _ROW_SUM_TOL:
            raise ProtocolError("probability rows must sum to 1")
        return out

    def _predict(self, batch):
        raise NotImplementedError


class HalfplaneModel(BlackBox):
    """Class 1 iff x_j >= threshold, with fixed confidence."""

    def __init__(self, threshold: float = 0.5, feature: int = 0,
                 arity: int = 1, confidence: float = 0.99):
        self.threshold = threshold
        self.feature = feature
        self.arity = arity
        self.confidence = confidence

    def _predict(self, batch):
        hi = (batch[:, self.feature] >= self.threshold).astype(np.float64)
        p1 = np.where(hi, self.confidence, 1.0 - self.confidence)
        return np.stack([1.0 - p1, p1], axis=1)


class CheckerboardModel(BlackBox):
    """Class = parity of the k x k grid cell of (x0, x1)."""

    def __init__(self, k: int = 2, confidence: float = 0.99):
        if k < 1:
            raise ParameterError("checkerboard k must be at least 1")
        self.k = k
        self.arity = 2
        self.confidence = confidence

    def _predict(self, batch):
        cell = np.floor(batch[:, 0] * self.k) + np.floor(batch[:, 1] * self.k)
        odd = (cell.astype(np.int64) % 2) != 0
        p1 = np.where(odd, self.confidence, 1.0 - self.confidence)
        return np.stack([1.0 - p1, p1], axis=1)


class BandModel(BlackBox):
    """Class 1 iff low <= x_j < high."""

    def __init__(self, low: float, high: float, feature: int = 0,
                 arity: int = 1, confidence: float = 0.99):
        if not low < high:
            raise ParameterError("band requires low < high")
        self.low = low
        self.high = high
        self.feature = feature
        self.arity = arity
        self.confidence = confidence

    def _predict(self, batch):
        col = batch[:, self.feature]
        inside = (col >= self.low) & (col < self.high)
        p1 = np.where(inside, self.confidence, 1.0 - self.confidence)
        return np.stack([1.0 - p1, p1], axis=1)


class ColourMassModel(BlackBox):
    """Image model: P(class 1) = mean red-channel intensity / 255."""

    mode = "image"

    def _predict(self, batch):
        rows = []
        for img in batch:
            img = np.asarray(img)
            p1 = float(img[..., 0].astype(np.float64).mean()) / 255.0
            rows.append([1.0 - p1, p1])
        return rows


class NearestNeighborModel(BlackBox):
    """Lookup oracle over a labelled dataset: one-hot of the nearest row's label.

    Not a trained model; it exists so real datasets can be explained without
    shipping a classifier. Distances are Euclidean over numerical features.
    """

    def __init__(self, ds: TabularDataset):
        if ds.labels is None:
            raise ParameterError("nearest-neighbour oracle needs crisp labels")
        self._matrix = ds.numeric_matrix()
        self._codes = ds.label_codes()
        self.classes = len(ds.classes)
        self.class_values = ds.classes
        self.arity = ds.arity
        if not ds.schema.all_numerical:
            raise ParameterError("nearest-neighbour oracle supports numerical schemas")

    def _predict(self, batch):
        out = np.zeros((len(batch), self.classes))
        for i, x in enumerate(np.asarray(batch, dtype=np.float64)):
            d = ((self._matrix - x) ** 2).sum(axis=1)
            out[i, self._codes[int(np.argmin(d))]] = 1.0
        return out


class ExternalProcessModel(BlackBox):
    """Backend over the wire protocol; see :mod:`irkit.wire`."""

    def __init__(self, argv, mode: str = "tabular", timeout: float = 30.0,
                 arity: int | None = None):
        if isinstance(argv, str):
            argv = shlex.split(argv)
        if mode not in ("tabular", "image"):
            raise ParameterError(f"mode must be tabular or image, not {mode!r}")
        self.mode = mode
        self.arity = arity
        self._client = WireClient(argv, timeout=timeout)
        self.classes = self._client.classes

    def _predict(self, batch):
        if self.mode == "tabular":
            instances = [[float(v) for v in row] for row in batch]
        else:
            instances = [image_to_png_b64(img) for img in batch]
        return self._client.request(self.mode, instances)

    def close(self):
        self._client.close()


def make_blackbox(spec: str, dataset: TabularDataset | None = None,
                  mode: str = "tabular", timeout: float = 30.0) -> BlackBox:
    """Build a backend from a CLI-style handle.

    ``builtin:<name>[:args]`` selects a synthetic model (halfplane,
    checkerboard:k, band:low:high, colour-mass, nn); anything else is treated
    as the command line of an external wire-protocol backend.
    """
    if spec.startswith("builtin:"):
        parts = spec.split(":")[1:]
        name, args = parts[0], parts[1:]
        if name == "halfplane":
            return HalfplaneModel(threshold=float(args[0]) if args else 0.5)
        if name == "checkerboard":
            return CheckerboardModel(k=int(args[0]) if args else 2)
        if name == "band":
            if len(args) < 2:
                raise ParameterError("band needs low and high, e.g. builtin:band:0.3:0.7")
            return BandModel(float(args[0]), float(args[1]))
        if name in ("colour-mass", "color-mass"):
            return ColourMassModel()
        if name == "nn":
            if dataset is None:
                raise ParameterError("builtin:nn needs a dataset")
            return NearestNeighborModel(dataset)
        raise ParameterError(f"unknown builtin model {name!r}")
    return ExternalProcessModel(spec, mode=mode, timeout=timeout)
