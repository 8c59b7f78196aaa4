"""Superpixel segmentation and occlusion rendering.

Segmentation is plain k-means in a 5-D space of raw RGB channels plus spatial
coordinates scaled by compactness/S (S being the expected grid interval), with
centers seeded on a regular grid. A post-pass merges stray connected
components into their largest adjacent segment so every segment ends up
4-connected and non-empty; the final count never exceeds the request.

Occlusion replaces the pixels of switched-off segments with a colour chosen by
strategy: one of six fixed colours, the segment's mean colour, or a colour
drawn uniformly at random per segment.
"""

from __future__ import annotations

import base64
import io
import json
import math
from dataclasses import dataclass

import numpy as np
from PIL import Image as PILImage
from scipy import ndimage

from irkit.errors import ParameterError, ShapeError
from irkit.kernels import slic_assign, slic_update
from irkit.rng import RngStream

OCCLUSION_COLOURS = {
    "black": (0, 0, 0),
    "white": (255, 255, 255),
    "red": (255, 0, 0),
    "green": (0, 255, 0),
    "blue": (0, 0, 255),
    "pink": (255, 192, 203),
}

STRATEGIES = ("black", "white", "red", "green", "blue", "pink", "mean", "random")

_CONN4 = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


def _check_image(img) -> np.ndarray:
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[2] != 3 or img.dtype != np.uint8:
        raise ShapeError("images must be uint8 arrays of shape (H, W, 3)")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise ShapeError("images must have positive dimensions")
    return img


def load_png(path) -> np.ndarray:
    with PILImage.open(path) as im:
        return np.asarray(im.convert("RGB")).copy()


def save_png(img, path) -> None:
    PILImage.fromarray(_check_image(img), "RGB").save(path, format="PNG")


def image_to_png_b64(img) -> str:
    buf = io.BytesIO()
    PILImage.fromarray(_check_image(img), "RGB").save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


def png_b64_to_image(data: str) -> np.ndarray:
    with PILImage.open(io.BytesIO(base64.b64decode(data))) as im:
        return np.asarray(im.convert("RGB")).copy()


def resize_image(img, size: int = 256) -> np.ndarray:
    """Resize to size x size: nearest neighbour on exact divisors, else bilinear."""
    img = _check_image(img)
    h, w = img.shape[:2]
    if (h, w) == (size, size):
        return img
    exact = (h % size == 0 and w % size == 0) or (size % h == 0 and size % w == 0)
    method = PILImage.NEAREST if exact else PILImage.BILINEAR
    out = PILImage.fromarray(img, "RGB").resize((size, size), method)
    return np.asarray(out).copy()


@dataclass
class Segmentation:
    labels: np.ndarray  # (H, W) int32, values 0..n_segments-1
    n_segments: int

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels.ravel(), minlength=self.n_segments)

    def mask(self, segment_id: int) -> np.ndarray:
        if not 0 <= segment_id < self.n_segments:
            raise ParameterError(f"segment id {segment_id} out of range")
        return self.labels == segment_id

    def sizes_json(self) -> str:
        return json.dumps({str(s): int(c) for s, c in enumerate(self.sizes)})

    def to_label_png(self, path) -> None:
        if self.n_segments > 256:
            raise ParameterError("label-map PNG export supports at most 256 segments")
        PILImage.fromarray(self.labels.astype(np.uint8), "L").save(path, format="PNG")


def _grid_centers(h: int, w: int, n: int) -> list[tuple[int, int]]:
    ny = max(1, min(n, round(math.sqrt(n * h / w))))
    nx = max(1, n // ny)
    centers = []
    for gy in range(ny):
        cy = min(h - 1, int((gy + 0.5) * h / ny))
        for gx in range(nx):
            cx = min(w - 1, int((gx + 0.5) * w / nx))
            centers.append((cy, cx))
    return centers


def slic_segment(img, n_segments: int, compactness: float = 10.0,
                 iterations: int = 10, rng: RngStream | None = None) -> Segmentation:
    """Segment an RGB image into at most ``n_segments`` connected superpixels.

    ``rng`` is accepted for interface symmetry with other operations; the
    procedure itself is deterministic (grid initialization, fixed iterations).
    """
    img = _check_image(img)
    h, w = img.shape[:2]
    if n_segments < 1:
        raise ParameterError("n_segments must be at least 1")
    if n_segments > h * w:
        raise ParameterError(f"n_segments={n_segments} exceeds pixel count {h * w}")
    if compactness <= 0:
        raise ParameterError("compactness must be positive")

    interval = math.sqrt(h * w / n_segments)
    ratio = compactness / interval
    p = h * w
    feats = np.empty((p, 5), dtype=np.float64)
    feats[:, :3] = img.reshape(p, 3).astype(np.float64)
    feats[:, 3] = np.tile(np.arange(w, dtype=np.float64), h) * ratio
    feats[:, 4] = np.repeat(np.arange(h, dtype=np.float64), w) * ratio

    seeds = _grid_centers(h, w, n_segments)
    centers = np.stack([feats[cy * w + cx] for cy, cx in seeds])
    k = len(centers)

    labels = None
    for _ in range(max(1, iterations)):
        labels = slic_assign(feats, centers)
        sums, counts = slic_update(feats, labels, k)
        occupied = counts > 0
        centers = centers.copy()
        centers[occupied] = sums[occupied] / counts[occupied, None]

    grid = labels.reshape(h, w).astype(np.int32)
    grid = _enforce_connectivity(grid)
    return Segmentation(grid, int(grid.max()) + 1)


def _enforce_connectivity(grid: np.ndarray) -> np.ndarray:
    """Merge every non-largest connected component into its biggest neighbour.

    One merge per pass, smallest orphan first; the orphan count strictly
    decreases, so the loop terminates with all segments 4-connected.
    """
    grid = grid.copy()
    while True:
        orphan = _smallest_orphan(grid)
        if orphan is None:
            break
        mask = orphan
        border = ndimage.binary_dilation(mask, structure=_CONN4) & ~mask
        neighbours = np.unique(grid[border])
        sizes = np.bincount(grid.ravel())
        # largest adjacent segment wins; ties resolve to the lowest label
        target = max(neighbours, key=lambda s: (sizes[s], -s))
        grid[mask] = target

    # compact ids, ordered by first appearance in row-major scan
    flat = grid.ravel()
    _, first = np.unique(flat, return_index=True)
    order = flat[np.sort(first)]
    remap = np.full(flat.max() + 1, -1, dtype=np.int32)
    remap[order] = np.arange(len(order), dtype=np.int32)
    return remap[grid]


def _smallest_orphan(grid: np.ndarray):
    best = None
    for s in np.unique(grid):
        comp, n_comp = ndimage.label(grid == s, structure=_CONN4)
        if n_comp <= 1:
            continue
        comp_sizes = np.bincount(comp.ravel())[1:]
        keep = int(np.argmax(comp_sizes)) + 1  # largest component stays
        for c in range(1, n_comp + 1):
            if c == keep:
                continue
            size = int(comp_sizes[c - 1])
            if best is None or size < best[0]:
                best = (size, comp == c)
    return None if best is None else best[1]


def occlusion_color(img, seg: Segmentation, segment_id: int, strategy: str,
                    rng: RngStream | None = None) -> tuple[int, int, int]:
    """The RGB triple a strategy would paint over one segment."""
    if strategy in OCCLUSION_COLOURS:
        return OCCLUSION_COLOURS[strategy]
    if strategy == "mean":
        img = _check_image(img)
        pixels = img[seg.mask(segment_id)].astype(np.float64)
        mean = np.floor(pixels.mean(axis=0) + 0.5)  # round half-up
        return tuple(int(v) for v in mean)
    if strategy == "random":
        if rng is None:
            raise ParameterError("the random strategy needs an RngStream")
        return tuple(int(v) for v in rng.integers(0, 256, 3))
    raise ParameterError(f"unknown occlusion strategy {strategy!r}")


def occlude(img, seg: Segmentation, keep, strategy: str,
            rng: RngStream | None = None) -> np.ndarray:
    """Render a binary keep-vector: 1-bits stay, 0-bits get painted over."""
    img = _check_image(img)
    keep = np.asarray(keep)
    if len(keep) != seg.n_segments:
        raise ShapeError(
            f"keep vector length {len(keep)} != segment count {seg.n_segments}")
    out = img.copy()
    for s in range(seg.n_segments):
        if keep[s]:
            continue
        out[seg.mask(s)] = occlusion_color(img, seg, s, strategy, rng)
    return out
