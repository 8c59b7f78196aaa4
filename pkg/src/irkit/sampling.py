"""Moving between the binary representation and the original domain.

Two routes exist. ``inverse_transform`` realizes a binary vector as a concrete
instance by picking, for every 0-bit, one of the non-anchor bins at random and
drawing a value inside it; this is inherently random because the forward map
is many-to-one. ``sample_and_bind`` avoids the inverse entirely: it samples in
the original domain around the anchor and stores every instance together with
its discrete and binary views, so all three stay mutually consistent.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from irkit.cells import CellStats
from irkit.dataset import TabularDataset
from irkit.discretize import Anchor, Discretization, binarize, discretize_instance
from irkit.errors import InfeasibleError, ParameterError, ShapeError
from irkit.rng import RngStream

_REJECTION_CAP = 100


def _sample_in_bin(lo: float, hi: float, mean: float, std: float,
                   rng: RngStream) -> float:
    """Draw v with lo < v <= hi from a truncated Gaussian.

    Rejection sampling is capped; the fallback draws uniformly inside the bin
    (a 4-sigma window substitutes for an unbounded side). The returned value is
    always a member of the bin.
    """
    g = rng.generator
    for _ in range(_REJECTION_CAP):
        v = float(g.normal(mean, std))
        if lo < v <= hi:
            return v
    span = 4.0 * std if std > 0 else 1.0
    ulo = lo if np.isfinite(lo) else (hi - span if np.isfinite(hi) else mean - span)
    uhi = hi if np.isfinite(hi) else (lo + span if np.isfinite(lo) else mean + span)
    if uhi <= ulo:
        uhi = ulo + span
    # u in [0, 1) maps onto (ulo, uhi], keeping the closed upper end reachable
    v = uhi - (uhi - ulo) * float(g.uniform())
    if lo < v <= hi:
        return v
    if np.isfinite(hi):
        return hi
    return float(np.nextafter(lo, np.inf))


def inverse_transform(bits, anchor: Anchor, d: Discretization, stats: CellStats,
                      rng: RngStream, off_bin_weighting: str = "uniform"):
    """Realize a binary vector as an instance consistent with it.

    1-bits reproduce the anchor's bin; 0-bits choose one of the remaining bins
    (uniformly by default, or proportionally to training mass with
    ``off_bin_weighting="mass"``) and draw a value from that bin's truncated
    Gaussian. Guarantees ``binarize(discretize_instance(result), anchor) == bits``.
    """
    bits = np.asarray(bits)
    if len(bits) != d.schema.arity:
        raise ShapeError(f"binary arity {len(bits)} != schema arity {d.schema.arity}")
    if off_bin_weighting not in ("uniform", "mass"):
        raise ParameterError(f"unknown off-bin weighting {off_bin_weighting!r}")
    g = rng.generator
    out = []
    for j, feat in enumerate(d.schema.features):
        anchor_bin = anchor.coords[j]
        if bits[j]:
            b = anchor_bin
        else:
            candidates = [c for c in range(d.bin_count(j)) if c != anchor_bin]
            if not candidates:
                raise InfeasibleError(
                    f"feature {feat.name!r} has a single bin; its bit cannot be 0")
            if off_bin_weighting == "mass" and stats.feature_bin_stats:
                mass = np.asarray(
                    [stats.feature_bin_stats[j].get(c, (0, 0.0, 0.0))[0]
                     for c in candidates], dtype=np.float64)
                if mass.sum() > 0:
                    b = candidates[int(g.choice(len(candidates), p=mass / mass.sum()))]
                else:
                    b = candidates[int(g.integers(len(candidates)))]
            else:
                b = candidates[int(g.integers(len(candidates)))]
        if d.schema.is_numerical(j):
            lo, hi = d.bin_interval(j, b)
            mean, std = stats.bin_gaussian(j, b)
            out.append(_sample_in_bin(lo, hi, mean, std, rng))
        else:
            out.append(feat.categories[b])
    return tuple(out)


@dataclass(frozen=True)
class GaussianSampler:
    """Original-domain sampler centred on an anchor.

    Numerical features get independent Gaussian noise with standard deviation
    ``scale`` times the training std; categorical features are re-drawn from
    their empirical frequencies with probability ``flip``.
    """

    scale: float
    flip: float
    feature_stds: tuple          # per feature: float or None (categorical)
    category_freqs: tuple        # per feature: np.ndarray of proportions or None

    @classmethod
    def from_dataset(cls, ds: TabularDataset, scale: float = 1.0,
                     flip: float = 0.1) -> "GaussianSampler":
        stds, freqs = [], []
        for j, feat in enumerate(ds.schema.features):
            if ds.schema.is_numerical(j):
                col = ds.column(j)
                stds.append(float(np.sqrt(np.mean((col - col.mean()) ** 2))))
                freqs.append(None)
            else:
                stds.append(None)
                counts = np.asarray(
                    [np.sum(ds.rows[:, j] == c) for c in feat.categories],
                    dtype=np.float64)
                total = counts.sum()
                freqs.append(counts / total if total else
                             np.full(len(feat.categories), 1.0 / len(feat.categories)))
        return cls(scale, flip, tuple(stds), tuple(freqs))


@dataclass(frozen=True)
class BoundSample:
    """One instance carried in all three representations at once."""

    original: tuple
    coords: tuple
    bits: tuple


def sample_and_bind(anchor: Anchor, d: Discretization, sampler: GaussianSampler,
                    n: int, rng: RngStream) -> list[BoundSample]:
    """Draw n instances around the anchor and bind their three views."""
    if n < 1:
        raise ParameterError("sample count must be at least 1")
    g = rng.generator
    columns = []
    for j, feat in enumerate(d.schema.features):
        if d.schema.is_numerical(j):
            z = g.normal(0.0, 1.0, n)
            columns.append(float(anchor.instance[j]) +
                           sampler.scale * sampler.feature_stds[j] * z)
        else:
            flips = g.uniform(size=n) < sampler.flip
            drawn = g.choice(len(feat.categories), size=n, p=sampler.category_freqs[j])
            col = np.asarray([anchor.instance[j]] * n, dtype=object)
            col[flips] = np.asarray(feat.categories, dtype=object)[drawn[flips]]
            columns.append(col)

    samples = []
    for i in range(n):
        original = tuple(col[i] for col in columns)
        coords = tuple(int(c) for c in discretize_instance(original, d))
        bits = tuple(int(b) for b in binarize(np.asarray(coords), anchor))
        samples.append(BoundSample(original, coords, bits))
    return samples


def bound_samples_to_csv(samples: list[BoundSample], path, schema) -> None:
    """Write bound samples with orig_*, disc_* and bin_* column groups."""
    names = schema.names
    header = ([f"orig_{n}" for n in names] + [f"disc_{n}" for n in names]
              + [f"bin_{n}" for n in names])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for s in samples:
            orig = [repr(v) if isinstance(v, float) else str(v) for v in s.original]
            writer.writerow(orig + [str(c) for c in s.coords] + [str(b) for b in s.bits])
