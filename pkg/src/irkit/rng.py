"""Deterministic random streams.

Every stochastic operation in irkit draws from an :class:`RngStream`, which is
a counter-based Philox generator keyed by hashing ``(master seed, path)``.
Streams with the same seed and path always replay the same value sequence;
streams whose paths differ are statistically independent, so work items can be
processed in any order (or in parallel) without changing results.
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def _derive_key(seed: int, path: tuple[str, ...]) -> np.ndarray:
    h = hashlib.blake2b(digest_size=16)
    h.update(int(seed & _MASK64).to_bytes(8, "little"))
    for label in path:
        h.update(b"/")
        h.update(label.encode("utf-8"))
    digest = h.digest()
    return np.frombuffer(digest, dtype=np.uint64)


class RngStream:
    """A seeded, named substream of randomness.

    The stream is stateful: successive draws advance it. Re-creating a stream
    with the same ``(seed, path)`` restarts the identical sequence.
    """

    def __init__(self, seed: int, path: tuple[str, ...] = ()):
        if not 0 <= int(seed) <= _MASK64:
            raise ValueError("seed must fit in 64 unsigned bits")
        self.seed = int(seed)
        self.path = tuple(str(p) for p in path)
        self._generator = None

    def child(self, *labels) -> "RngStream":
        """Derive an independent substream named by appending ``labels``."""
        return RngStream(self.seed, self.path + tuple(str(l) for l in labels))

    @property
    def generator(self) -> np.random.Generator:
        if self._generator is None:
            key = _derive_key(self.seed, self.path)
            self._generator = np.random.Generator(np.random.Philox(key=key))
        return self._generator

    # Convenience passthroughs for the common draw kinds.
    def uniform(self, low=0.0, high=1.0, size=None):
        return self.generator.uniform(low, high, size)

    def normal(self, loc=0.0, scale=1.0, size=None):
        return self.generator.normal(loc, scale, size)

    def integers(self, low, high=None, size=None):
        return self.generator.integers(low, high, size)

    def choice(self, a, size=None, replace=True, p=None):
        return self.generator.choice(a, size=size, replace=replace, p=p)

    def shuffle(self, x):
        self.generator.shuffle(x)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, path={'/'.join(self.path) or '<root>'})"
