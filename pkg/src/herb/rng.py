"""Splittable, reproducible random number generation.

Every stochastic step in the package (weight init, dropout, splits,
negative sampling) draws from its own named child of one root seed, so
a trajectory is reproducible from a single integer and independent of
how many draws the other streams made.

Built on numpy's counter-based Philox generator; children are derived
through SeedSequence spawn keys, so split(a) and split(b) are
statistically independent streams for a != b.
"""

from __future__ import annotations

import numpy as np

# Canonical stream indices used by the package.
STREAM_INIT = 0
STREAM_DROPOUT = 1
STREAM_SPLITS = 2
STREAM_NEGATIVES = 3
STREAM_DATA = 4
STREAM_ENCODER_STRUCTURE = 5
STREAM_ENCODER_FEATURES = 6


class Rng:
    """A seeded generator addressable by a path of split indices."""

    def __init__(self, seed: int, path: tuple[int, ...] = ()):
        self.seed = int(seed)
        self.path = tuple(int(p) for p in path)
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=self.path)
        self.gen = np.random.Generator(np.random.Philox(seq))

    def split(self, index: int) -> "Rng":
        """Derive an independent child stream; does not disturb this one."""
        return Rng(self.seed, self.path + (index,))

    # Thin pass-throughs so call sites read like plain numpy.
    def uniform(self, low=0.0, high=1.0, size=None):
        return self.gen.uniform(low, high, size)

    def integers(self, low, high=None, size=None):
        return self.gen.integers(low, high, size=size)

    def permutation(self, x):
        return self.gen.permutation(x)

    def choice(self, a, size=None, replace=True):
        return self.gen.choice(a, size=size, replace=replace)

    def glorot_uniform(self, fan_in: int, fan_out: int) -> np.ndarray:
        """Glorot/Xavier-uniform weight matrix of shape (fan_in, fan_out)."""
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        return self.gen.uniform(-limit, limit, size=(fan_in, fan_out))
