"""Pairwise node similarity from normalized embeddings.

Embeddings are min-max scaled over the whole matrix (a smoothing term
keeps constant matrices finite), then node-pair similarity is the inner
product of embedding rows. Three matrices are built: structural,
feature, and the similarity of the concatenated embedding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ShapeError

DEFAULT_SIGMA = 1e-6


@dataclass
class SimilarityBundle:
    """Symmetric nonnegative n-by-n similarity matrices."""

    s_str: np.ndarray
    s_fea: np.ndarray
    s_sf: np.ndarray


def minmax_normalize(z: np.ndarray, sigma: float = DEFAULT_SIGMA) -> np.ndarray:
    """Whole-matrix min-max scaling into [0, 1)."""
    if sigma <= 0:
        raise ConfigError(f"sigma must be positive, got {sigma}")
    z = np.asarray(z, dtype=np.float64)
    lo, hi = z.min(), z.max()
    return (z - lo) / (hi - lo + sigma)


def pairwise_similarity(z_normalized: np.ndarray) -> np.ndarray:
    """Inner products of embedding rows; symmetrized exactly."""
    z = np.asarray(z_normalized, dtype=np.float64)
    s = z @ z.T
    return (s + s.T) / 2.0


def build_bundle(z_str: np.ndarray, z_fea: np.ndarray, sigma: float = DEFAULT_SIGMA) -> SimilarityBundle:
    """Normalize each embedding (and their concatenation) and compare rows."""
    z_str = np.asarray(z_str, dtype=np.float64)
    z_fea = np.asarray(z_fea, dtype=np.float64)
    if z_str.shape[0] != z_fea.shape[0]:
        raise ShapeError("build_bundle", z_str.shape, z_fea.shape)
    combined = np.concatenate([z_str, z_fea], axis=1)
    return SimilarityBundle(
        s_str=pairwise_similarity(minmax_normalize(z_str, sigma)),
        s_fea=pairwise_similarity(minmax_normalize(z_fea, sigma)),
        s_sf=pairwise_similarity(minmax_normalize(combined, sigma)),
    )
