"""Expanded tail neighborhoods and localized translation relationships.

Tail nodes get a weighted two-hop neighborhood, then the top-k most
similar head nodes inside that range form a directional sub-adjacency;
blending it with the half-applied edit matrix yields the propagation
structure for tail rows. The translation of a node's embedding toward
its neighborhood embedding is a learnable global vector, modulated per
node by scaling and shifting networks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor
from .errors import ConfigError, ShapeError
from .graph import HeadTailPartition
from .rng import Rng


@dataclass
class TransferContext:
    """Adjacency stack used by tail-node message passing."""

    a_2hop: np.ndarray
    a_expand: np.ndarray
    a_sim: np.ndarray
    a_tilde: np.ndarray
    alpha: float
    beta: float
    k: int
    partition: HeadTailPartition


@dataclass
class LocalizerParams:
    """Per-layer scaling/shifting weights and the global translation vector."""

    w_gamma1: Tensor
    w_gamma2: Tensor
    w_eps1: Tensor
    w_eps2: Tensor
    r_global: Tensor

    @classmethod
    def create(cls, dim: int, rng: Rng) -> "LocalizerParams":
        return cls(
            w_gamma1=ad.parameter(rng.glorot_uniform(dim, dim)),
            w_gamma2=ad.parameter(rng.glorot_uniform(dim, dim)),
            w_eps1=ad.parameter(rng.glorot_uniform(dim, dim)),
            w_eps2=ad.parameter(rng.glorot_uniform(dim, dim)),
            r_global=ad.parameter(np.zeros((1, dim))),  # translation starts as identity
        )

    def tensors(self) -> list[Tensor]:
        return [self.w_gamma1, self.w_gamma2, self.w_eps1, self.w_eps2, self.r_global]


def expand_two_hop(a_prime: np.ndarray, a_dprime: np.ndarray, alpha: float):
    """Blend direct and two-hop reach: returns (a_2hop, a_expand)."""
    if a_prime.shape != a_dprime.shape or a_prime.shape[0] != a_prime.shape[1]:
        raise ShapeError("expand_two_hop", a_prime.shape, a_dprime.shape)
    if not 0.0 <= alpha <= 1.0:
        raise ConfigError(f"alpha must lie in [0, 1], got {alpha}")
    a_2hop = a_prime @ a_dprime
    np.fill_diagonal(a_2hop, 0.0)  # round trips are not neighbors
    a_expand = alpha * a_dprime + (1.0 - alpha) * a_2hop
    return a_2hop, a_expand


def select_homophilic_heads(s_sf: np.ndarray, a_expand: np.ndarray,
                            partition: HeadTailPartition, k: int) -> np.ndarray:
    """Per tail row, keep the k most similar reachable head nodes.

    Kept entries copy their weights from a_expand; head rows stay zero,
    ties break to the lower node id.
    """
    if k < 1:
        raise ConfigError(f"k must be at least 1, got {k}")
    n = a_expand.shape[0]
    head_mask = partition.head_mask(n)
    a_sim = np.zeros((n, n))
    for i in partition.tail:
        candidates = np.flatnonzero((a_expand[i] > 0) & head_mask)
        if candidates.size == 0:
            continue
        order = np.argsort(-s_sf[i, candidates], kind="stable")
        keep = candidates[order[:k]]
        a_sim[i, keep] = a_expand[i, keep]
    return a_sim


def build_a_tilde(a_dprime: np.ndarray, a_sim: np.ndarray, beta: float) -> np.ndarray:
    """Convex blend of the half-applied edits with the head sub-adjacency."""
    if not 0.0 <= beta <= 1.0:
        raise ConfigError(f"beta must lie in [0, 1], got {beta}")
    return beta * a_dprime + (1.0 - beta) * a_sim


def build_transfer_context(a_prime: np.ndarray, a_dprime: np.ndarray, s_sf: np.ndarray,
                           partition: HeadTailPartition, alpha: float, beta: float,
                           k: int) -> TransferContext:
    """Run the expansion/selection/blend pipeline on prepared adjacencies."""
    a_2hop, a_expand = expand_two_hop(a_prime, a_dprime, alpha)
    a_sim = select_homophilic_heads(s_sf, a_expand, partition, k)
    a_tilde = build_a_tilde(a_dprime, a_sim, beta)
    return TransferContext(a_2hop=a_2hop, a_expand=a_expand, a_sim=a_sim,
                           a_tilde=a_tilde, alpha=alpha, beta=beta, k=k,
                           partition=partition)


def localize(z_v: Tensor, z_nv: Tensor, params: LocalizerParams) -> Tensor:
    """Node-conditioned translation: tanh-scaled global vector plus shift.

    Accepts single rows or whole batches (rows are independent).
    """
    if z_v.cols != params.w_gamma1.rows:
        raise ShapeError("localize", z_v.shape, params.w_gamma1.shape)
    gamma = ad.tanh(ad.add(ad.matmul(z_v, params.w_gamma1), ad.matmul(z_nv, params.w_gamma2)))
    eps = ad.tanh(ad.add(ad.matmul(z_v, params.w_eps1), ad.matmul(z_nv, params.w_eps2)))
    return ad.add(ad.mul(gamma, params.r_global), eps)


def neighborhood_embedding(z: Tensor, weights, pooling: str = "mean") -> Tensor:
    """Weighted mean of embedding rows; zero vector when weights vanish."""
    if pooling != "mean":
        raise ConfigError(f"unsupported pooling {pooling!r}")
    w = np.asarray(weights, dtype=np.float64).ravel()
    if w.min() < 0:
        raise ValueError("pooling weights must be nonnegative")
    if w.shape[0] != z.rows:
        raise ShapeError("neighborhood_embedding", z.shape, w.shape)
    total = w.sum()
    row = w / total if total > 0 else w
    return ad.matmul(ad.constant(row.reshape(1, -1)), z)
