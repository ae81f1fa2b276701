"""Heterophily-lessening structural perturbation.

For each training node, the most structurally similar non-neighbors
become edge-addition candidates and the least structurally similar
neighbors become removal candidates; feature similarity then gates both
lists so that additions lean intra-class and removals lean inter-class.
The result is the perturbed adjacency and its average with the original
(edits half-applied), which downstream stages propagate over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, SplitMasks
from .similarity import SimilarityBundle

Edge = tuple[int, int]


@dataclass
class AugmentConfig:
    add_pct: float = 0.01
    remove_pct: float = 0.05
    t_hete: float = 0.3  # feature-similarity floor when adding
    t_homo: float = 0.7  # feature-similarity ceiling when removing
    restrict_to_train: bool = True

    def __post_init__(self):
        for name in ("add_pct", "remove_pct"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")


@dataclass
class AugmentationOutcome:
    added: set[Edge]
    removed: set[Edge]
    a_prime: np.ndarray
    a_dprime: np.ndarray
    degrees_prime: np.ndarray = field(init=False)

    def __post_init__(self):
        self.degrees_prime = self.a_prime.sum(axis=1)


def _source_nodes(g: Graph, cfg: AugmentConfig, masks: SplitMasks) -> np.ndarray:
    return masks.train if cfg.restrict_to_train else np.arange(g.n)


def select_additions(g: Graph, bundle: SimilarityBundle, cfg: AugmentConfig,
                     masks: SplitMasks) -> set[Edge]:
    """Union over source nodes of top-k structurally similar non-neighbors
    whose feature similarity clears the floor. Ties break to lower id."""
    k = math.ceil(cfg.add_pct * g.n)
    if k == 0:
        return set()
    adj = g.adjacency > 0
    chosen: set[Edge] = set()
    for i in _source_nodes(g, cfg, masks):
        candidates = np.flatnonzero(~adj[i])
        candidates = candidates[candidates != i]
        if candidates.size == 0:
            continue
        order = np.argsort(-bundle.s_str[i, candidates], kind="stable")
        top = candidates[order[:k]]
        kept = top[bundle.s_fea[i, top] >= cfg.t_hete]
        chosen.update((min(int(i), int(j)), max(int(i), int(j))) for j in kept)
    return chosen


def select_removals(g: Graph, bundle: SimilarityBundle, cfg: AugmentConfig,
                    masks: SplitMasks) -> set[Edge]:
    """Union over source nodes of bottom-k structurally similar neighbors
    whose feature similarity stays under the ceiling."""
    k = math.ceil(cfg.remove_pct * g.n)
    if k == 0:
        return set()
    adj = g.adjacency > 0
    chosen: set[Edge] = set()
    for i in _source_nodes(g, cfg, masks):
        neighbors = np.flatnonzero(adj[i])
        if neighbors.size == 0:
            continue
        order = np.argsort(bundle.s_str[i, neighbors], kind="stable")
        bottom = neighbors[order[:k]]
        kept = bottom[bundle.s_fea[i, bottom] <= cfg.t_homo]
        chosen.update((min(int(i), int(j)), max(int(i), int(j))) for j in kept)
    return chosen


def apply(g: Graph, additions: set[Edge], removals: set[Edge]) -> AugmentationOutcome:
    """Apply the edits symmetrically; also form the half-applied average."""
    overlap = additions & removals
    if overlap:
        raise RuntimeError(f"internal: pairs nominated for add and remove: {sorted(overlap)}")
    a_prime = g.adjacency.copy()
    for u, v in additions:
        if g.adjacency[u, v] != 0:
            raise ValueError(f"addition ({u}, {v}) already an edge")
        a_prime[u, v] = a_prime[v, u] = 1.0
    for u, v in removals:
        if g.adjacency[u, v] == 0:
            raise ValueError(f"removal ({u}, {v}) is not an edge")
        a_prime[u, v] = a_prime[v, u] = 0.0
    a_dprime = (g.adjacency + a_prime) / 2.0
    return AugmentationOutcome(added=set(additions), removed=set(removals),
                               a_prime=a_prime, a_dprime=a_dprime)


def augment_graph(g: Graph, bundle: SimilarityBundle, cfg: AugmentConfig,
                  masks: SplitMasks) -> AugmentationOutcome:
    """Select and apply both edit kinds in one pass."""
    additions = select_additions(g, bundle, cfg, masks)
    removals = select_removals(g, bundle, cfg, masks)
    return apply(g, additions, removals)
