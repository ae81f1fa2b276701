"""Pre-trained encoders feeding similarity computation.

The structure encoder is a 2-layer graph convolution trained as a link
predictor (inner-product scores, binary cross-entropy against an equal
count of random non-edges). The feature encoder is a single linear
classifier; its pre-softmax logits act as the feature embedding. Both
run before augmentation and return detached arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import autodiff as ad
from .errors import ConfigError, TrainingError
from .graph import Graph, SplitMasks
from .rng import Rng, STREAM_DROPOUT, STREAM_INIT, STREAM_NEGATIVES


@dataclass
class EncoderConfig:
    hidden: int = 32
    epochs: int = 200
    lr: float = 0.01
    dropout: float = 0.5
    weight_decay: float = 0.0
    # "sample" draws one random non-edge per edge each epoch; "full"
    # scores every non-edge pair (only sensible on toy graphs)
    negative_mode: str = "sample"


@dataclass
class EncoderOutputs:
    z_str: np.ndarray
    z_fea: np.ndarray


def normalized_adjacency(adjacency: np.ndarray, add_self_loops: bool = True,
                         mode: str = "sym") -> np.ndarray:
    """Degree-normalized propagation matrix over a weighted adjacency.

    mode "sym" gives D^-1/2 (A+I) D^-1/2, mode "rw" gives D^-1 (A+I);
    all-zero rows map to zero rows instead of dividing by zero.
    """
    adj = np.asarray(adjacency, dtype=np.float64)
    if adj.min() < 0:
        raise ConfigError("adjacency entries must be nonnegative")
    m = adj + np.eye(adj.shape[0]) if add_self_loops else adj.copy()
    deg = m.sum(axis=1)
    if mode == "sym":
        with np.errstate(divide="ignore"):
            inv_sqrt = np.where(deg > 0, 1.0 / np.sqrt(deg), 0.0)
        return m * inv_sqrt[:, None] * inv_sqrt[None, :]
    if mode == "rw":
        with np.errstate(divide="ignore"):
            inv = np.where(deg > 0, 1.0 / deg, 0.0)
        return m * inv[:, None]
    raise ConfigError(f"unknown normalization mode {mode!r}")


def row_normalize(adjacency: np.ndarray) -> np.ndarray:
    """Row-stochastic weights for neighborhood pooling; zero rows stay zero."""
    return normalized_adjacency(adjacency, add_self_loops=False, mode="rw")


def _undirected_edges(adjacency: np.ndarray) -> np.ndarray:
    iu, ju = np.nonzero(np.triu(adjacency, k=1))
    return np.stack([iu, ju], axis=1)


def _sample_non_edges(adjacency: np.ndarray, count: int, rng: Rng) -> np.ndarray:
    """Uniform random (u, v) with u != v and no edge, by rejection."""
    n = adjacency.shape[0]
    out = np.empty((0, 2), dtype=np.intp)
    attempts = 0
    while out.shape[0] < count:
        draw = rng.integers(0, n, size=(max(4 * count, 64), 2))
        ok = (draw[:, 0] != draw[:, 1]) & (adjacency[draw[:, 0], draw[:, 1]] == 0)
        out = np.concatenate([out, draw[ok]])[: count]
        attempts += 1
        if attempts > 200:
            raise ConfigError("graph too dense to sample negative non-edges")
    return out


def _all_non_edges(adjacency: np.ndarray) -> np.ndarray:
    n = adjacency.shape[0]
    iu, ju = np.nonzero(np.triu(adjacency == 0, k=1))
    return np.stack([iu, ju], axis=1)


def pretrain_structure_encoder(g: Graph, masks: SplitMasks, cfg: EncoderConfig,
                               rng: Rng, record_loss: list | None = None) -> np.ndarray:
    """Train the 2-layer link-prediction encoder; return n-by-hidden embeddings."""
    edges = _undirected_edges(g.adjacency)
    if edges.shape[0] == 0:
        raise ConfigError("structure encoder needs at least one edge")
    a_hat = ad.constant(normalized_adjacency(g.adjacency))
    x = ad.constant(g.features)
    init = rng.split(STREAM_INIT)
    drop = rng.split(STREAM_DROPOUT)
    neg = rng.split(STREAM_NEGATIVES)
    w1 = ad.parameter(init.glorot_uniform(g.feature_dim, cfg.hidden))
    b1 = ad.parameter(np.zeros((1, cfg.hidden)))
    w2 = ad.parameter(init.glorot_uniform(cfg.hidden, cfg.hidden))
    b2 = ad.parameter(np.zeros((1, cfg.hidden)))
    params = [w1, b1, w2, b2]
    opt = ad.Adam(params, lr=cfg.lr, weight_decay=cfg.weight_decay)

    def forward(training):
        h = ad.relu(ad.add(ad.matmul(a_hat, ad.matmul(x, w1)), b1))
        h = ad.dropout(h, cfg.dropout, training, drop)
        return ad.add(ad.matmul(a_hat, ad.matmul(h, w2)), b2)

    full_negatives = _all_non_edges(g.adjacency) if cfg.negative_mode == "full" else None
    for epoch in range(cfg.epochs):
        z = forward(training=True)
        if full_negatives is not None:
            negatives = full_negatives
        else:
            negatives = _sample_non_edges(g.adjacency, edges.shape[0], neg)
        pairs = np.concatenate([edges, negatives]) if negatives.size else edges
        targets = np.concatenate([np.ones(edges.shape[0]), np.zeros(negatives.shape[0])])
        loss = ad.bce_with_logits(ad.pairwise_dot(z, pairs), targets.reshape(-1, 1))
        if not np.isfinite(loss.item()):
            raise TrainingError("structure encoder diverged", epoch)
        if record_loss is not None:
            record_loss.append(loss.item())
        loss.backward()
        opt.step()
    return forward(training=False).data.copy()


def pretrain_feature_encoder(g: Graph, masks: SplitMasks, cfg: EncoderConfig,
                             rng: Rng) -> np.ndarray:
    """Train the linear node classifier; return its n-by-C logits."""
    x = ad.constant(g.features)
    init = rng.split(STREAM_INIT)
    drop = rng.split(STREAM_DROPOUT)
    w = ad.parameter(init.glorot_uniform(g.feature_dim, g.class_count))
    b = ad.parameter(np.zeros((1, g.class_count)))
    opt = ad.Adam([w, b], lr=cfg.lr, weight_decay=cfg.weight_decay)

    for epoch in range(cfg.epochs):
        h = ad.dropout(x, cfg.dropout, True, drop)
        logits = ad.add(ad.matmul(h, w), b)
        loss = ad.softmax_cross_entropy(logits, g.labels, masks.train)
        if not np.isfinite(loss.item()):
            raise TrainingError("feature encoder diverged", epoch)
        loss.backward()
        opt.step()
    return ad.add(ad.matmul(x, w), b).data.copy()


def pretrain_encoders(g: Graph, masks: SplitMasks, cfg: EncoderConfig,
                      rng: Rng) -> EncoderOutputs:
    """Run both encoders on independent sub-streams of one seed."""
    from .rng import STREAM_ENCODER_FEATURES, STREAM_ENCODER_STRUCTURE

    z_str = pretrain_structure_encoder(g, masks, cfg, rng.split(STREAM_ENCODER_STRUCTURE))
    z_fea = pretrain_feature_encoder(g, masks, cfg, rng.split(STREAM_ENCODER_FEATURES))
    return EncoderOutputs(z_str=z_str, z_fea=z_fea)


def save_embeddings(path, outputs: EncoderOutputs) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savez_compressed(path, z_str=outputs.z_str, z_fea=outputs.z_fea)


def load_embeddings(path) -> EncoderOutputs:
    with np.load(path) as data:
        return EncoderOutputs(z_str=data["z_str"].copy(), z_fea=data["z_fea"].copy())
