"""Graph representation, dataset files, splits, degree partition, homophily.

Datasets live in a directory per graph: `<name>/edges.txt` (one "u v"
per line, undirected), `<name>/features.csv` and `<name>/labels.csv`
(both with a header row, row i = node i).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, NumericError, ParseError
from .rng import Rng, STREAM_SPLITS


@dataclass
class Graph:
    """Undirected graph with dense adjacency, features and labels.

    The raw adjacency is 0/1 with a zero diagonal; augmentation stages
    may produce fractional entries. Degrees are row sums and always
    refer to this instance's adjacency.
    """

    adjacency: np.ndarray
    features: np.ndarray
    labels: np.ndarray
    class_count: int
    degrees: np.ndarray = field(init=False)

    def __post_init__(self):
        self.adjacency = np.asarray(self.adjacency, dtype=np.float64)
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.intp)
        n = self.adjacency.shape[0]
        if self.adjacency.shape != (n, n):
            raise ConfigError(f"adjacency must be square, got {self.adjacency.shape}")
        if not np.allclose(self.adjacency, self.adjacency.T):
            raise ConfigError("adjacency must be symmetric")
        if self.features.shape[0] != n or self.labels.shape[0] != n:
            raise ConfigError(
                f"row mismatch: adjacency {n}, features {self.features.shape[0]}, "
                f"labels {self.labels.shape[0]}"
            )
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= self.class_count):
            raise ConfigError(f"labels must lie in [0, {self.class_count})")
        self.degrees = self.adjacency.sum(axis=1)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def feature_dim(self) -> int:
        return self.features.shape[1]

    def with_adjacency(self, adjacency: np.ndarray) -> "Graph":
        """Same nodes and labels over a different (e.g. augmented) structure."""
        return Graph(adjacency, self.features, self.labels, self.class_count)

    def edge_set(self) -> set[tuple[int, int]]:
        """Undirected edges as (u, v) with u < v, any nonzero entry counts."""
        iu, ju = np.nonzero(np.triu(self.adjacency, k=1))
        return {(int(u), int(v)) for u, v in zip(iu, ju)}


@dataclass
class SplitMasks:
    """Disjoint train/val/test node index arrays."""

    train: np.ndarray
    val: np.ndarray
    test: np.ndarray

    def __post_init__(self):
        self.train = np.asarray(self.train, dtype=np.intp)
        self.val = np.asarray(self.val, dtype=np.intp)
        self.test = np.asarray(self.test, dtype=np.intp)
        if self.train.size == 0:
            raise ConfigError("train split is empty")
        all_idx = np.concatenate([self.train, self.val, self.test])
        if len(set(all_idx.tolist())) != all_idx.size:
            raise ConfigError("splits overlap")


@dataclass
class HeadTailPartition:
    """High-degree (head) vs low-degree (tail) nodes at the 80th percentile."""

    head: np.ndarray
    tail: np.ndarray
    threshold: float

    def head_mask(self, n: int) -> np.ndarray:
        mask = np.zeros(n, dtype=bool)
        mask[self.head] = True
        return mask


@dataclass
class SplitScheme:
    """Fixed per-class train count, then fractions of all nodes for val/test."""

    train_per_class: int = 20
    val_fraction: float = 0.1
    test_fraction: float = 0.2


def _read_csv_matrix(path: Path) -> list[list[str]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError(path, 1, "empty file")
    return rows[1:]  # drop header


def load_graph(edge_list_path, features_path, labels_path) -> Graph:
    """Build a Graph from the three dataset files.

    Listed edges are mirrored, duplicates collapse, self-loops are
    dropped. Node count comes from the feature file.
    """
    features_path = Path(features_path)
    labels_path = Path(labels_path)
    edge_list_path = Path(edge_list_path)

    raw = _read_csv_matrix(features_path)
    width = len(raw[0])
    feats = np.zeros((len(raw), width))
    for i, row in enumerate(raw):
        if len(row) != width:
            raise ParseError(features_path, i + 2, f"expected {width} columns, got {len(row)}")
        try:
            feats[i] = [float(x) for x in row]
        except ValueError as err:
            raise ParseError(features_path, i + 2, str(err)) from err
    n = len(raw)

    raw = _read_csv_matrix(labels_path)
    if len(raw) != n:
        raise ParseError(labels_path, len(raw) + 1, f"expected {n} label rows, got {len(raw)}")
    labels = np.zeros(n, dtype=np.intp)
    for i, row in enumerate(raw):
        try:
            labels[i] = int(row[0])
        except (ValueError, IndexError) as err:
            raise ParseError(labels_path, i + 2, str(err)) from err
        if labels[i] < 0:
            raise ParseError(labels_path, i + 2, f"negative label {labels[i]}")
    class_count = int(labels.max()) + 1

    adj = np.zeros((n, n))
    with open(edge_list_path) as fh:
        for line_no, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if len(parts) != 2:
                raise ParseError(edge_list_path, line_no, f"expected 'u v', got {line.rstrip()!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError as err:
                raise ParseError(edge_list_path, line_no, str(err)) from err
            if not (0 <= u < n and 0 <= v < n):
                raise ParseError(edge_list_path, line_no, f"edge ({u}, {v}) outside [0, {n})")
            if u == v:
                continue
            adj[u, v] = adj[v, u] = 1.0

    return Graph(adj, feats, labels, class_count)


def load_dataset(root, name: str) -> Graph:
    """Load `<root>/<name>/{edges.txt,features.csv,labels.csv}`."""
    base = Path(root) / name
    for fname in ("edges.txt", "features.csv", "labels.csv"):
        if not (base / fname).exists():
            raise ConfigError(f"dataset file missing: {base / fname}")
    return load_graph(base / "edges.txt", base / "features.csv", base / "labels.csv")


def partition_head_tail(g: Graph) -> HeadTailPartition:
    """Split nodes at the 80th-percentile degree of the sorted sequence.

    Nodes whose degree equals the threshold are tail; only strictly
    larger degrees are head.
    """
    if g.n < 1:
        raise ConfigError("empty graph")
    ordered = np.sort(g.degrees)
    threshold = float(ordered[math.ceil(0.8 * g.n) - 1])
    head = np.flatnonzero(g.degrees > threshold)
    tail = np.flatnonzero(g.degrees <= threshold)
    return HeadTailPartition(head=head, tail=tail, threshold=threshold)


def edge_homophily(g: Graph) -> float:
    """Fraction of undirected edges whose endpoints share a label."""
    iu, ju = np.nonzero(np.triu(g.adjacency, k=1))
    if iu.size == 0:
        raise NumericError("edge homophily undefined on a graph with no edges")
    same = (g.labels[iu] == g.labels[ju]).sum()
    return float(same) / iu.size


def make_splits(g: Graph, scheme: SplitScheme, seed: int) -> SplitMasks:
    """Sample `train_per_class` nodes per class, then val/test from the rest."""
    rng = Rng(seed).split(STREAM_SPLITS)
    train: list[int] = []
    for c in range(g.class_count):
        members = np.flatnonzero(g.labels == c)
        if members.size < scheme.train_per_class:
            raise ConfigError(
                f"class {c} has {members.size} nodes, need {scheme.train_per_class} for train"
            )
        picked = rng.choice(members, size=scheme.train_per_class, replace=False)
        train.extend(int(i) for i in picked)
    train_arr = np.sort(np.array(train, dtype=np.intp))

    rest = np.setdiff1d(np.arange(g.n), train_arr)
    rest = rng.permutation(rest)
    n_val = int(round(scheme.val_fraction * g.n))
    n_test = int(round(scheme.test_fraction * g.n))
    if n_val + n_test > rest.size:
        raise ConfigError(
            f"val+test ({n_val}+{n_test}) exceed the {rest.size} non-train nodes"
        )
    val = np.sort(rest[:n_val])
    test = np.sort(rest[n_val:n_val + n_test])
    return SplitMasks(train=train_arr, val=val, test=test)
