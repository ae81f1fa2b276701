"""Graph loading, partition, homophily and split tests."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from herb.errors import ConfigError, NumericError, ParseError
from herb.graph import (
    Graph,
    SplitScheme,
    edge_homophily,
    load_graph,
    make_splits,
    partition_head_tail,
)


def write_dataset(tmp_path, edges, features, labels):
    ep = tmp_path / "edges.txt"
    ep.write_text("".join(f"{u} {v}\n" for u, v in edges))
    fp = tmp_path / "features.csv"
    header = ",".join(f"f{i}" for i in range(len(features[0])))
    fp.write_text(header + "\n" + "\n".join(",".join(str(x) for x in row) for row in features) + "\n")
    lp = tmp_path / "labels.csv"
    lp.write_text("label\n" + "\n".join(str(y) for y in labels) + "\n")
    return ep, fp, lp


def toy_graph(adjacency, labels, features=None):
    adjacency = np.asarray(adjacency, dtype=float)
    labels = np.asarray(labels)
    if features is None:
        features = np.eye(adjacency.shape[0])
    return Graph(adjacency, features, labels, int(labels.max()) + 1)


class TestLoadGraph:
    def test_triangle(self, tmp_path):
        paths = write_dataset(
            tmp_path, [(0, 1), (1, 2), (2, 0)], [[1.0], [2.0], [3.0]], [0, 1, 0]
        )
        g = load_graph(*paths)
        assert g.n == 3
        assert int(np.count_nonzero(g.adjacency)) == 6
        np.testing.assert_array_equal(g.degrees, [2, 2, 2])
        assert g.class_count == 2

    def test_duplicate_and_reverse_edges_collapse(self, tmp_path):
        paths = write_dataset(tmp_path, [(0, 1), (1, 0), (0, 1)], [[1.0], [1.0]], [0, 0])
        g = load_graph(*paths)
        np.testing.assert_array_equal(g.degrees, [1, 1])

    def test_self_loops_dropped(self, tmp_path):
        paths = write_dataset(tmp_path, [(0, 0), (0, 1)], [[1.0], [1.0]], [0, 0])
        g = load_graph(*paths)
        assert g.adjacency[0, 0] == 0
        np.testing.assert_array_equal(g.degrees, [1, 1])

    def test_ragged_features_report_line(self, tmp_path):
        paths = write_dataset(tmp_path, [(0, 1)], [[1.0, 2.0], [1.0]], [0, 0])
        with pytest.raises(ParseError) as exc:
            load_graph(*paths)
        assert ":3:" in str(exc.value)  # header is line 1, bad row is line 3

    def test_dangling_edge_endpoint(self, tmp_path):
        paths = write_dataset(tmp_path, [(0, 5)], [[1.0], [1.0]], [0, 0])
        with pytest.raises(ParseError) as exc:
            load_graph(*paths)
        assert "edges.txt:1" in str(exc.value)

    def test_negative_label(self, tmp_path):
        paths = write_dataset(tmp_path, [(0, 1)], [[1.0], [1.0]], [0, -1])
        with pytest.raises(ParseError):
            load_graph(*paths)


class TestPartition:
    def test_single_high_degree_node(self):
        # the sequence [1,1,1,1,9] is not realizable as a symmetric graph;
        # the partition rule only reads degrees, so set them directly
        g = toy_graph(np.zeros((5, 5)), [0] * 5)
        g.degrees = np.array([1.0, 1, 1, 1, 9])
        part = partition_head_tail(g)
        assert part.threshold == 1.0
        np.testing.assert_array_equal(part.head, [4])
        assert part.tail.size == 4

    def test_all_equal_degrees_head_empty(self):
        adj = np.array([[0, 1], [1, 0]], dtype=float)
        part = partition_head_tail(toy_graph(adj, [0, 1]))
        assert part.head.size == 0
        assert part.tail.size == 2

    def test_star_graph_hub_is_head(self):
        n = 10
        adj = np.zeros((n, n))
        adj[0, 1:] = adj[1:, 0] = 1.0
        part = partition_head_tail(toy_graph(adj, [0] * n))
        np.testing.assert_array_equal(part.head, [0])
        assert part.threshold == 1.0

    def test_partition_covers_all_nodes(self):
        rng = np.random.default_rng(0)
        up = np.triu(rng.integers(0, 2, size=(12, 12)), k=1)
        adj = (up + up.T).astype(float)
        part = partition_head_tail(toy_graph(adj, [0] * 12))
        assert sorted(part.head.tolist() + part.tail.tolist()) == list(range(12))

    @given(st.integers(1, 20), st.integers(0, 2 ** 16), st.integers(-3, 3))
    @settings(max_examples=50, deadline=None)
    def test_scale_invariance(self, n, bits, log2_c):
        # power-of-two scales keep row sums exact, so degree ties survive
        c = 2.0 ** log2_c
        rng = np.random.default_rng(bits)
        up = np.triu(rng.integers(0, 2, size=(n, n)), k=1).astype(float)
        adj = up + up.T
        g1 = toy_graph(adj, [0] * n)
        g2 = toy_graph(adj * c, [0] * n)
        p1, p2 = partition_head_tail(g1), partition_head_tail(g2)
        np.testing.assert_array_equal(p1.head, p2.head)

    @given(st.integers(1, 30), st.integers(0, 2 ** 16))
    @settings(max_examples=50, deadline=None)
    def test_head_size_bound(self, n, bits):
        rng = np.random.default_rng(bits)
        up = np.triu(rng.integers(0, 2, size=(n, n)), k=1).astype(float)
        adj = up + up.T
        g = toy_graph(adj, [0] * n)
        part = partition_head_tail(g)
        ties = int((g.degrees == part.threshold).sum())
        assert part.head.size <= int(np.ceil(0.2 * n)) + ties


class TestHomophily:
    def test_single_class_is_one(self):
        adj = np.array([[0, 1, 1], [1, 0, 0], [1, 0, 0]], dtype=float)
        assert edge_homophily(toy_graph(adj, [0, 0, 0])) == 1.0

    def test_bipartite_cross_class_is_zero(self):
        adj = np.zeros((4, 4))
        for u in (0, 1):
            for v in (2, 3):
                adj[u, v] = adj[v, u] = 1.0
        assert edge_homophily(toy_graph(adj, [0, 0, 1, 1])) == 0.0

    def test_no_edges_rejected(self):
        with pytest.raises(NumericError):
            edge_homophily(toy_graph(np.zeros((3, 3)), [0, 1, 2]))

    @given(st.integers(2, 12), st.integers(0, 2 ** 16))
    @settings(max_examples=50, deadline=None)
    def test_label_permutation_invariance(self, n, bits):
        rng = np.random.default_rng(bits)
        up = np.triu(rng.integers(0, 2, size=(n, n)), k=1).astype(float)
        adj = up + up.T
        if adj.sum() == 0:
            adj[0, 1] = adj[1, 0] = 1.0
        labels = rng.integers(0, 3, size=n)
        relabel = rng.permutation(3)
        g1 = toy_graph(adj, labels)
        g2 = Graph(adj, g1.features, relabel[labels], 3)
        assert edge_homophily(g1) == edge_homophily(g2)


class TestSplits:
    def make_graph(self, n=60, classes=5, seed=0):
        rng = np.random.default_rng(seed)
        labels = np.arange(n) % classes
        adj = np.zeros((n, n))
        for _ in range(2 * n):
            u, v = rng.integers(0, n, size=2)
            if u != v:
                adj[u, v] = adj[v, u] = 1.0
        return toy_graph(adj, labels)

    def test_five_per_class_gives_25(self):
        g = self.make_graph()
        masks = make_splits(g, SplitScheme(train_per_class=5), seed=1)
        assert masks.train.size == 25
        assert masks.val.size == round(0.1 * g.n)
        assert masks.test.size == round(0.2 * g.n)

    def test_deterministic_per_seed(self):
        g = self.make_graph()
        a = make_splits(g, SplitScheme(train_per_class=5), seed=9)
        b = make_splits(g, SplitScheme(train_per_class=5), seed=9)
        c = make_splits(g, SplitScheme(train_per_class=5), seed=10)
        np.testing.assert_array_equal(a.train, b.train)
        np.testing.assert_array_equal(a.val, b.val)
        assert not np.array_equal(a.train, c.train) or not np.array_equal(a.val, c.val)

    def test_disjoint_and_in_range(self):
        g = self.make_graph()
        masks = make_splits(g, SplitScheme(train_per_class=4), seed=3)
        combined = np.concatenate([masks.train, masks.val, masks.test])
        assert len(set(combined.tolist())) == combined.size
        assert combined.min() >= 0 and combined.max() < g.n

    def test_train_sample_respects_class_counts(self):
        g = self.make_graph()
        masks = make_splits(g, SplitScheme(train_per_class=5), seed=2)
        for c in range(g.class_count):
            assert (g.labels[masks.train] == c).sum() == 5

    def test_small_class_rejected(self):
        g = self.make_graph(n=10, classes=5)
        with pytest.raises(ConfigError):
            make_splits(g, SplitScheme(train_per_class=3), seed=0)
