from __future__ import annotations

import itertools
from collections import deque

import numpy as np
import pytest

from corrnet.correlate import DistanceMatrix
from corrnet.errors import CorrnetError, ParseError
from corrnet.graph import (
    SpanningTree,
    WeightedGraph,
    betweenness,
    build_graph,
    central_node,
    distance_bands,
    minimum_spanning_tree,
    read_centrality_csv,
    read_tree_csv,
    write_centrality_csv,
    write_tree_csv,
)


def dist_from_array(values: np.ndarray, tickers=None) -> DistanceMatrix:
    n = values.shape[0]
    tickers = tuple(tickers) if tickers else tuple(f"N{i:02d}" for i in range(n))
    return DistanceMatrix(tickers=tickers, d=np.asarray(values, dtype=float))


def random_distance_matrix(rng, n: int) -> DistanceMatrix:
    raw = rng.uniform(0.01, 2.0, size=(n, n))
    sym = np.triu(raw, 1)
    sym = sym + sym.T
    return dist_from_array(sym)


def graph_from_weights(weights: dict[tuple[str, str], float]) -> WeightedGraph:
    nodes = tuple(sorted({t for pair in weights for t in pair}))
    edges = [(a, b, w) if a < b else (b, a, w) for (a, b), w in weights.items()]
    return WeightedGraph(nodes=nodes, edges=sorted(edges, key=lambda e: (e[0], e[1])))


def spans(nodes: tuple[str, ...], edge_subset) -> bool:
    """Oracle-side connectivity check: plain BFS over the candidate edges."""
    adj = {t: [] for t in nodes}
    for a, b, _ in edge_subset:
        adj[a].append(b)
        adj[b].append(a)
    seen = {nodes[0]}
    queue = deque([nodes[0]])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == len(nodes)


def all_spanning_trees(graph: WeightedGraph):
    n = len(graph.nodes)
    for subset in itertools.combinations(graph.edges, n - 1):
        if spans(graph.nodes, subset):
            yield subset


class TestBuildGraph:
    def test_two_nodes(self):
        g = build_graph(dist_from_array(np.array([[0.0, 1.0], [1.0, 0.0]])))
        assert len(g.edges) == 1

    def test_four_nodes(self):
        g = build_graph(random_distance_matrix(np.random.default_rng(0), 4))
        assert len(g.edges) == 6

    def test_count_formula(self):
        # 533 tickers: independent arithmetic says C(533, 2) pairs.
        assert 533 * 532 // 2 == 141778
        g = build_graph(random_distance_matrix(np.random.default_rng(1), 40))
        assert len(g.edges) == 40 * 39 // 2


class TestMinimumSpanningTree:
    def test_unique_mst(self):
        g = graph_from_weights({("A", "B"): 1.0, ("A", "C"): 2.0, ("B", "C"): 3.0})
        tree = minimum_spanning_tree(g)
        assert tree.edges == (("A", "B", 1.0), ("A", "C", 2.0))
        assert tree.total_weight() == 3.0

    def test_equal_weights_lexicographic(self):
        w = 0.7
        g = graph_from_weights(
            {(a, b): w for a, b in itertools.combinations("ABCD", 2)}
        )
        tree = minimum_spanning_tree(g)
        assert tree.edges == (("A", "B", w), ("A", "C", w), ("A", "D", w))
        assert tree.total_weight() == pytest.approx(3 * w)

    def test_against_exhaustive_enumeration(self):
        rng = np.random.default_rng(424242)
        for trial in range(100):
            n = int(rng.integers(3, 7))
            dist = random_distance_matrix(rng, n)
            g = build_graph(dist)
            tree = minimum_spanning_tree(g)

            best = min(sum(w for _, _, w in t) for t in all_spanning_trees(g))
            assert tree.total_weight() == pytest.approx(best, abs=1e-12)

            minima = [
                t
                for t in all_spanning_trees(g)
                if abs(sum(w for _, _, w in t) - best) < 1e-12
            ]
            if len(minima) == 1:
                assert set((a, b) for a, b, _ in tree.edges) == {
                    (a, b) for a, b, _ in minima[0]
                }

    def test_edge_count_and_bridge_property(self):
        rng = np.random.default_rng(9)
        dist = random_distance_matrix(rng, 12)
        tree = minimum_spanning_tree(build_graph(dist))
        assert len(tree.edges) == 11
        for removed in tree.edges:
            remaining = [e for e in tree.edges if e != removed]
            assert not spans(tree.nodes, remaining)

    def test_invariant_under_monotone_transform(self):
        rng = np.random.default_rng(31)
        for _ in range(10):
            dist = random_distance_matrix(rng, 8)
            g = build_graph(dist)
            base = minimum_spanning_tree(g)
            squared = WeightedGraph(
                nodes=g.nodes, edges=[(a, b, w * w) for a, b, w in g.edges]
            )
            got = minimum_spanning_tree(squared)
            assert [(a, b) for a, b, _ in got.edges] == [(a, b) for a, b, _ in base.edges]


def path_walk_betweenness(tree: SpanningTree) -> dict[str, int]:
    """Oracle: walk every pair's unique path via BFS parents, count interiors."""
    scores = {t: 0 for t in tree.nodes}
    for s, t in itertools.combinations(tree.nodes, 2):
        parents = {s: None}
        queue = deque([s])
        while queue:
            v = queue.popleft()
            if v == t:
                break
            for w in tree.adjacency[v]:
                if w not in parents:
                    parents[w] = v
                    queue.append(w)
        node = parents[t]
        while node != s:
            scores[node] += 1
            node = parents[node]
    return scores


def random_tree(rng, n: int) -> SpanningTree:
    dist = random_distance_matrix(rng, n)
    return minimum_spanning_tree(build_graph(dist))


class TestBetweenness:
    def test_path_graph(self):
        tree = minimum_spanning_tree(
            graph_from_weights({("A", "B"): 1.0, ("B", "C"): 1.0, ("A", "C"): 9.0})
        )
        assert betweenness(tree) == {"A": 0, "B": 1, "C": 0}

    def test_star(self):
        weights = {("C", leaf): 1.0 for leaf in ("W", "X", "Y", "Z")}
        weights.update({(a, b): 9.0 for a, b in itertools.combinations("WXYZ", 2)})
        tree = minimum_spanning_tree(graph_from_weights(weights))
        scores = betweenness(tree)
        assert scores["C"] == 6  # C(4, 2) leaf pairs
        assert all(scores[leaf] == 0 for leaf in "WXYZ")

    def test_against_path_walk_oracle(self):
        rng = np.random.default_rng(20081010)
        for trial in range(100):
            n = int(rng.integers(2, 51))
            tree = random_tree(rng, n)
            got = betweenness(tree)
            expected = path_walk_betweenness(tree)
            assert got == expected  # exact integer equality
            leaves = [t for t in tree.nodes if len(tree.adjacency[t]) == 1]
            assert all(got[leaf] == 0 for leaf in leaves)

    def test_score_sum_identity(self):
        rng = np.random.default_rng(60)
        for _ in range(10):
            tree = random_tree(rng, int(rng.integers(3, 20)))
            scores = betweenness(tree)
            oracle = path_walk_betweenness(tree)
            assert sum(scores.values()) == sum(oracle.values())


class TestCentralNode:
    def test_unique_max(self):
        assert central_node({"a": 0, "b": 1, "c": 0}) == "b"

    def test_tie_break(self):
        assert central_node({"b": 3, "a": 3}) == "a"

    def test_single(self):
        assert central_node({"a": 0}) == "a"

    def test_rescale_invariance(self):
        rng = np.random.default_rng(14)
        scores = {f"T{i}": int(rng.integers(0, 1000)) for i in range(20)}
        base = central_node(scores)
        for factor in (2, 7, 100):
            assert central_node({t: s * factor for t, s in scores.items()}) == base

    def test_empty(self):
        with pytest.raises(CorrnetError):
            central_node({})


class TestDistanceBands:
    def band_of(self, d_value: float) -> int:
        dist = dist_from_array(
            np.array([[0.0, d_value], [d_value, 0.0]]), tickers=("CTR", "OTH")
        )
        return distance_bands(dist, "CTR").bands["OTH"]

    def test_boundaries(self):
        assert self.band_of(0.4) == 1
        assert self.band_of(0.41) == 2
        assert self.band_of(2.0) == 5
        assert self.band_of(0.8) == 2
        assert self.band_of(1.6) == 4

    def test_zero_distance_twin_goes_innermost(self):
        assert self.band_of(0.0) == 1

    def test_metric_violation(self):
        with pytest.raises(CorrnetError, match="exceeds the metric maximum"):
            self.band_of(2.1)

    def test_every_ticker_assigned(self):
        rng = np.random.default_rng(88)
        for _ in range(20):
            n = int(rng.integers(2, 30))
            dist = random_distance_matrix(rng, n)
            center = dist.tickers[int(rng.integers(0, n))]
            assignment = distance_bands(dist, center)
            assert set(assignment.bands) == set(dist.tickers) - {center}
            assert all(1 <= b <= assignment.num_bands for b in assignment.bands.values())

    def test_center_not_assigned(self):
        dist = random_distance_matrix(np.random.default_rng(3), 6)
        assignment = distance_bands(dist, dist.tickers[0])
        assert dist.tickers[0] not in assignment.bands

    def test_custom_width(self):
        dist = dist_from_array(np.array([[0.0, 1.1], [1.1, 0.0]]), tickers=("A", "B"))
        assignment = distance_bands(dist, "A", width=0.5)
        assert assignment.num_bands == 4
        assert assignment.bands["B"] == 3

    def test_unknown_center(self):
        dist = random_distance_matrix(np.random.default_rng(4), 4)
        with pytest.raises(CorrnetError, match="not in distance matrix"):
            distance_bands(dist, "NOPE")


class TestTreeCsv:
    def test_round_trip(self, tmp_path):
        tree = random_tree(np.random.default_rng(10), 9)
        path = tmp_path / "tree.csv"
        write_tree_csv(tree, path)
        got = read_tree_csv(path)
        assert got.nodes == tree.nodes
        assert got.edges == tree.edges
        assert got.adjacency == tree.adjacency

    def test_rejects_non_tree(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(
            "ticker_a,ticker_b,weight\nA,B,1.0\nB,C,1.0\nA,C,1.0\n", encoding="utf-8"
        )
        with pytest.raises(ParseError, match="cannot span"):
            read_tree_csv(path)

    def test_missing_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("A,B,1.0\n", encoding="utf-8")
        with pytest.raises(ParseError, match="header"):
            read_tree_csv(path)


class TestCentralityCsv:
    def test_round_trip(self, tmp_path):
        scores = {"B": 3, "A": 10, "C": 0}
        path = tmp_path / "scores.csv"
        write_centrality_csv(scores, path)
        assert read_centrality_csv(path) == scores
        text = path.read_text(encoding="utf-8")
        assert text.splitlines()[1].startswith("A,")  # sorted by ticker
