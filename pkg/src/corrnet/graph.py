"""Complete distance graph, minimum spanning tree, hub centrality, distance bands."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .correlate import DistanceMatrix, _fmt17
from .errors import CorrnetError, ParseError

MAX_METRIC_DISTANCE = 2.0
DEFAULT_BAND_WIDTH = 0.4
_BAND_EPS = 1e-9


@dataclass(eq=False)
class WeightedGraph:
    """Complete undirected graph; edges are (a, b, weight) with a < b."""

    nodes: tuple[str, ...]
    edges: list[tuple[str, str, float]]


@dataclass(eq=False)
class SpanningTree:
    """Tree over all nodes; edges sorted by (a, b), adjacency per node."""

    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str, float], ...]
    adjacency: dict[str, tuple[str, ...]]

    def total_weight(self) -> float:
        return sum(w for _, _, w in self.edges)


@dataclass(eq=False)
class BandAssignment:
    """Ring membership by direct metric distance from the center node.

    Band k covers ((k-1)*width, k*width]; the center itself (distance 0)
    belongs to no band.
    """

    center: str
    width: float
    num_bands: int
    bands: dict[str, int]

    def members(self, band: int) -> tuple[str, ...]:
        return tuple(sorted(t for t, b in self.bands.items() if b == band))


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


def build_graph(dist: DistanceMatrix) -> WeightedGraph:
    """All n(n-1)/2 ticker pairs weighted by metric distance."""
    n = len(dist.tickers)
    if n < 2:
        raise CorrnetError("graph needs at least 2 nodes")
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            edges.append((dist.tickers[i], dist.tickers[j], float(dist.d[i, j])))
    return WeightedGraph(nodes=dist.tickers, edges=edges)


def _assemble_tree(nodes: tuple[str, ...], edges: list[tuple[str, str, float]]) -> SpanningTree:
    neighbors: dict[str, list[str]] = {t: [] for t in nodes}
    for a, b, _ in edges:
        neighbors[a].append(b)
        neighbors[b].append(a)
    return SpanningTree(
        nodes=nodes,
        edges=tuple(sorted(edges, key=lambda e: (e[0], e[1]))),
        adjacency={t: tuple(sorted(ns)) for t, ns in neighbors.items()},
    )


def minimum_spanning_tree(graph: WeightedGraph) -> SpanningTree:
    """Kruskal over edges sorted by (weight, a, b).

    The lexicographic tie-break makes the selected tree unique and
    reproducible even when real correlation data produces equal weights.
    """
    index = {t: i for i, t in enumerate(graph.nodes)}
    ordered = sorted(graph.edges, key=lambda e: (e[2], e[0], e[1]))
    uf = _UnionFind(len(graph.nodes))
    chosen: list[tuple[str, str, float]] = []
    for a, b, w in ordered:
        if uf.union(index[a], index[b]):
            chosen.append((a, b, w))
            if len(chosen) == len(graph.nodes) - 1:
                break
    if len(chosen) != len(graph.nodes) - 1:
        raise CorrnetError("graph is not connected; no spanning tree exists")
    return _assemble_tree(graph.nodes, chosen)


def betweenness(tree: SpanningTree) -> dict[str, int]:
    """Unordered node pairs whose unique tree path passes through each node.

    Removing a node splits the tree into one component per neighbor; the
    score is the sum of size products over unordered component pairs,
    computed from rooted subtree sizes so the whole pass is O(n).
    """
    nodes = tree.nodes
    n = len(nodes)
    scores = {t: 0 for t in nodes}
    if n < 3:
        return scores

    root = nodes[0]
    parent: dict[str, str | None] = {root: None}
    order = [root]
    stack = [root]
    while stack:
        v = stack.pop()
        for w in tree.adjacency[v]:
            if w not in parent:
                parent[w] = v
                order.append(w)
                stack.append(w)
    if len(order) != n:
        raise CorrnetError("spanning tree is not connected")

    subtree = {t: 1 for t in nodes}
    for v in reversed(order):
        p = parent[v]
        if p is not None:
            subtree[p] += subtree[v]

    for v in nodes:
        branch_sizes = [subtree[w] for w in tree.adjacency[v] if parent.get(w) == v]
        if parent[v] is not None:
            branch_sizes.append(n - subtree[v])
        total = sum(branch_sizes)  # always n - 1
        scores[v] = (total * total - sum(s * s for s in branch_sizes)) // 2
    return scores


def central_node(scores: Mapping[str, int]) -> str:
    """Highest-betweenness ticker; ties go to the lexicographically smallest."""
    if not scores:
        raise CorrnetError("empty centrality scores")
    return min(scores, key=lambda t: (-scores[t], t))


def distance_bands(
    dist: DistanceMatrix, center: str, width: float = DEFAULT_BAND_WIDTH
) -> BandAssignment:
    """Assign every non-center ticker to the ring containing its distance.

    Intervals are right-closed: band k is ((k-1)*width, k*width], with the
    last band capped at the metric maximum of 2. A non-center ticker at
    distance 0 (a perfectly correlated twin) falls into band 1 so the
    assignment stays total.
    """
    if width <= 0:
        raise CorrnetError("band width must be positive")
    num_bands = max(1, math.ceil(MAX_METRIC_DISTANCE / width - 1e-12))
    bands: dict[str, int] = {}
    for ticker, d in dist.from_center(center).items():
        if d > MAX_METRIC_DISTANCE + _BAND_EPS:
            raise CorrnetError(
                f"distance {d} from {center} to {ticker} exceeds the metric maximum 2"
            )
        band = max(1, math.ceil(d / width - _BAND_EPS))
        bands[ticker] = min(band, num_bands)
    return BandAssignment(center=center, width=width, num_bands=num_bands, bands=bands)


def write_tree_csv(tree: SpanningTree, path: Path) -> None:
    """Tree CSV: `ticker_a,ticker_b,weight` rows sorted by (a, b)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("ticker_a,ticker_b,weight\n")
        for a, b, w in tree.edges:
            fh.write(f"{a},{b},{_fmt17(w)}\n")


def read_tree_csv(path: Path) -> SpanningTree:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines or lines[0] != "ticker_a,ticker_b,weight":
        raise ParseError(f"{path}: missing tree header")
    edges: list[tuple[str, str, float]] = []
    nodes: set[str] = set()
    for i, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 3:
            raise ParseError(f"{path}: expected 3 columns, line {i}")
        a, b, w_text = parts
        try:
            w = float(w_text)
        except ValueError:
            raise ParseError(f"{path}: unparsable weight {w_text!r}, line {i}") from None
        edges.append((a, b, w) if a < b else (b, a, w))
        nodes.update((a, b))
    tree = _assemble_tree(tuple(sorted(nodes)), edges)
    if len(tree.edges) != len(tree.nodes) - 1:
        raise ParseError(f"{path}: {len(tree.edges)} edges cannot span {len(tree.nodes)} nodes")
    betweenness(tree)  # raises if the edge set is disconnected
    return tree


def write_centrality_csv(scores: Mapping[str, int], path: Path) -> None:
    """Centrality CSV: `ticker,betweenness`, rows sorted by ticker."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("ticker,betweenness\n")
        for ticker in sorted(scores):
            fh.write(f"{ticker},{scores[ticker]}\n")


def read_centrality_csv(path: Path) -> dict[str, int]:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines or lines[0] != "ticker,betweenness":
        raise ParseError(f"{path}: missing centrality header")
    scores: dict[str, int] = {}
    for i, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 2:
            raise ParseError(f"{path}: expected 2 columns, line {i}")
        try:
            scores[parts[0]] = int(parts[1])
        except ValueError:
            raise ParseError(f"{path}: unparsable score {parts[1]!r}, line {i}") from None
    return scores
