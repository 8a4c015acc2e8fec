from __future__ import annotations

import datetime as dt
from pathlib import Path

import numpy as np
import pytest

from corrnet.correlate import DistanceMatrix
from corrnet.errors import CorrnetError, ParseError
from corrnet.export import (
    CLASS_COLORS,
    SECTOR_COLORS,
    class_colors,
    parse_dot,
    sector_colors,
    to_dot,
)
from corrnet.graph import build_graph, minimum_spanning_tree
from corrnet.ingest import SECTORS
from corrnet.snapshot import SnapshotClassification

GOLDEN = Path(__file__).parent / "golden"


def two_node_tree():
    dist = DistanceMatrix(tickers=("AAA", "BBB"), d=np.array([[0.0, 1.0], [1.0, 0.0]]))
    return minimum_spanning_tree(build_graph(dist))


def ten_node_tree():
    rng = np.random.default_rng(101)
    n = 10
    raw = np.triu(rng.uniform(0.1, 1.9, size=(n, n)), 1)
    tickers = tuple(f"T{i:02d}" for i in range(n))
    dist = DistanceMatrix(tickers=tickers, d=raw + raw.T)
    tree = minimum_spanning_tree(build_graph(dist))
    colors = {t: SECTOR_COLORS[SECTORS[i % 9]] for i, t in enumerate(tickers)}
    return tree, colors


class TestColorMaps:
    def test_sector_color_map_is_exact(self):
        assert SECTOR_COLORS == {
            "Financial": "green",
            "Services": "orange",
            "Healthcare": "red",
            "Utilities": "grey",
            "Technology": "yellow",
            "Basic Materials": "black",
            "Conglomerates": "purple",
            "Consumer Goods": "blue",
            "Industrial Goods": "brown",
        }

    def test_class_color_map_is_exact(self):
        assert CLASS_COLORS == {"green": "green", "yellow": "yellow", "red": "red"}

    def test_sector_colors_per_ticker(self):
        got = sector_colors({"DUK": "Utilities", "MSFT": "Technology", "GE": "Conglomerates"})
        assert got == {"DUK": "grey", "MSFT": "yellow", "GE": "purple"}

    def test_sector_colors_unknown_sector(self):
        with pytest.raises(CorrnetError, match="Banking"):
            sector_colors({"XXX": "Banking"})

    def test_class_colors(self):
        snap = SnapshotClassification(
            at=dt.date(2008, 9, 15),
            baseline=dt.date(2007, 8, 1),
            entries={"AAA": (-0.05, "green"), "BBB": (-0.5, "red")},
        )
        assert class_colors(snap) == {"AAA": "green", "BBB": "red"}

    def test_class_colors_empty(self):
        snap = SnapshotClassification(
            at=dt.date(2008, 9, 15), baseline=dt.date(2007, 8, 1), entries={}
        )
        assert class_colors(snap) == {}

    def test_class_colors_totality(self):
        entries = {f"T{i:03d}": (-0.01 * i, "green" if i < 10 else "yellow") for i in range(20)}
        snap = SnapshotClassification(
            at=dt.date(2008, 9, 15), baseline=dt.date(2007, 8, 1), entries=entries
        )
        assert len(class_colors(snap)) == 20


class TestToDot:
    def test_two_node_golden(self):
        text = to_dot(two_node_tree(), {"AAA": "green", "BBB": "green"})
        assert text == (GOLDEN / "two_node.dot").read_text(encoding="utf-8")

    def test_ten_node_golden(self):
        tree, colors = ten_node_tree()
        assert to_dot(tree, colors) == (GOLDEN / "ten_node.dot").read_text(encoding="utf-8")

    def test_deterministic(self):
        tree, colors = ten_node_tree()
        assert to_dot(tree, colors) == to_dot(tree, colors)

    def test_missing_color_names_ticker(self):
        with pytest.raises(CorrnetError, match="BBB"):
            to_dot(two_node_tree(), {"AAA": "green"})

    def test_financial_fill_is_green(self):
        text = to_dot(two_node_tree(), sector_colors({"AAA": "Financial", "BBB": "Financial"}))
        assert 'fillcolor=green' in text

    def test_custom_labels(self):
        text = to_dot(
            two_node_tree(),
            {"AAA": "green", "BBB": "red"},
            labels={"AAA": "Alpha Corp", "BBB": "BBB"},
        )
        assert '"AAA" [label="Alpha Corp"' in text


class TestParseDot:
    def test_round_trip(self):
        tree, colors = ten_node_tree()
        nodes, edges = parse_dot(to_dot(tree, colors))
        assert nodes == colors
        assert [(a, b) for a, b, _ in edges] == [(a, b) for a, b, _ in tree.edges]
        for (_, _, got_w), (_, _, want_w) in zip(edges, tree.edges):
            assert got_w == pytest.approx(want_w, rel=1e-5)  # 6 significant digits

    def test_rejects_foreign_text(self):
        with pytest.raises(ParseError):
            parse_dot("digraph other {}\n")
        with pytest.raises(ParseError, match="unrecognized"):
            parse_dot('graph corrnet {\n  rankdir=LR;\n}\n')
