"""DOT text emission and the node color maps for sector and class views."""

from __future__ import annotations

import re
from typing import Mapping

from .errors import CorrnetError, ParseError
from .graph import SpanningTree
from .snapshot import GREEN, RED, SnapshotClassification, YELLOW

# X11/DOT color keywords per sector, one color per category.
SECTOR_COLORS = {
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

# Return-class labels double as their node colors.
CLASS_COLORS = {GREEN: "green", YELLOW: "yellow", RED: "red"}

_NODE_RE = re.compile(
    r'^  "(?P<name>[^"]+)" \[label="(?P<label>[^"]*)", style=filled, '
    r"fillcolor=(?P<color>[A-Za-z0-9]+)\];$"
)
_EDGE_RE = re.compile(
    r'^  "(?P<a>[^"]+)" -- "(?P<b>[^"]+)" \[weight=(?P<w>[^\]]+)\];$'
)


def sector_colors(sectors: Mapping[str, str]) -> dict[str, str]:
    """Per-ticker color via the sector color map."""
    out = {}
    for ticker, sector in sectors.items():
        try:
            out[ticker] = SECTOR_COLORS[sector]
        except KeyError:
            raise CorrnetError(f"no color for sector {sector!r} ({ticker})") from None
    return out


def class_colors(snapshot: SnapshotClassification) -> dict[str, str]:
    """Per-ticker color via the return-class color map."""
    return {t: CLASS_COLORS[label] for t, (_, label) in snapshot.entries.items()}


def to_dot(
    tree: SpanningTree,
    colors: Mapping[str, str],
    labels: Mapping[str, str] | None = None,
) -> str:
    """Render the tree as deterministic undirected DOT text.

    Output grammar: ``graph corrnet { <node stmts> <edge stmts> }`` with
    two-space indentation and LF line endings. Nodes appear sorted
    lexicographically, edges sorted by (a, b), edge weights at 6
    significant digits; identical input yields byte-identical output.
    """
    lines = ["graph corrnet {"]
    for node in tree.nodes:
        color = colors.get(node)
        if color is None:
            raise CorrnetError(f"missing color for node {node}")
        label = labels.get(node, node) if labels is not None else node
        lines.append(f'  "{node}" [label="{label}", style=filled, fillcolor={color}];')
    for a, b, w in tree.edges:
        lines.append(f'  "{a}" -- "{b}" [weight={format(w, ".6g")}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def parse_dot(text: str) -> tuple[dict[str, str], list[tuple[str, str, float]]]:
    """Minimal parser for the emitted grammar subset.

    Returns (node fillcolors, edges with weights); used to verify that
    emitted text round-trips exactly.
    """
    lines = text.split("\n")
    if not lines or lines[0] != "graph corrnet {":
        raise ParseError("not a corrnet DOT document")
    nodes: dict[str, str] = {}
    edges: list[tuple[str, str, float]] = []
    for line in lines[1:]:
        if line in ("}", ""):
            continue
        m = _NODE_RE.match(line)
        if m:
            nodes[m.group("name")] = m.group("color")
            continue
        m = _EDGE_RE.match(line)
        if m:
            edges.append((m.group("a"), m.group("b"), float(m.group("w"))))
            continue
        raise ParseError(f"unrecognized DOT line: {line!r}")
    return nodes, edges
