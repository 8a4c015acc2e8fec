"""Correlation-network analysis of daily closing prices.

Pipeline: prices -> log-returns -> Pearson correlations -> metric distances
-> minimum spanning tree -> betweenness hub -> distance bands, sector
aggregates, and date-stamped green/yellow/red snapshots, with DOT and CSV
artifacts throughout.
"""

from .correlate import (
    CorrelationMatrix,
    DistanceMatrix,
    SectorCorrelationTable,
    SeriesStats,
    distance_matrix,
    pearson_matrix,
    sector_table,
)
from .errors import AlignmentError, CorrnetError, ParseError
from .export import CLASS_COLORS, SECTOR_COLORS, class_colors, sector_colors, to_dot
from .graph import (
    BandAssignment,
    SpanningTree,
    WeightedGraph,
    betweenness,
    build_graph,
    central_node,
    distance_bands,
    minimum_spanning_tree,
)
from .ingest import (
    SECTORS,
    AlignmentPolicy,
    PricePanel,
    PriceRecord,
    ReturnsPanel,
    align_panel,
    cumulative_return,
    log_returns,
    parse_prices,
    parse_sectors,
)
from .snapshot import (
    DEFAULT_THRESHOLDS,
    BandSeries,
    SnapshotClassification,
    band_series,
    classify,
    snapshot_at,
)

__version__ = "0.1.0"
