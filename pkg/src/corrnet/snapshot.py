"""Date-stamped return classifications and distance-band return series."""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .correlate import _fmt17
from .errors import CorrnetError
from .graph import BandAssignment
from .ingest import PricePanel, cumulative_return

GREEN = "green"
YELLOW = "yellow"
RED = "red"

# (red cutoff, yellow cutoff): green above -10%, red below -25%, yellow on
# and between the two boundaries.
DEFAULT_THRESHOLDS = (-0.25, -0.10)

_SEVERITY = {GREEN: 0, YELLOW: 1, RED: 2}


@dataclass(eq=False)
class SnapshotClassification:
    """Per-ticker cumulative return and class at one date."""

    at: dt.date
    baseline: dt.date
    entries: dict[str, tuple[float, str]]  # ticker -> (return, class)


@dataclass(eq=False)
class BandSeries:
    """Mean cumulative return per distance band over a date range.

    ``values[b, j]`` is the equal-weighted mean return of band b+1 members
    at ``dates[j]``; bands with no members hold NaN, never 0.0.
    """

    center: str
    dates: tuple[dt.date, ...]
    values: np.ndarray  # shape (num_bands, len(dates))
    counts: tuple[int, ...]


def severity(label: str) -> int:
    return _SEVERITY[label]


def classify_return(value: float, thresholds: tuple[float, float] = DEFAULT_THRESHOLDS) -> str:
    lower, upper = thresholds
    if value > upper:
        return GREEN
    if value < lower:
        return RED
    return YELLOW


def classify(
    returns: Mapping[str, float],
    thresholds: tuple[float, float] = DEFAULT_THRESHOLDS,
) -> dict[str, tuple[float, str]]:
    """Assign green/yellow/red to each ticker's arithmetic return.

    Green is strictly above the upper cutoff and red strictly below the
    lower one; both boundary values land on yellow, so the three classes
    partition the line.
    """
    lower, upper = thresholds
    if not lower < upper:
        raise CorrnetError(f"thresholds must be ordered, got {lower} >= {upper}")
    return {t: (r, classify_return(r, thresholds)) for t, r in returns.items()}


def snapshot_at(
    panel: PricePanel,
    baseline: dt.date,
    at: dt.date,
    thresholds: tuple[float, float] = DEFAULT_THRESHOLDS,
) -> SnapshotClassification:
    """Classify every panel ticker by its return from baseline to `at`."""
    entries = classify(cumulative_return(panel, baseline, at), thresholds)
    return SnapshotClassification(at=at, baseline=baseline, entries=entries)


def band_series(
    panel: PricePanel,
    bands: BandAssignment,
    baseline: dt.date,
    dates: Sequence[dt.date],
) -> BandSeries:
    """Equal-weighted mean cumulative return per band at each requested date."""
    member_rows: list[list[int]] = []
    for band in range(1, bands.num_bands + 1):
        members = bands.members(band)
        member_rows.append([panel.tickers.index(t) for t in members])

    values = np.full((bands.num_bands, len(dates)), np.nan)
    j0 = panel.date_column(baseline)
    base = panel.closes[:, j0]
    for j, at in enumerate(dates):
        col = panel.date_column(at)
        returns = panel.closes[:, col] / base - 1.0
        for b, rows in enumerate(member_rows):
            if rows:
                values[b, j] = float(np.mean(returns[rows]))
    return BandSeries(
        center=bands.center,
        dates=tuple(dates),
        values=values,
        counts=tuple(len(rows) for rows in member_rows),
    )


def first_crossing(series: BandSeries, band: int, level: float) -> dt.date | None:
    """Earliest date at which a band's mean return is at or below `level`."""
    row = series.values[band - 1]
    for j, v in enumerate(row):
        if not math.isnan(v) and v <= level:
            return series.dates[j]
    return None


def write_band_series_csv(series: BandSeries, path: Path) -> None:
    """Band series CSV: `date,band1,...`; empty field where a band is absent."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        header = ",".join(f"band{b}" for b in range(1, series.values.shape[0] + 1))
        fh.write(f"date,{header}\n")
        for j, at in enumerate(series.dates):
            cells = [
                "" if math.isnan(series.values[b, j]) else _fmt17(series.values[b, j])
                for b in range(series.values.shape[0])
            ]
            fh.write(at.isoformat() + "," + ",".join(cells) + "\n")


def write_snapshot_csv(snapshot: SnapshotClassification, path: Path) -> None:
    """Snapshot CSV: `ticker,return,class` sorted by ticker."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("ticker,return,class\n")
        for ticker in sorted(snapshot.entries):
            value, label = snapshot.entries[ticker]
            fh.write(f"{ticker},{_fmt17(value)},{label}\n")
