"""Matplotlib rendering of the band-series report figure."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")  # headless; must precede pyplot import
import matplotlib.pyplot as plt

from .snapshot import BandSeries

# Line color per band, innermost first.
BAND_COLORS = ("orange", "green", "blue", "purple", "black")


def band_color(band: int) -> str:
    return BAND_COLORS[(band - 1) % len(BAND_COLORS)]


def render_band_series(
    series: BandSeries,
    path: Path,
    thresholds: tuple[float, float] | None = None,
) -> None:
    """Plot each band's mean return over time and write the image to `path`.

    Bands with no members are skipped. Output bytes are deterministic for
    identical input, so the image can participate in hashed manifests.
    """
    fig, ax = plt.subplots(figsize=(9, 5.5))
    for b in range(1, series.values.shape[0] + 1):
        row = series.values[b - 1]
        if all(math.isnan(v) for v in row):
            continue
        ax.plot(
            series.dates,
            row,
            color=band_color(b),
            linewidth=1.4,
            label=f"band {b} (n={series.counts[b - 1]})",
        )
    if thresholds is not None:
        for level in thresholds:
            ax.axhline(level, color="0.6", linewidth=0.8, linestyle="--")
    ax.set_ylabel("mean arithmetic return since baseline")
    ax.set_title(f"Mean return by distance band from {series.center}")
    ax.legend(loc="lower left", fontsize=9)
    fig.autofmt_xdate()
    fig.tight_layout()
    fig.savefig(path, dpi=110, metadata={"Software": "corrnet"})
    plt.close(fig)
