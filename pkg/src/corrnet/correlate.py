"""Pairwise return correlations, the metric distance transform, sector aggregates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import CorrnetError, ParseError
from .ingest import SECTORS, ReturnsPanel

WITHIN_EXCLUDE_SELF = "exclude-self"
WITHIN_INCLUDE_SELF = "include-self"


@dataclass(frozen=True)
class SeriesStats:
    """Mean and population standard deviation of one log-return series."""

    mean: float
    stddev: float


@dataclass(eq=False)
class CorrelationMatrix:
    """Symmetric Pearson correlation matrix with unit diagonal."""

    tickers: tuple[str, ...]
    rho: np.ndarray

    def pair(self, a: str, b: str) -> float:
        i = self.tickers.index(a)
        j = self.tickers.index(b)
        return float(self.rho[i, j])


@dataclass(eq=False)
class DistanceMatrix:
    """Symmetric metric distances in [0, 2] with zero diagonal."""

    tickers: tuple[str, ...]
    d: np.ndarray

    def from_center(self, center: str) -> dict[str, float]:
        try:
            i = self.tickers.index(center)
        except ValueError:
            raise CorrnetError(f"center ticker {center} not in distance matrix") from None
        return {t: float(self.d[i, j]) for j, t in enumerate(self.tickers) if j != i}


@dataclass(eq=False)
class SectorCorrelationTable:
    """9x9 average pairwise correlations within and across sectors.

    ``values`` cells are NaN where no pair exists (a sector with fewer than
    two members has no within-sector average).
    """

    sectors: tuple[str, ...]
    counts: tuple[int, ...]
    values: np.ndarray


def series_stats(returns: ReturnsPanel, ticker: str) -> SeriesStats:
    i = returns.tickers.index(ticker)
    return SeriesStats(mean=float(returns.means[i]), stddev=float(returns.stddevs[i]))


def pearson_matrix(returns: ReturnsPanel) -> CorrelationMatrix:
    """Correlation of log-return series: E((X_i - mu_i)(X_j - mu_j)) / (sigma_i sigma_j).

    Both the covariance and the standard deviations are taken over the same
    n observations with population normalisation, so the two n factors cancel.
    Entries are clamped to [-1, 1]; the diagonal is exactly 1 and the matrix
    exactly symmetric.
    """
    n_obs = returns.values.shape[1]
    if n_obs < 3:
        raise CorrnetError(f"need at least 3 return observations, got {n_obs}")
    for i, sd in enumerate(returns.stddevs):
        if sd == 0.0:
            raise CorrnetError(
                f"zero-variance series {returns.tickers[i]}: correlation undefined"
            )
    z = (returns.values - returns.means[:, None]) / returns.stddevs[:, None]
    raw = (z @ z.T) / n_obs
    raw = np.clip(raw, -1.0, 1.0)
    # Mirror the upper triangle so symmetry is exact, not just approximate.
    upper = np.triu(raw, k=1)
    rho = upper + upper.T
    np.fill_diagonal(rho, 1.0)
    return CorrelationMatrix(tickers=returns.tickers, rho=rho)


def distance_matrix(corr: CorrelationMatrix) -> DistanceMatrix:
    """Metric transform d = sqrt(2 (1 - rho)); 0 at rho=1, 2 at rho=-1."""
    d = np.sqrt(2.0 * (1.0 - corr.rho))
    np.fill_diagonal(d, 0.0)
    return DistanceMatrix(tickers=corr.tickers, d=d)


def sector_table(
    corr: CorrelationMatrix,
    sectors: Mapping[str, str],
    within: str = WITHIN_EXCLUDE_SELF,
) -> SectorCorrelationTable:
    """Average correlations within and across the nine sectors.

    Diagonal cells average over unordered pairs of distinct members by
    default; ``within="include-self"`` additionally counts each member's
    self-correlation (1.0), the alternative convention kept for comparing
    against externally published tables. Cells with no contributing pair
    are NaN.
    """
    if within not in (WITHIN_EXCLUDE_SELF, WITHIN_INCLUDE_SELF):
        raise CorrnetError(f"unknown within-sector convention {within!r}")
    members: dict[str, list[int]] = {s: [] for s in SECTORS}
    for i, ticker in enumerate(corr.tickers):
        sector = sectors.get(ticker)
        if sector is None:
            raise CorrnetError(f"missing sector assignment for {ticker}")
        members[sector].append(i)

    k = len(SECTORS)
    values = np.full((k, k), np.nan)
    for a in range(k):
        rows = members[SECTORS[a]]
        for b in range(a, k):
            cols = members[SECTORS[b]]
            if a == b:
                total = sum(corr.rho[i, j] for x, i in enumerate(rows) for j in rows[x + 1 :])
                count = len(rows) * (len(rows) - 1) // 2
                if within == WITHIN_INCLUDE_SELF:
                    total += len(rows)  # rho_ii = 1 for each member
                    count += len(rows)
            else:
                total = sum(corr.rho[i, j] for i in rows for j in cols)
                count = len(rows) * len(cols)
            if count:
                values[a, b] = values[b, a] = total / count

    counts = tuple(len(members[s]) for s in SECTORS)
    return SectorCorrelationTable(sectors=SECTORS, counts=counts, values=values)


def _fmt17(x: float) -> str:
    return format(x, ".17g")


def write_matrix_csv(tickers: tuple[str, ...], matrix: np.ndarray, path: Path) -> None:
    """Matrix CSV: header `ticker,<t1>,...`; values at 17 significant digits."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("ticker," + ",".join(tickers) + "\n")
        for i, t in enumerate(tickers):
            fh.write(t + "," + ",".join(_fmt17(v) for v in matrix[i]) + "\n")


def read_matrix_csv(path: Path) -> tuple[tuple[str, ...], np.ndarray]:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines or not lines[0].startswith("ticker,"):
        raise ParseError(f"{path}: missing matrix header")
    tickers = tuple(lines[0].split(",")[1:])
    n = len(tickers)
    if len(lines) - 1 != n:
        raise ParseError(f"{path}: expected {n} rows, got {len(lines) - 1}")
    matrix = np.empty((n, n))
    for i, line in enumerate(lines[1:]):
        parts = line.split(",")
        if len(parts) != n + 1:
            raise ParseError(f"{path}: row {i + 2} has {len(parts)} columns, expected {n + 1}")
        if parts[0] != tickers[i]:
            raise ParseError(f"{path}: row label {parts[0]} does not match header order")
        matrix[i] = [float(p) for p in parts[1:]]
    return tickers, matrix


def write_sector_table_csv(table: SectorCorrelationTable, path: Path) -> None:
    """Sector table CSV: `sector,count,<nine sector columns>`; NaN cells empty."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("sector,count," + ",".join(table.sectors) + "\n")
        for a, sector in enumerate(table.sectors):
            cells = [
                "" if math.isnan(table.values[a, b]) else _fmt17(table.values[a, b])
                for b in range(len(table.sectors))
            ]
            fh.write(f"{sector},{table.counts[a]}," + ",".join(cells) + "\n")


def read_sector_table_csv(path: Path) -> SectorCorrelationTable:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines or not lines[0].startswith("sector,count,"):
        raise ParseError(f"{path}: missing sector table header")
    names = tuple(lines[0].split(",")[2:])
    if names != SECTORS:
        raise ParseError(f"{path}: sector columns do not match the nine categories")
    k = len(SECTORS)
    if len(lines) - 1 != k:
        raise ParseError(f"{path}: expected {k} rows, got {len(lines) - 1}")
    counts = []
    values = np.full((k, k), np.nan)
    for a, line in enumerate(lines[1:]):
        parts = line.split(",")
        if len(parts) != k + 2 or parts[0] != SECTORS[a]:
            raise ParseError(f"{path}: bad sector row {a + 2}")
        counts.append(int(parts[1]))
        for b, cell in enumerate(parts[2:]):
            if cell:
                values[a, b] = float(cell)
    return SectorCorrelationTable(sectors=SECTORS, counts=tuple(counts), values=values)
