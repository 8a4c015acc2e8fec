"""Price and sector ingestion: CSV parsing, calendar alignment, return series."""

from __future__ import annotations

import datetime as dt
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import AlignmentError, ParseError

logger = logging.getLogger(__name__)

PRICE_HEADER = "ticker,date,close"
SECTOR_HEADER = "ticker,sector"

# The nine industry categories, in canonical row order. Sector CSVs must
# spell these exactly (case-sensitive, with spaces).
SECTORS = (
    "Basic Materials",
    "Conglomerates",
    "Consumer Goods",
    "Financial",
    "Healthcare",
    "Industrial Goods",
    "Services",
    "Technology",
    "Utilities",
)

_MAX_TICKER_LEN = 6


@dataclass(frozen=True)
class PriceRecord:
    """One closing price observation for one ticker."""

    ticker: str
    date: dt.date
    close: float


@dataclass(eq=False)
class PricePanel:
    """Dense closing-price matrix over a shared trading calendar.

    Tickers are unique and sorted lexicographically; dates are strictly
    increasing; ``closes[i, j]`` is the close of ``tickers[i]`` on
    ``dates[j]`` and every cell is populated.
    """

    tickers: tuple[str, ...]
    dates: tuple[dt.date, ...]
    closes: np.ndarray  # shape (len(tickers), len(dates)), all > 0

    def __post_init__(self):
        self._ticker_index = {t: i for i, t in enumerate(self.tickers)}
        self._date_index = {d: j for j, d in enumerate(self.dates)}

    def ticker_row(self, ticker: str) -> np.ndarray:
        try:
            return self.closes[self._ticker_index[ticker]]
        except KeyError:
            raise AlignmentError(f"unknown ticker {ticker}") from None

    def date_column(self, date: dt.date) -> int:
        try:
            return self._date_index[date]
        except KeyError:
            raise AlignmentError(f"date {date.isoformat()} not in panel calendar") from None

    def window(self, start: dt.date, end: dt.date) -> "PricePanel":
        """Restrict the panel to calendar dates in [start, end]."""
        keep = [j for j, d in enumerate(self.dates) if start <= d <= end]
        if len(keep) < 2:
            raise AlignmentError(
                f"fewer than 2 trading dates between {start.isoformat()} and {end.isoformat()}"
            )
        return PricePanel(
            tickers=self.tickers,
            dates=tuple(self.dates[j] for j in keep),
            closes=self.closes[:, keep],
        )

    def equals(self, other: "PricePanel") -> bool:
        return (
            self.tickers == other.tickers
            and self.dates == other.dates
            and np.array_equal(self.closes, other.closes)
        )


@dataclass(eq=False)
class ReturnsPanel:
    """Daily log-returns plus per-series mean and population stddev.

    ``values[i, t]`` is ln(close(t+1) / close(t)) for ``tickers[i]``;
    ``dates`` are the return dates (the panel calendar minus its first day).
    """

    tickers: tuple[str, ...]
    dates: tuple[dt.date, ...]
    values: np.ndarray  # shape (len(tickers), len(dates))
    means: np.ndarray
    stddevs: np.ndarray


@dataclass(frozen=True)
class AlignmentPolicy:
    """Controls which tickers survive calendar alignment.

    ``min_coverage`` is the fraction of the reference calendar a ticker
    must cover to be kept (1.0 = every reference date). The reference
    calendar is the set of dates held by a strict majority of tickers;
    the final panel calendar is the intersection over surviving tickers,
    so the output is always dense.
    """

    min_coverage: float = 1.0


def _valid_ticker(text: str) -> bool:
    return (
        0 < len(text) <= _MAX_TICKER_LEN
        and text == text.strip()
        and text == text.upper()
        and "," not in text
        and '"' not in text
    )


def _parse_date(text: str, lineno: int) -> dt.date:
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        raise ParseError(f"unparsable date {text!r}, line {lineno}") from None


def parse_prices(source: Iterable[str]) -> list[PriceRecord]:
    """Parse `ticker,date,close` rows into price records.

    A leading header row equal to the documented one is skipped; line
    numbers in errors refer to physical 1-based lines of the stream.
    """
    records: list[PriceRecord] = []
    seen: dict[tuple[str, dt.date], int] = {}
    for lineno, raw in enumerate(source, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip():
            continue
        if lineno == 1 and line == PRICE_HEADER:
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise ParseError(f"expected 3 columns, got {len(parts)}, line {lineno}")
        ticker, date_text, close_text = (p.strip() for p in parts)
        if not _valid_ticker(ticker):
            raise ParseError(f"invalid ticker {ticker!r}, line {lineno}")
        date = _parse_date(date_text, lineno)
        try:
            close = float(close_text)
        except ValueError:
            raise ParseError(f"unparsable price {close_text!r}, line {lineno}") from None
        if not math.isfinite(close):
            raise ParseError(f"unparsable price {close_text!r}, line {lineno}")
        if close <= 0:
            raise ParseError(f"non-positive price, line {lineno}")
        key = (ticker, date)
        if key in seen:
            raise ParseError(
                f"duplicate (ticker, date) {ticker},{date.isoformat()}: "
                f"lines {seen[key]} and {lineno}"
            )
        seen[key] = lineno
        records.append(PriceRecord(ticker, date, close))
    return records


def parse_sectors(source: Iterable[str]) -> dict[str, str]:
    """Parse `ticker,sector` rows into a ticker -> sector map."""
    assignments: dict[str, str] = {}
    first_line: dict[str, int] = {}
    for lineno, raw in enumerate(source, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip():
            continue
        if lineno == 1 and line == SECTOR_HEADER:
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ParseError(f"expected 2 columns, got {len(parts)}, line {lineno}")
        ticker, sector = (p.strip() for p in parts)
        if not _valid_ticker(ticker):
            raise ParseError(f"invalid ticker {ticker!r}, line {lineno}")
        if sector not in SECTORS:
            raise ParseError(f"unknown sector {sector!r}, line {lineno}")
        if ticker in assignments:
            raise ParseError(
                f"duplicate sector assignment for {ticker}: "
                f"lines {first_line[ticker]} and {lineno}"
            )
        assignments[ticker] = sector
        first_line[ticker] = lineno
    return assignments


def align_panel(
    records: Iterable[PriceRecord], policy: AlignmentPolicy = AlignmentPolicy()
) -> PricePanel:
    """Build a dense panel over the shared trading calendar.

    Records from merged sources may repeat; exact duplicates collapse and
    conflicting closes for the same (ticker, date) are an error. Tickers
    whose coverage of the reference calendar falls below the policy
    threshold are dropped (and logged); the panel calendar is then the
    intersection of the survivors' date sets.
    """
    by_ticker: dict[str, dict[dt.date, float]] = {}
    for rec in records:
        dates = by_ticker.setdefault(rec.ticker, {})
        prior = dates.get(rec.date)
        if prior is not None and prior != rec.close:
            raise AlignmentError(
                f"conflicting closes for {rec.ticker} on {rec.date.isoformat()}: "
                f"{prior} vs {rec.close}"
            )
        dates[rec.date] = rec.close

    if len(by_ticker) < 2:
        raise AlignmentError("insufficient overlap: fewer than 2 tickers")

    # Reference calendar: dates held by a strict majority of tickers. A plain
    # intersection would let one sparse ticker collapse the whole calendar
    # before coverage can be judged.
    n_tickers = len(by_ticker)
    date_counts: dict[dt.date, int] = {}
    for dates in by_ticker.values():
        for d in dates:
            date_counts[d] = date_counts.get(d, 0) + 1
    reference = {d for d, c in date_counts.items() if 2 * c > n_tickers}
    if not reference:
        raise AlignmentError("insufficient overlap: no majority calendar")

    kept: list[str] = []
    dropped: list[str] = []
    for ticker in sorted(by_ticker):
        coverage = len(reference & by_ticker[ticker].keys()) / len(reference)
        if coverage < policy.min_coverage:
            dropped.append(ticker)
        else:
            kept.append(ticker)
    if dropped:
        logger.warning(
            "alignment dropped %d ticker(s) below %.0f%% coverage: %s",
            len(dropped),
            100 * policy.min_coverage,
            ", ".join(dropped),
        )

    if len(kept) < 2:
        raise AlignmentError("insufficient overlap: fewer than 2 surviving tickers")
    calendar = set(by_ticker[kept[0]].keys())
    for ticker in kept[1:]:
        calendar &= by_ticker[ticker].keys()
    if len(calendar) < 3:
        raise AlignmentError("insufficient overlap: fewer than 3 shared dates")

    dates = tuple(sorted(calendar))
    closes = np.empty((len(kept), len(dates)))
    for i, ticker in enumerate(kept):
        series = by_ticker[ticker]
        for j, d in enumerate(dates):
            closes[i, j] = series[d]
    return PricePanel(tickers=tuple(kept), dates=dates, closes=closes)


def log_returns(panel: PricePanel) -> ReturnsPanel:
    """Daily log-returns ln(close_t / close_{t-1}) with per-series stats."""
    if len(panel.dates) < 2:
        raise AlignmentError("panel needs at least 2 dates for returns")
    values = np.log(panel.closes[:, 1:] / panel.closes[:, :-1])
    return ReturnsPanel(
        tickers=panel.tickers,
        dates=panel.dates[1:],
        values=values,
        means=values.mean(axis=1),
        stddevs=values.std(axis=1),  # population stddev, matching the correlation
    )


def cumulative_return(
    panel: PricePanel, baseline: dt.date, at: dt.date
) -> dict[str, float]:
    """Arithmetic return close(at)/close(baseline) - 1 for every ticker."""
    j0 = panel.date_column(baseline)
    j1 = panel.date_column(at)
    if j1 < j0:
        raise AlignmentError(
            f"snapshot date {at.isoformat()} precedes baseline {baseline.isoformat()}"
        )
    ratios = panel.closes[:, j1] / panel.closes[:, j0] - 1.0
    return {t: float(ratios[i]) for i, t in enumerate(panel.tickers)}


def check_sector_coverage(tickers: Iterable[str], sectors: Mapping[str, str]) -> None:
    """Every analysed ticker must carry exactly one sector assignment."""
    missing = [t for t in tickers if t not in sectors]
    if missing:
        raise AlignmentError(
            "missing sector assignment for: " + ", ".join(sorted(missing))
        )
