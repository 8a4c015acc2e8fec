"""Deterministic synthetic crisis fixture: 533 tickers, block-correlated returns.

The generator produces a price panel whose correlation structure mimics a
market-wide crash that starts in the financial core and reaches defensive
stocks last: Financial and Services carry the largest market loadings (and a
tight, almost noise-free financial core), sector factors create blocks, and
per-sector decline schedules stagger the crash from the center outward. A
small negatively-loaded utility group populates the far end of the distance
range.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ingest import SECTORS

DEFAULT_SEED = 53
FIXTURE_START = dt.date(2007, 8, 1)
FIXTURE_END = dt.date(2008, 10, 10)

# Tickers per sector; the bundled universe totals 533 symbols.
SECTOR_TICKER_COUNTS = {
    "Basic Materials": 61,
    "Conglomerates": 7,
    "Consumer Goods": 61,
    "Financial": 85,
    "Healthcare": 49,
    "Industrial Goods": 42,
    "Services": 98,
    "Technology": 100,
    "Utilities": 30,
}

_MARKET_VOL = 0.009
_TIGHT_CORE_SIZE = 20  # leading Financial tickers with near-zero idio noise
_INVERSE_SIZE = 8  # leading Utilities tickers with negative market loading


@dataclass(frozen=True)
class SectorProfile:
    code: str
    market_beta: float
    sector_vol: float
    idio_vol: float
    decline_start: int  # return-step index where the drawdown begins
    decline_end: int
    decline_total: float  # cumulative log-return contributed by the drawdown


PROFILES = {
    "Basic Materials": SectorProfile("BSC", 0.80, 0.0045, 0.0085, 80, 220, -0.28),
    "Conglomerates": SectorProfile("CGL", 1.05, 0.0035, 0.0050, 30, 170, -0.38),
    "Consumer Goods": SectorProfile("CNS", 0.65, 0.0045, 0.0090, 100, 240, -0.24),
    "Financial": SectorProfile("FIN", 1.25, 0.0040, 0.0060, 15, 140, -0.50),
    "Healthcare": SectorProfile("HLC", 0.45, 0.0045, 0.0095, 120, 260, -0.20),
    "Industrial Goods": SectorProfile("IND", 0.90, 0.0040, 0.0080, 60, 200, -0.32),
    "Services": SectorProfile("SVC", 1.10, 0.0040, 0.0065, 25, 160, -0.42),
    "Technology": SectorProfile("TEC", 0.85, 0.0045, 0.0085, 70, 210, -0.30),
    "Utilities": SectorProfile("UTL", 0.35, 0.0040, 0.0085, 140, 280, -0.18),
}

_INVERSE_BETA = -0.55
_INVERSE_IDIO = 0.0040
_INVERSE_DECLINE = (230, 300, -0.16)


def business_days(start: dt.date, end: dt.date) -> tuple[dt.date, ...]:
    """Weekday calendar from start to end inclusive."""
    days = []
    d = start
    while d <= end:
        if d.weekday() < 5:
            days.append(d)
        d += dt.timedelta(days=1)
    return tuple(days)


def fixture_tickers() -> dict[str, list[str]]:
    """Sector -> ticker symbols (code + zero-padded index)."""
    return {
        sector: [f"{PROFILES[sector].code}{i:03d}" for i in range(1, SECTOR_TICKER_COUNTS[sector] + 1)]
        for sector in SECTORS
    }


def _drift_path(n_steps: int, start: int, end: int, total: float) -> np.ndarray:
    drift = np.zeros(n_steps)
    start = max(0, min(start, n_steps))
    end = max(start + 1, min(end, n_steps))
    drift[start:end] = total / (end - start)
    return drift


def make_crisis_fixture(seed: int = DEFAULT_SEED):
    """Generate (tickers, sector map, dates, closes) for the bundled fixture."""
    rng = np.random.default_rng(seed)
    dates = business_days(FIXTURE_START, FIXTURE_END)
    n_steps = len(dates) - 1

    market = rng.normal(0.0, _MARKET_VOL, size=n_steps)
    by_sector = fixture_tickers()
    sector_map: dict[str, str] = {}
    rows: dict[str, np.ndarray] = {}

    for sector in SECTORS:
        profile = PROFILES[sector]
        sector_factor = rng.normal(0.0, profile.sector_vol, size=n_steps)
        drift = _drift_path(n_steps, profile.decline_start, profile.decline_end, profile.decline_total)
        inverse_drift = _drift_path(n_steps, *_INVERSE_DECLINE)
        for k, ticker in enumerate(by_sector[sector]):
            sector_map[ticker] = sector
            beta = profile.market_beta
            idio_vol = profile.idio_vol
            own_drift = drift
            if sector == "Financial" and k < _TIGHT_CORE_SIZE:
                idio_vol = 0.002
            if sector == "Utilities" and k < _INVERSE_SIZE:
                beta = _INVERSE_BETA
                idio_vol = _INVERSE_IDIO
                own_drift = inverse_drift
            returns = (
                beta * market
                + sector_factor
                + rng.normal(0.0, idio_vol, size=n_steps)
                + own_drift
            )
            rows[ticker] = returns

    tickers = tuple(sorted(rows))
    log_paths = np.cumsum(np.stack([rows[t] for t in tickers]), axis=1)
    starts = rng.uniform(25.0, 150.0, size=len(tickers))
    closes = np.empty((len(tickers), len(dates)))
    closes[:, 0] = starts
    closes[:, 1:] = starts[:, None] * np.exp(log_paths)
    return tickers, sector_map, dates, closes


def write_crisis_fixture(out_dir: Path, seed: int = DEFAULT_SEED) -> tuple[Path, Path]:
    """Write prices.csv and sectors.csv for the fixture; returns their paths."""
    tickers, sector_map, dates, closes = make_crisis_fixture(seed)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    prices_path = out_dir / "prices.csv"
    sectors_path = out_dir / "sectors.csv"
    with open(prices_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("ticker,date,close\n")
        for i, ticker in enumerate(tickers):
            for j, d in enumerate(dates):
                fh.write(f"{ticker},{d.isoformat()},{closes[i, j]:.4f}\n")
    with open(sectors_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("ticker,sector\n")
        for ticker in tickers:
            fh.write(f"{ticker},{sector_map[ticker]}\n")
    return prices_path, sectors_path


def main(argv=None) -> int:
    import argparse

    parser = argparse.ArgumentParser(description="Write the synthetic crisis fixture CSVs")
    parser.add_argument("out_dir", type=Path)
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    args = parser.parse_args(argv)
    prices, sectors = write_crisis_fixture(args.out_dir, seed=args.seed)
    print(f"wrote {prices}")
    print(f"wrote {sectors}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
