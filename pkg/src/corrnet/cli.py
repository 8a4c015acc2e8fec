"""Command-line pipeline: files in, hashed artifact manifest out."""

from __future__ import annotations

import argparse
import datetime as dt
import hashlib
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import correlate, export, figures, graph, snapshot
from .errors import CorrnetError
from .ingest import (
    PricePanel,
    align_panel,
    check_sector_coverage,
    log_returns,
    parse_prices,
    parse_sectors,
)

DEFAULT_BASELINE = dt.date(2007, 8, 1)
DEFAULT_END = dt.date(2008, 10, 10)
# Documented default snapshot dates: onset of mortgage-market volatility,
# the Northern Rock failure, the January 2008 turbulence, the Bear Stearns
# collapse, the Lehman collapse, and the end of the worst Dow week.
DEFAULT_SNAPSHOT_DATES = (
    dt.date(2007, 8, 10),
    dt.date(2007, 9, 14),
    dt.date(2008, 1, 17),
    dt.date(2008, 3, 17),
    dt.date(2008, 9, 15),
    dt.date(2008, 10, 10),
)
OUT_DIR_ENV = "CORRNET_OUT_DIR"

_CONFIG_KEYS = {
    "prices",
    "sectors",
    "baseline",
    "end",
    "snapshot-date",
    "band-width",
    "yellow-threshold",
    "red-threshold",
    "out-dir",
    "nearest-prior",
}


@dataclass
class RunConfig:
    """Validated inputs for the full pipeline run."""

    prices_path: Path
    sectors_path: Path
    output_dir: Path
    baseline_date: dt.date = DEFAULT_BASELINE
    end_date: dt.date = DEFAULT_END
    snapshot_dates: tuple[dt.date, ...] = DEFAULT_SNAPSHOT_DATES
    band_width: float = graph.DEFAULT_BAND_WIDTH
    thresholds: tuple[float, float] = snapshot.DEFAULT_THRESHOLDS
    nearest_prior: bool = False

    def validate(self) -> None:
        if self.baseline_date >= self.end_date:
            raise CorrnetError(
                f"baseline {self.baseline_date.isoformat()} must precede "
                f"end {self.end_date.isoformat()}"
            )
        if self.band_width <= 0:
            raise CorrnetError("band width must be positive")
        lower, upper = self.thresholds
        if not lower < upper:
            raise CorrnetError(f"thresholds must be ordered, got {lower} >= {upper}")
        for at in self.snapshot_dates:
            if not self.baseline_date <= at <= self.end_date:
                raise CorrnetError(
                    f"snapshot date {at.isoformat()} outside "
                    f"[{self.baseline_date.isoformat()}, {self.end_date.isoformat()}]"
                )


def _parse_date(text: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        raise CorrnetError(f"unparsable date {text!r} (expected YYYY-MM-DD)") from None


def _require_file(path: Path, role: str) -> Path:
    if not Path(path).is_file():
        raise CorrnetError(f"missing {role} file: {path}")
    return Path(path)


def _load_panel(prices_path: Path, baseline: dt.date, end: dt.date) -> PricePanel:
    _require_file(prices_path, "prices")
    with open(prices_path, "r", encoding="utf-8") as fh:
        records = parse_prices(fh)
    return align_panel(records).window(baseline, end)


def _load_sectors(sectors_path: Path) -> dict[str, str]:
    _require_file(sectors_path, "sectors")
    with open(sectors_path, "r", encoding="utf-8") as fh:
        return parse_sectors(fh)


def resolve_snapshot_date(panel: PricePanel, at: dt.date, nearest_prior: bool) -> dt.date:
    """Map a requested snapshot date to a trading date, or fail loudly.

    Silent substitution would corrupt event timing, so falling back to the
    last prior close requires the explicit flag.
    """
    if at in panel.dates:
        return at
    if not nearest_prior:
        raise CorrnetError(
            f"snapshot date {at.isoformat()} is not a trading day in the panel "
            "(pass --nearest-prior to use the last prior close)"
        )
    prior = [d for d in panel.dates if d <= at]
    if not prior:
        raise CorrnetError(f"no trading day at or before {at.isoformat()}")
    return prior[-1]


def run_pipeline(config: RunConfig) -> dict[str, str]:
    """Execute every stage and write all artifacts plus a hashed manifest.

    Artifacts, relative to the output directory: correlation.csv,
    distance.csv, mst.csv, centrality.csv, sector_table.csv,
    band_series.csv, tree_sectors.dot, band_series.png, and one
    snapshot_<date>.csv + snapshot_<date>.dot pair per snapshot date;
    manifest.csv lists each with a sha256. Partial outputs are removed if
    any stage fails.
    """
    config.validate()
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def emit(name: str, writer) -> None:
        path = out_dir / name
        writer(path)
        written.append(path)

    try:
        panel = _load_panel(config.prices_path, config.baseline_date, config.end_date)
        sectors = _load_sectors(config.sectors_path)
        check_sector_coverage(panel.tickers, sectors)

        returns = log_returns(panel)
        corr = correlate.pearson_matrix(returns)
        dist = correlate.distance_matrix(corr)
        emit("correlation.csv", lambda p: correlate.write_matrix_csv(corr.tickers, corr.rho, p))
        emit("distance.csv", lambda p: correlate.write_matrix_csv(dist.tickers, dist.d, p))

        tree = graph.minimum_spanning_tree(graph.build_graph(dist))
        emit("mst.csv", lambda p: graph.write_tree_csv(tree, p))

        scores = graph.betweenness(tree)
        emit("centrality.csv", lambda p: graph.write_centrality_csv(scores, p))

        table = correlate.sector_table(corr, sectors)
        emit("sector_table.csv", lambda p: correlate.write_sector_table_csv(table, p))

        center = graph.central_node(scores)
        bands = graph.distance_bands(dist, center, config.band_width)
        series = snapshot.band_series(panel, bands, config.baseline_date, panel.dates)
        emit("band_series.csv", lambda p: snapshot.write_band_series_csv(series, p))
        emit(
            "band_series.png",
            lambda p: figures.render_band_series(series, p, thresholds=config.thresholds),
        )

        emit(
            "tree_sectors.dot",
            lambda p: p.write_text(
                export.to_dot(tree, export.sector_colors(sectors)), encoding="utf-8"
            ),
        )

        for requested in config.snapshot_dates:
            at = resolve_snapshot_date(panel, requested, config.nearest_prior)
            snap = snapshot.snapshot_at(panel, config.baseline_date, at, config.thresholds)
            stamp = requested.isoformat()
            emit(f"snapshot_{stamp}.csv", lambda p, s=snap: snapshot.write_snapshot_csv(s, p))
            emit(
                f"snapshot_{stamp}.dot",
                lambda p, s=snap: p.write_text(
                    export.to_dot(tree, export.class_colors(s)), encoding="utf-8"
                ),
            )
    except BaseException:
        for path in written:
            path.unlink(missing_ok=True)
        raise

    manifest = {p.name: _sha256(p) for p in written}
    manifest_path = out_dir / "manifest.csv"
    with open(manifest_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("path,sha256\n")
        for name in sorted(manifest):
            fh.write(f"{name},{manifest[name]}\n")
    return manifest


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_corr(args) -> int:
    panel = _load_panel(args.prices, args.baseline, args.end)
    corr = correlate.pearson_matrix(log_returns(panel))
    dist = correlate.distance_matrix(corr)
    correlate.write_matrix_csv(corr.tickers, corr.rho, args.out_corr)
    correlate.write_matrix_csv(dist.tickers, dist.d, args.out_dist)
    print(f"wrote {args.out_corr}")
    print(f"wrote {args.out_dist}")
    return 0


def _read_distance(path: Path) -> correlate.DistanceMatrix:
    _require_file(path, "distance matrix")
    tickers, d = correlate.read_matrix_csv(path)
    return correlate.DistanceMatrix(tickers=tickers, d=d)


def _cmd_mst(args) -> int:
    dist = _read_distance(args.dist)
    tree = graph.minimum_spanning_tree(graph.build_graph(dist))
    graph.write_tree_csv(tree, args.out)
    print(f"wrote {args.out} ({len(tree.edges)} edges)")
    return 0


def _cmd_centrality(args) -> int:
    _require_file(args.tree, "spanning tree")
    tree = graph.read_tree_csv(args.tree)
    graph.write_centrality_csv(graph.betweenness(tree), args.out)
    print(f"wrote {args.out}")
    return 0


def _cmd_sectors(args) -> int:
    _require_file(args.corr, "correlation matrix")
    tickers, rho = correlate.read_matrix_csv(args.corr)
    corr = correlate.CorrelationMatrix(tickers=tickers, rho=rho)
    sectors = _load_sectors(args.sectors)
    check_sector_coverage(tickers, sectors)
    table = correlate.sector_table(corr, sectors, within=args.within)
    correlate.write_sector_table_csv(table, args.out)
    print(f"wrote {args.out}")
    return 0


def _cmd_bands(args) -> int:
    panel = _load_panel(args.prices, args.baseline, args.end)
    dist = _read_distance(args.dist)
    _require_file(args.centrality, "centrality scores")
    scores = graph.read_centrality_csv(args.centrality)
    center = graph.central_node(scores)
    bands = graph.distance_bands(dist, center, args.band_width)
    series = snapshot.band_series(panel, bands, args.baseline, panel.dates)
    snapshot.write_band_series_csv(series, args.out)
    print(f"wrote {args.out} (center {center})")
    if args.out_figure is not None:
        thresholds = (args.red_threshold, args.yellow_threshold)
        figures.render_band_series(series, args.out_figure, thresholds=thresholds)
        print(f"wrote {args.out_figure}")
    return 0


def _cmd_snapshot(args) -> int:
    panel = _load_panel(args.prices, args.baseline, args.end)
    _require_file(args.tree, "spanning tree")
    tree = graph.read_tree_csv(args.tree)
    thresholds = (args.red_threshold, args.yellow_threshold)
    at = resolve_snapshot_date(panel, args.date, args.nearest_prior)
    snap = snapshot.snapshot_at(panel, args.baseline, at, thresholds)
    snapshot.write_snapshot_csv(snap, args.out_csv)
    print(f"wrote {args.out_csv}")
    if args.out_dot is not None:
        args.out_dot.write_text(
            export.to_dot(tree, export.class_colors(snap)), encoding="utf-8"
        )
        print(f"wrote {args.out_dot}")
    return 0


def _cmd_export_dot(args) -> int:
    _require_file(args.tree, "spanning tree")
    tree = graph.read_tree_csv(args.tree)
    sectors = _load_sectors(args.sectors)
    check_sector_coverage(tree.nodes, sectors)
    args.out.write_text(export.to_dot(tree, export.sector_colors(sectors)), encoding="utf-8")
    print(f"wrote {args.out}")
    return 0


def _parse_config_file(path: Path) -> dict[str, list[str]]:
    """Plain `key = value` lines; repeated keys accumulate."""
    _require_file(path, "config")
    values: dict[str, list[str]] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise CorrnetError(f"{path}: expected key = value, line {lineno}")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in _CONFIG_KEYS:
                raise CorrnetError(f"{path}: unknown key {key!r}, line {lineno}")
            values.setdefault(key, []).append(value)
    return values


def _single(values: dict[str, list[str]], key: str) -> str | None:
    got = values.get(key)
    if got is None:
        return None
    if len(got) > 1:
        raise CorrnetError(f"config key {key!r} given {len(got)} times")
    return got[0]


def _build_run_config(args) -> RunConfig:
    file_values: dict[str, list[str]] = {}
    if args.config is not None:
        file_values = _parse_config_file(args.config)

    def pick(flag_value, key: str, parse, default):
        if flag_value is not None:
            return flag_value
        text = _single(file_values, key)
        if text is not None:
            return parse(text)
        return default

    out_dir = args.out_dir
    if out_dir is None:
        text = _single(file_values, "out-dir")
        if text is not None:
            out_dir = Path(text)
        elif os.environ.get(OUT_DIR_ENV):
            out_dir = Path(os.environ[OUT_DIR_ENV])
        else:
            raise CorrnetError(f"missing --out-dir (or {OUT_DIR_ENV})")

    prices = pick(args.prices, "prices", Path, None)
    sectors = pick(args.sectors, "sectors", Path, None)
    if prices is None:
        raise CorrnetError("missing --prices")
    if sectors is None:
        raise CorrnetError("missing --sectors")

    if args.snapshot_date:
        snapshot_dates = tuple(args.snapshot_date)
    elif "snapshot-date" in file_values:
        snapshot_dates = tuple(_parse_date(v) for v in file_values["snapshot-date"])
    else:
        snapshot_dates = DEFAULT_SNAPSHOT_DATES

    nearest_prior = args.nearest_prior
    if not nearest_prior:
        text = _single(file_values, "nearest-prior")
        if text is not None:
            if text not in ("true", "false"):
                raise CorrnetError(f"nearest-prior must be true or false, got {text!r}")
            nearest_prior = text == "true"

    return RunConfig(
        prices_path=prices,
        sectors_path=sectors,
        output_dir=out_dir,
        baseline_date=pick(args.baseline, "baseline", _parse_date, DEFAULT_BASELINE),
        end_date=pick(args.end, "end", _parse_date, DEFAULT_END),
        snapshot_dates=snapshot_dates,
        band_width=pick(args.band_width, "band-width", float, graph.DEFAULT_BAND_WIDTH),
        thresholds=(
            pick(args.red_threshold, "red-threshold", float, snapshot.DEFAULT_THRESHOLDS[0]),
            pick(args.yellow_threshold, "yellow-threshold", float, snapshot.DEFAULT_THRESHOLDS[1]),
        ),
        nearest_prior=nearest_prior,
    )


def _cmd_run(args) -> int:
    config = _build_run_config(args)
    manifest = run_pipeline(config)
    for name in sorted(manifest):
        print(f"{name}  {manifest[name][:12]}")
    print(f"wrote {Path(config.output_dir) / 'manifest.csv'} ({len(manifest)} artifacts)")
    return 0


def _add_window_flags(parser, with_prices: bool = True) -> None:
    if with_prices:
        parser.add_argument("--prices", type=Path, required=True, help="price CSV (ticker,date,close)")
    parser.add_argument("--baseline", type=_parse_date, default=DEFAULT_BASELINE,
                        help="baseline trading date (default %(default)s)")
    parser.add_argument("--end", type=_parse_date, default=DEFAULT_END,
                        help="last trading date of the window (default %(default)s)")


def _add_threshold_flags(parser) -> None:
    parser.add_argument("--yellow-threshold", type=float, default=snapshot.DEFAULT_THRESHOLDS[1],
                        help="green/yellow cutoff (default %(default)s)")
    parser.add_argument("--red-threshold", type=float, default=snapshot.DEFAULT_THRESHOLDS[0],
                        help="yellow/red cutoff (default %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corrnet",
        description="Correlation-network analysis of daily closing prices",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("corr", help="correlation and distance matrices from prices")
    _add_window_flags(p)
    p.add_argument("--out-corr", type=Path, required=True)
    p.add_argument("--out-dist", type=Path, required=True)
    p.set_defaults(func=_cmd_corr)

    p = sub.add_parser("mst", help="minimum spanning tree from a distance matrix")
    p.add_argument("--dist", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=_cmd_mst)

    p = sub.add_parser("centrality", help="betweenness scores from a spanning tree")
    p.add_argument("--tree", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=_cmd_centrality)

    p = sub.add_parser("sectors", help="sector correlation table")
    p.add_argument("--corr", type=Path, required=True)
    p.add_argument("--sectors", type=Path, required=True)
    p.add_argument("--within", choices=[correlate.WITHIN_EXCLUDE_SELF, correlate.WITHIN_INCLUDE_SELF],
                   default=correlate.WITHIN_EXCLUDE_SELF,
                   help="within-sector averaging convention (default %(default)s)")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=_cmd_sectors)

    p = sub.add_parser("bands", help="distance-band return series from the hub")
    _add_window_flags(p)
    p.add_argument("--dist", type=Path, required=True)
    p.add_argument("--centrality", type=Path, required=True)
    p.add_argument("--band-width", type=float, default=graph.DEFAULT_BAND_WIDTH)
    _add_threshold_flags(p)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--out-figure", type=Path, default=None, help="optional PNG report")
    p.set_defaults(func=_cmd_bands)

    p = sub.add_parser("snapshot", help="green/yellow/red classification at a date")
    _add_window_flags(p)
    p.add_argument("--tree", type=Path, required=True)
    p.add_argument("--date", type=_parse_date, required=True)
    p.add_argument("--nearest-prior", action="store_true",
                   help="use the last prior close when the date is not a trading day")
    _add_threshold_flags(p)
    p.add_argument("--out-csv", type=Path, required=True)
    p.add_argument("--out-dot", type=Path, default=None)
    p.set_defaults(func=_cmd_snapshot)

    p = sub.add_parser("export-dot", help="sector-colored DOT text for a spanning tree")
    p.add_argument("--tree", type=Path, required=True)
    p.add_argument("--sectors", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=_cmd_export_dot)

    p = sub.add_parser("run", help="full pipeline with hashed manifest")
    p.add_argument("--prices", type=Path, default=None)
    p.add_argument("--sectors", type=Path, default=None)
    p.add_argument("--baseline", type=_parse_date, default=None)
    p.add_argument("--end", type=_parse_date, default=None)
    p.add_argument("--snapshot-date", type=_parse_date, action="append", default=None,
                   help="repeatable; defaults to six documented crisis dates")
    p.add_argument("--band-width", type=float, default=None)
    p.add_argument("--yellow-threshold", type=float, default=None)
    p.add_argument("--red-threshold", type=float, default=None)
    p.add_argument("--out-dir", type=Path, default=None,
                   help=f"output directory (or set {OUT_DIR_ENV})")
    p.add_argument("--config", type=Path, default=None, help="key = value config file")
    p.add_argument("--nearest-prior", action="store_true")
    p.set_defaults(func=_cmd_run)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CorrnetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
