#!/usr/bin/env python3
"""Compare candidate sector-correlation tables against a reference table.

Both inputs use the sector-table CSV format emitted by `corrnet sectors`
(header `sector,count,<nine sector columns>`). Typical use: transcribe a
published 9x9 table into the reference CSV, run the pipeline on the matching
price data with both within-sector conventions, and compare each candidate:

    corrnet sectors --corr correlation.csv --sectors sectors.csv \
        --out table_excl.csv
    corrnet sectors --corr correlation.csv --sectors sectors.csv \
        --within include-self --out table_incl.csv
    python scripts/compare_sector_tables.py --reference published.csv \
        --candidate table_excl.csv --candidate table_incl.csv --tol 0.02

Exit code 0 when every compared cell of every candidate is within the
tolerance, 1 otherwise. Cells absent on either side are skipped and counted.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from corrnet.correlate import read_sector_table_csv
from corrnet.ingest import SECTORS


def compare(reference, candidate, tol: float) -> tuple[float, int, list[str]]:
    worst = 0.0
    skipped = 0
    failures = []
    for a, row_sector in enumerate(SECTORS):
        for b in range(a, len(SECTORS)):
            ref = reference.values[a, b]
            got = candidate.values[a, b]
            if math.isnan(ref) or math.isnan(got):
                skipped += 1
                continue
            delta = abs(got - ref)
            worst = max(worst, delta)
            if delta > tol:
                failures.append(
                    f"    {row_sector} x {SECTORS[b]}: |{got:.4f} - {ref:.4f}| = {delta:.4f}"
                )
    return worst, skipped, failures


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--reference", type=Path, required=True)
    parser.add_argument(
        "--candidate", type=Path, action="append", required=True,
        help="repeatable; e.g. one table per within-sector convention",
    )
    parser.add_argument("--tol", type=float, default=0.02)
    args = parser.parse_args(argv)

    reference = read_sector_table_csv(args.reference)
    all_ok = True
    for path in args.candidate:
        candidate = read_sector_table_csv(path)
        worst, skipped, failures = compare(reference, candidate, args.tol)
        status = "OK" if not failures else "FAIL"
        print(f"{path}: max |delta| = {worst:.4f} (tol {args.tol}), "
              f"{skipped} cell(s) skipped -> {status}")
        for line in failures:
            print(line)
        if candidate.counts != reference.counts:
            print(f"    note: member counts differ from reference "
                  f"({candidate.counts} vs {reference.counts})")
        all_ok = all_ok and not failures
    return 0 if all_ok else 1


if __name__ == "__main__":
    sys.exit(main())
