"""Regenerate the QME and square-root experiment tables.

Runs every QME iteration in every representation, then the square root of the
shifted test matrix for each shift, and prints one report row per run.

Run with:
    uv run python scripts/regenerate_tables.py                   # both tables
    uv run python scripts/regenerate_tables.py --only sqrt       # square roots only
    uv run python scripts/regenerate_tables.py --format csv > tables.csv
"""

from __future__ import annotations

import argparse
import logging
import sys
import time

from sqt_kernel.cli import REPRESENTATIONS, format_rows, report_row
from sqt_kernel.models import SqtError
from sqt_kernel.solvers import (
    QBD_SYMBOLS,
    QmeVariant,
    banded_sqrt_matrix,
    banded_sqrt_symbol,
    qbd_problem,
    qme_solve,
    qme_symbol_solve,
    sqrt_solve,
    sqrt_symbol_solve,
)

DELTAS = (1.0, 1e-1, 1e-2, 1e-3)


def qme_rows() -> list[dict[str, str]]:
    rows: list[dict[str, str]] = []
    for variant in QmeVariant:
        for name, target in REPRESENTATIONS.items():
            label = f"qme {variant.value} {name}"
            print(f"  {label} ...", file=sys.stderr)
            try:
                if target is None:
                    symbols = [QBD_SYMBOLS[k] for k in ("a", "b", "c")]
                    _, report = qme_symbol_solve(*symbols, variant=variant)
                else:
                    _, report = qme_solve(qbd_problem(target[0], target[1], variant))
            except SqtError as exc:
                print(f"  {label}: {exc}", file=sys.stderr)
                continue
            rows.append(report_row(label, report))
    return rows


def sqrt_rows(deltas: tuple[float, ...] = DELTAS) -> list[dict[str, str]]:
    rows: list[dict[str, str]] = []
    for delta in deltas:
        for name, target in REPRESENTATIONS.items():
            label = f"sqrt delta={delta:g} {name}"
            print(f"  {label} ...", file=sys.stderr)
            try:
                if target is None:
                    _, report = sqrt_symbol_solve(banded_sqrt_symbol(delta))
                else:
                    _, report = sqrt_solve(banded_sqrt_matrix(delta, *target))
            except SqtError as exc:
                print(f"  {label}: {exc}", file=sys.stderr)
                continue
            rows.append(report_row(label, report))
    return rows


def main() -> int:
    parser = argparse.ArgumentParser(description="Regenerate the experiment tables")
    parser.add_argument("--only", choices=["qme", "sqrt"], default=None, help="run a single table")
    parser.add_argument("--format", choices=["table", "csv"], default="table", help="output format")
    parser.add_argument("--verbose", "-v", action="store_true", help="log solver progress")
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)

    started = time.perf_counter()
    rows: list[dict[str, str]] = []
    if args.only in (None, "qme"):
        rows.extend(qme_rows())
    if args.only in (None, "sqrt"):
        rows.extend(sqrt_rows())
    sys.stdout.write(format_rows(rows, args.format))
    print(f"\n{len(rows)} runs in {time.perf_counter() - started:.1f}s", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
