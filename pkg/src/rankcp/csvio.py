"""Numeric CSV input and output."""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np


class CSVFormatError(ValueError):
    """Malformed CSV input; ``row`` and ``column`` are 1-based file positions."""

    def __init__(self, message: str, row: int, column: int | None = None):
        where = f"row {row}" if column is None else f"row {row}, column {column}"
        super().__init__(f"{where}: {message}")
        self.row = row
        self.column = column


def load_csv(path, has_header: bool = False) -> np.ndarray:
    """Read a numeric CSV into a ``(T, d)`` float array.

    Rows are observations in time order and columns are dimensions. Blank
    lines are ignored. Ragged rows, non-numeric or non-finite cells and files
    without data rows raise :class:`CSVFormatError`.
    """
    rows: list[list[float]] = []
    width = None
    skip_header = has_header
    with open(path, newline="") as fh:
        for lineno, record in enumerate(csv.reader(fh), start=1):
            if not record or all(not cell.strip() for cell in record):
                continue
            if skip_header:
                skip_header = False
                continue
            if width is None:
                width = len(record)
            elif len(record) != width:
                raise CSVFormatError(f"expected {width} columns, found {len(record)}", lineno)
            values = []
            for col, cell in enumerate(record, start=1):
                try:
                    v = float(cell)
                except ValueError:
                    raise CSVFormatError(f"non-numeric value {cell.strip()!r}", lineno, col) from None
                if not math.isfinite(v):
                    raise CSVFormatError(f"non-finite value {cell.strip()!r}", lineno, col)
                values.append(v)
            rows.append(values)
    if not rows:
        raise CSVFormatError("no data rows", 1)
    return np.array(rows, dtype=float)


def write_csv(series, path, header: list[str] | None = None) -> None:
    """Write ``series`` with shortest round-tripping float formatting."""
    arr = np.asarray(series, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    with open(Path(path), "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if header:
            writer.writerow(header)
        for row in arr:
            writer.writerow([repr(float(v)) for v in row])
