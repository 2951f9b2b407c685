"""Readers for the two-column sample CSV and raw observation tables."""

from __future__ import annotations

import csv
import io
from typing import TextIO

import numpy as np

from .distance import ObservationSet
from .discrete import PairedSample
from .errors import DataError


def _int(text: str) -> int:
    return int(text.strip())


def read_sample_csv(stream: TextIO) -> PairedSample:
    """Parse ``x,y`` integer rows; a single non-numeric first line is a header.

    Blank lines are skipped; LF and CRLF line endings are both accepted.
    """
    text = stream.read()
    if text.startswith("\ufeff"):
        text = text[1:]
    rows = [r for r in csv.reader(io.StringIO(text, newline="")) if r and any(c.strip() for c in r)]
    xs, ys = [], []
    for lineno, row in enumerate(rows, 1):
        if len(row) != 2:
            raise DataError(f"line {lineno}: expected 2 columns, got {len(row)}")
        try:
            x, y = _int(row[0]), _int(row[1])
        except ValueError:
            if lineno == 1:
                continue
            raise DataError(f"line {lineno}: non-integer value in {row!r}") from None
        xs.append(x)
        ys.append(y)
    return PairedSample(np.asarray(xs, dtype=np.int64), np.asarray(ys, dtype=np.int64))


def read_observation_table(stream: TextIO) -> ObservationSet:
    """Rows of ``alpha, beta_1, ..., beta_d`` (comma or whitespace separated)."""
    values = []
    for lineno, line in enumerate(stream, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.replace(",", " ").split()
        try:
            values.append([float(f) for f in fields])
        except ValueError:
            if not values and lineno == 1:
                continue
            raise DataError(f"line {lineno}: non-numeric value") from None
    if not values:
        raise DataError("empty observation table")
    widths = {len(v) for v in values}
    if len(widths) != 1 or widths.pop() < 2:
        raise DataError("every row needs the same number (>= 2) of columns")
    table = np.asarray(values)
    return ObservationSet(table[:, 0], table[:, 1:])
