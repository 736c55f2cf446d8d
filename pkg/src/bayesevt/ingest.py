"""Read dated observations from CSV files."""
from __future__ import annotations

import csv
import math

import numpy as np

from .errors import DataFormatError
from .extract import TimeSeries


def ingest_csv(path, value_column: str, date_column: str, group_column: str | None = None,
               name: str | None = None) -> TimeSeries:
    """Load ``date,value[,group]`` rows into a :class:`TimeSeries` sorted by date.

    Dates must be ISO ``YYYY-MM-DD``. Any unparseable row raises
    :class:`DataFormatError` naming its line; so does a repeated date
    within one group.
    """
    with open(path, newline="") as fh:
        reader = csv.DictReader(line for line in fh if not line.startswith("#"))
        header = reader.fieldnames or []
        for col in (value_column, date_column, group_column):
            if col is not None and col not in header:
                raise DataFormatError(f"{path}: missing column {col!r} (have {header})")
        dates, values, groups, lines = [], [], [], []
        for row in reader:
            line = reader.line_num
            try:
                d = np.datetime64(row[date_column].strip(), "D")
                if np.isnat(d):
                    raise ValueError("empty date")
                v = float(row[value_column])
                if not math.isfinite(v):
                    raise ValueError("non-finite value")
            except (ValueError, TypeError, AttributeError) as e:
                raise DataFormatError(f"{path}: line {line}: {e}") from None
            dates.append(d)
            values.append(v)
            groups.append(row[group_column].strip() if group_column else "")
            lines.append(line)
    if not values:
        raise DataFormatError(f"{path}: no data rows")
    dates = np.array(dates, dtype="datetime64[D]")
    groups = np.array(groups, dtype=str)
    values = np.array(values)
    order = np.lexsort((dates, groups)) if group_column else np.argsort(dates, kind="stable")
    dates, values, groups = dates[order], values[order], groups[order]
    same = (dates[1:] == dates[:-1]) & (groups[1:] == groups[:-1])
    if same.any():
        i = int(np.flatnonzero(same)[0]) + 1
        where = f" in group {groups[i]!r}" if group_column else ""
        raise DataFormatError(
            f"{path}: line {lines[order[i]]}: duplicate date {dates[i]}{where}")
    return TimeSeries(dates, values, name or value_column, groups if group_column else None)
