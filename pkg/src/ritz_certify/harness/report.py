"""Tables and CSV emission.

Floats are written with 17 significant digits so a CSV round-trips exactly;
missing values (inapplicable bounds) are written as empty fields.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass
class Table:
    columns: list
    rows: list = field(default_factory=list)

    def add(self, **values):
        unknown = set(values) - set(self.columns)
        if unknown:
            raise KeyError(f"unknown columns {sorted(unknown)}")
        self.rows.append([values.get(c) for c in self.columns])

    def column(self, name):
        """Column ``name`` as a float array with ``nan`` for missing values."""
        j = self.columns.index(name)
        return np.array([math.nan if r[j] is None else float(r[j]) for r in self.rows])

    def __len__(self):
        return len(self.rows)


def format_value(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    v = float(v)
    if math.isnan(v):
        return ""
    return f"{v:.17g}"


def write_csv(table, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(table.columns)
        for row in table.rows:
            w.writerow([format_value(v) for v in row])
    return path


def _parse(field_):
    if field_ == "":
        return None
    try:
        return int(field_)
    except ValueError:
        pass
    try:
        return float(field_)
    except ValueError:
        return field_


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        return Table(columns=[])
    return Table(columns=rows[0], rows=[[_parse(f) for f in r] for r in rows[1:]])


def bound_value(report):
    """Value of a :class:`BoundReport` for a table cell, ``None`` if inapplicable."""
    if report is None or not report.applicable:
        return None
    return report.value
