"""Fixed-schema report rows and their CSV / JSON serialization."""

import csv
import json
import math
from dataclasses import dataclass, fields
from typing import Optional

COLUMNS = (
    "method", "mu", "sigma", "eta", "gamma", "w", "lambda", "s", "b", "M",
    "n", "l", "N", "energy", "oracle", "abs_dev", "rel_dev", "residual", "seconds",
)
EXTRA_COLUMNS = ("reference", "status")
MISSING = "n/a"


@dataclass
class ReportRow:
    """One result line. Unset or non-finite numbers serialize as ``n/a``."""

    method: str
    mu: Optional[float] = None
    sigma: Optional[float] = None
    eta: Optional[float] = None
    gamma: Optional[float] = None
    w: Optional[float] = None
    lam: Optional[float] = None
    s: Optional[float] = None
    b: Optional[float] = None
    M: Optional[int] = None
    n: Optional[int] = None
    l: Optional[int] = None
    N: Optional[int] = None
    energy: Optional[float] = None
    oracle: Optional[float] = None
    abs_dev: Optional[float] = None
    rel_dev: Optional[float] = None
    residual: Optional[float] = None
    seconds: Optional[float] = None
    reference: Optional[float] = None
    status: Optional[str] = None

    def __post_init__(self):
        if self.oracle is not None and self.energy is not None and self.abs_dev is None:
            self.abs_dev = abs(self.energy - self.oracle)
            if self.oracle != 0:
                self.rel_dev = self.abs_dev / abs(self.oracle)

    def values(self, columns):
        mapping = {f.name: getattr(self, f.name) for f in fields(self)}
        mapping["lambda"] = mapping.pop("lam")
        return [mapping[c] for c in columns]


def format_cell(value):
    if value is None:
        return MISSING
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, int)) and not isinstance(value, float):
        return str(int(value))
    if not math.isfinite(value):
        return MISSING
    return f"{value:.9g}"


def _json_cell(value):
    text = format_cell(value)
    if isinstance(value, str) or text == MISSING:
        return text
    if isinstance(value, int):
        return value
    return float(text)


def columns_for(rows):
    extra = tuple(c for c in EXTRA_COLUMNS if any(getattr(r, c) is not None for r in rows))
    return COLUMNS + extra


def write_report(rows, stream, fmt="csv", columns=None):
    """Write ``rows`` to ``stream``; the header is always present."""
    columns = columns or columns_for(rows)
    if fmt == "csv":
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_cell(v) for v in row.values(columns)])
    elif fmt == "json":
        payload = {
            "columns": list(columns),
            "rows": [dict(zip(columns, map(_json_cell, row.values(columns)))) for row in rows],
        }
        json.dump(payload, stream, indent=2)
        stream.write("\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")
