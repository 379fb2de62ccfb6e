"""Report rows and their CSV/JSON serialization."""
from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .spaces import format_exponent

HEADER = ["experiment", "n", "p", "space", "value", "bound", "margin", "pass", "seed", "runtime_ms"]


@dataclass
class Row:
    """One checked quantity.

    ``value <= bound + tol`` decides ``passed``; when ``lower`` is set the row
    is a band and also needs ``value >= lower - tol``. Rows with ``bound`` None
    are informational and always pass.
    """

    experiment: str
    n: int
    p: float | None
    space: str
    value: float
    bound: float | None
    tol: float = 0.0
    lower: float | None = None
    seed: int = 0
    runtime_ms: float = 0.0
    passed: bool = field(init=False)
    margin: float | None = field(init=False)

    def __post_init__(self):
        self.value = float(self.value)
        if self.bound is None:
            self.margin, self.passed = None, True
            return
        self.bound = float(self.bound)
        margin = self.bound - self.value
        if self.lower is not None:
            margin = min(margin, self.value - self.lower)
        self.margin = margin
        self.passed = bool(margin >= -self.tol) and not math.isnan(self.value)

    def as_record(self) -> dict:
        return {
            "experiment": self.experiment,
            "n": self.n,
            "p": "" if self.p is None else format_exponent(self.p),
            "space": self.space,
            "value": self.value,
            "bound": self.bound,
            "margin": self.margin,
            "pass": self.passed,
            "seed": self.seed,
            "runtime_ms": round(self.runtime_ms, 3),
        }


@dataclass
class BoundReport:
    rows: list[Row] = field(default_factory=list)

    def add(self, row: Row) -> Row:
        self.rows.append(row)
        return row

    def extend(self, rows) -> None:
        self.rows.extend(rows)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def failures(self) -> list[Row]:
        return [r for r in self.rows if not r.passed]

    def records(self) -> list[dict]:
        return [r.as_record() for r in self.rows]


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def to_csv(report: BoundReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for rec in report.records():
        w.writerow([_csv_cell(rec[k]) for k in HEADER])
    return buf.getvalue()


def to_json(report: BoundReport) -> str:
    return json.dumps(report.records(), indent=1, sort_keys=True) + "\n"


def emit_report(report: BoundReport, fmt: str = "csv", path: str | Path | None = None) -> None:
    """Write the report as CSV or JSON to ``path`` (stdout when None)."""
    if fmt == "csv":
        text = to_csv(report)
    elif fmt == "json":
        text = to_json(report)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    path = Path(path)
    try:
        if path.parent and not path.parent.exists():
            path.parent.mkdir(parents=True)
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc


def read_csv(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))
