"""Panel CSV ingestion and report serialization."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .bootstrap import TestResult
from .errors import DataError, ParseError, RaggedRowsError
from .panel import Panel, TestKind, validate_panel
from .simulation import PowerPoint

RESULT_COLUMNS = ("series_id", "kind", "statistic", "critical_value", "reject")
POWER_COLUMNS = ("kind", "mu", "avg_power", "avg_type1", "reps")


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def load_panel_csv(path) -> Panel:
    """Read ``id, y_1, ..., y_T`` rows; a wholly non-numeric first row is a header."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [(i, r) for i, r in enumerate(csv.reader(fh), start=1) if any(c.strip() for c in r)]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if rows and len(rows[0][1]) > 1 and not any(_is_number(c) for c in rows[0][1][1:]):
        rows = rows[1:]
    if not rows:
        return validate_panel([])
    width = len(rows[0][1])
    ids, data = [], []
    for line, row in rows:
        if len(row) != width:
            raise RaggedRowsError(line, width, len(row))
        values = []
        for col, cell in enumerate(row[1:], start=2):
            try:
                values.append(float(cell))
            except ValueError:
                raise ParseError(line, col, cell) from None
        ids.append(row[0].strip())
        data.append(values)
    return validate_panel(data, ids)


def _clean(x):
    """NaN/inf are not valid JSON; they are written as null."""
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def _nan(x):
    return float("nan") if x is None else float(x)


@dataclass
class Report:
    command: str
    version: str
    seed: int
    config: dict
    results: list
    hyperparams: dict | None = None
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        d = {
            "command": self.command,
            "version": self.version,
            "seed": self.seed,
            "config": self.config,
            "results": [r.to_dict() for r in self.results],
        }
        if self.hyperparams is not None:
            d["hyperparams"] = self.hyperparams
        if self.warnings:
            d["warnings"] = list(self.warnings)
        return _clean(d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Report":
        d = json.loads(text)
        if d["command"] == "test":
            results = [TestResult.from_dict(r) for r in d["results"]]
        else:
            results = [
                PowerPoint(
                    TestKind(r["kind"]),
                    _nan(r["mu"]),
                    _nan(r["avg_power"]),
                    _nan(r["avg_type1"]),
                    int(r["reps"]),
                    _nan(r.get("power_se")),
                    _nan(r.get("type1_se")),
                )
                for r in d["results"]
            ]
        return cls(
            d["command"], d["version"], d["seed"], d["config"], results,
            d.get("hyperparams"), d.get("warnings", []),
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if self.command == "test":
            w.writerow(RESULT_COLUMNS)
            for r in self.results:
                w.writerow([r.series_id, r.kind.value, repr(r.statistic), repr(r.critical_value), str(r.reject).lower()])
        else:
            w.writerow(POWER_COLUMNS)
            for p in self.results:
                w.writerow([p.kind.value, repr(p.mu), repr(p.avg_power), repr(p.avg_type1), p.reps])
        return buf.getvalue()


def write_atomic(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
