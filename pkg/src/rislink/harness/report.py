"""Deterministic CSV/JSON emission for experiment reports."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from rislink.numerics import ParameterError


@dataclass
class Table:
    columns: tuple
    rows: list


@dataclass
class ExperimentReport:
    kind: str
    fingerprint: str
    seed: int
    summary: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    annotations: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def header(self) -> str:
        return f"# fingerprint={self.fingerprint} seed={self.seed} kind={self.kind}"


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".10g")
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def table_to_csv(report: ExperimentReport, name: str) -> str:
    table = report.tables[name]
    buf = io.StringIO()
    buf.write(report.header() + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        return float(format(float(x), ".10g"))
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def report_to_json(report: ExperimentReport) -> str:
    body = {
        "kind": report.kind,
        "fingerprint": report.fingerprint,
        "seed": report.seed,
        "summary": _jsonable(report.summary),
        "annotations": _jsonable(report.annotations),
        "warnings": list(report.warnings),
        "tables": sorted(report.tables),
    }
    return json.dumps(body, indent=2, sort_keys=True) + "\n"


def write_report(report: ExperimentReport, out_dir) -> list:
    """Write ``report.json`` plus one CSV per table; returns the paths written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for name in sorted(report.tables):
        p = out / f"{name}.csv"
        p.write_text(table_to_csv(report, name), encoding="utf-8")
        paths.append(p)
    p = out / "report.json"
    p.write_text(report_to_json(report), encoding="utf-8")
    paths.append(p)
    return paths


def read_fingerprint(path) -> str:
    """Fingerprint from a report.json or the comment line of a CSV."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        return json.loads(text)["fingerprint"]
    first = text.splitlines()[0]
    for part in first.lstrip("# ").split():
        if part.startswith("fingerprint="):
            return part.split("=", 1)[1]
    raise ParameterError(f"{path} carries no fingerprint")


def check_fingerprint(path, fingerprint: str):
    """Raise if an existing output was produced by a different configuration."""
    found = read_fingerprint(path)
    if found != fingerprint:
        raise ParameterError(f"{path} was produced by config {found}, not {fingerprint}")
