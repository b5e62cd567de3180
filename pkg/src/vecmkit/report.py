"""
Report bundles: one CSV per table (4 decimals) or a single JSON file
(full precision). Output depends only on the report contents, so the
same report always produces the same bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from importlib import resources
from pathlib import Path

import numpy as np

from .pipeline import STAGE_TABLES, StudyReport, Table

BUNDLE_TABLES = (
    "table01_descriptives",
    "table02_unitroot",
    "table03_lagselect",
    "table04_johansen",
    "table05_vecm_unrestricted",
    "table06_vecm_restricted",
    "table07_longrun",
    "table08_granger",
    "table09_diagnostics",
    "table10_fevd",
    "appendix_a1_vecm_unrestricted_full",
    "appendix_a2_weak_exogeneity",
    "appendix_a3_vecm_restricted_full",
    "appendix_a4_lagselect_restricted",
    "appendix_a5_johansen_restricted",
)
JSON_NAME = "report.json"
SCHEMA_VERSION = 1


def _stage_of(table: str) -> str:
    for stage, names in STAGE_TABLES.items():
        if table in names:
            return stage
    raise KeyError(table)


def _placeholder(report: StudyReport, table: str) -> Table:
    stage = _stage_of(table)
    reason = report.skipped.get(stage, f"stage {stage!r} produced no table")
    return Table(["status", "reason"], [["skipped", reason]])


def format_cell(value) -> str:
    """CSV rendering: 4-decimal floats, NA for missing, lowercase booleans."""
    if value is None:
        return "NA"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if not math.isfinite(x):
            return "NA"
        text = f"{x:.4f}"
        return "0.0000" if text == "-0.0000" else text
    return str(value)


def table_to_csv(table: Table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_cell(v) for v in row])
    return buf.getvalue()


def _jsonable(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        x = float(value)
        return x if math.isfinite(x) else None
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def report_to_dict(report: StudyReport) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "config": _jsonable(report.config),
        "completed_stages": list(report.completed),
        "skipped": dict(report.skipped),
        "failure": report.failure,
        "decisions": list(report.decisions),
        "tables": {
            name: {"columns": list(t.columns), "rows": _jsonable(t.rows)}
            for name, t in report.tables.items()
        },
    }


def report_to_json(report: StudyReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, allow_nan=False) + "\n"


def load_schema() -> dict:
    text = resources.files("vecmkit").joinpath("report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def emit_report(report: StudyReport, format: str, out_dir) -> list:
    """
    Write ``report`` under ``out_dir`` and return the written paths.

    ``format`` is ``"csv"`` (the 15-file bundle), ``"json"`` or ``"both"``.
    Tables from skipped stages appear in the CSV bundle as a single
    ``status,reason`` row.
    """
    if format not in ("csv", "json", "both"):
        raise ValueError(f"unknown report format {format!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if format in ("csv", "both"):
        for name in BUNDLE_TABLES:
            table = report.tables.get(name) or _placeholder(report, name)
            path = out / f"{name}.csv"
            path.write_text(table_to_csv(table), encoding="utf-8", newline="")
            written.append(path)
    if format in ("json", "both"):
        path = out / JSON_NAME
        path.write_text(report_to_json(report), encoding="utf-8", newline="")
        written.append(path)
    return written
