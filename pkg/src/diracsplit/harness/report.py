"""CSV and JSON output of study reports.

CSV follows RFC 4180 (CRLF line ends, minimal quoting).  Each float appears
twice: rounded to 6 significant digits and at full ``repr`` precision.  Wall
times are omitted from CSV unless requested so that reruns diff cleanly.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import fields
from pathlib import Path

from .config import RunConfig
from .studies import StudyReport, StudyRow

__all__ = ["emit_report", "report_to_csv", "report_to_json", "load_report_json", "CSV_COLUMNS"]

_FULL = ("e_phi", "e_rho", "e_J", "rate")
CSV_COLUMNS = ("scheme", "param_name", "param", "h", "tau", "t", "e_phi", "e_rho", "e_J", "rate", "onset")


def _fmt(v, full: bool = False) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v) if full else f"{v:.6g}"
    return str(v)


def report_to_csv(report: StudyReport, timings: bool = False) -> str:
    cols = list(CSV_COLUMNS) + (["wall_s"] if timings else []) + [f"{c}_full" for c in _FULL] + ["config_hash"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(cols)
    chash = report.metadata.get("config_hash", "")
    for r in report.rows:
        row = [_fmt(getattr(r, c)) for c in CSV_COLUMNS]
        if timings:
            row.append(_fmt(r.wall_s))
        row += [_fmt(getattr(r, c), full=True) for c in _FULL]
        row.append(chash)
        w.writerow(row)
    return buf.getvalue()


def report_to_json(report: StudyReport) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=True, allow_nan=True)


def load_report_json(text: str) -> StudyReport:
    d = json.loads(text)
    names = {f.name for f in fields(StudyRow)}
    rows = [StudyRow(**{k: v for k, v in r.items() if k in names}) for r in d.get("rows", [])]
    cfg = RunConfig.from_dict(d["config"]) if d.get("config") else None
    return StudyReport(rows, d.get("metadata", {}), cfg)


def emit_report(report: StudyReport, format: str, path, timings: bool = False) -> Path:
    if format == "csv":
        text = report_to_csv(report, timings)
    elif format == "json":
        text = report_to_json(report)
    else:
        raise ValueError(f"format must be 'csv' or 'json', got {format!r}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        f.write(text)
    return path
