"""Structured run reports: JSON (full), CSV (rows only), round-trip safe.

Divergent values are serialized as ``null`` plus a ``divergent`` flag in
JSON and as the literal string ``inf`` in CSV.  CSV bytes depend only on
the rows (floats via ``repr``, stable column order), so identical config
and seed give identical files; wall-clock time lives only in the JSON
report, outside the summary.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field

__all__ = ["Report", "rows_to_csv", "report_to_json", "report_from_json",
           "encode_value", "decode_value"]


def encode_value(v):
    """JSON-safe scalar: infinities become null (callers set flags)."""
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def decode_value(v, divergent: bool = False):
    if v is None and divergent:
        return math.inf
    return v


@dataclass
class Report:
    """Everything one command run produced.

    ``rows`` are flat dicts with shared keys; every number in ``summary``
    is derivable from ``rows`` (or echoes the config); ``verdicts`` maps
    named assertions to booleans.
    """

    command: str
    config: dict
    columns: list
    rows: list
    summary: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    wall_clock: float = 0.0

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())


def _csv_cell(value) -> str:
    if value is None:
        return "inf"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        if math.isnan(value):
            return "nan"
        return repr(value)
    if isinstance(value, (list, tuple)):
        return "(" + " ".join(_csv_cell(v) for v in value) + ")"
    text = str(value)
    if any(ch in text for ch in ",\"\n"):
        text = '"' + text.replace('"', '""') + '"'
    return text


def rows_to_csv(columns, rows) -> str:
    """Deterministic CSV: header plus one line per row, '\\n' endings."""
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_csv_cell(row.get(col)) for col in columns) + "\n")
    return buf.getvalue()


def _jsonify(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, float):
        return encode_value(obj)
    if hasattr(obj, "item") and callable(obj.item):  # numpy scalar
        return _jsonify(obj.item())
    return obj


def report_to_json(report: Report) -> str:
    doc = {
        "command": report.command,
        "config": _jsonify(report.config),
        "columns": list(report.columns),
        "rows": _jsonify(report.rows),
        "summary": _jsonify(report.summary),
        "verdicts": _jsonify(report.verdicts),
        "wall_clock_seconds": report.wall_clock,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def report_from_json(text: str) -> Report:
    doc = json.loads(text)
    return Report(command=doc["command"], config=doc["config"],
                  columns=doc["columns"], rows=doc["rows"],
                  summary=doc["summary"], verdicts=doc["verdicts"],
                  wall_clock=doc.get("wall_clock_seconds", 0.0))
