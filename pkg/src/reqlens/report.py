"""Diagnostic reports in text and JSON form."""

from __future__ import annotations

import json
import os
from typing import Optional, TextIO

from reqlens.diagnostics import Diagnostic, Severity, count

SCHEMA_VERSION = 1
TOOL_NAME = "reqlens"

_COLORS = {Severity.ERROR: "\033[31m", Severity.WARNING: "\033[33m",
           Severity.INFO: "\033[36m"}
_RESET = "\033[0m"


def ordered(diagnostics) -> list[Diagnostic]:
    """Sorted by file, line, column and code, with exact repeats removed."""
    unique = {}
    for d in diagnostics:
        key = (d.severity, d.code, d.location, d.message)
        unique.setdefault(key, d)
    return sorted(unique.values(), key=Diagnostic.sort_key)


def diagnostic_dict(d: Diagnostic) -> dict:
    return {"severity": d.severity.value, "code": d.code,
            "file": d.location.file, "line": d.location.line,
            "column": d.location.column, "message": d.message,
            "witness": d.witness_text()}


def build_report(inputs, diagnostics, version: str) -> dict:
    diagnostics = ordered(diagnostics)
    files = list(dict.fromkeys(list(inputs) + [d.location.file for d in diagnostics]))
    per_file = {f: [] for f in sorted(files)}
    for d in diagnostics:
        per_file[d.location.file].append(diagnostic_dict(d))
    return {
        "schema": SCHEMA_VERSION,
        "tool": {"name": TOOL_NAME, "version": version},
        "inputs": list(inputs),
        "files": [{"file": f, "diagnostics": ds} for f, ds in per_file.items()],
        "summary": count(diagnostics),
    }


def to_json(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def use_color(stream: TextIO, setting: Optional[str] = None) -> bool:
    setting = (setting or os.environ.get("REQLENS_COLOR", "auto")).lower()
    if setting == "always":
        return True
    if setting == "never":
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def format_text(diagnostics, color: bool = False) -> str:
    diagnostics = ordered(diagnostics)
    lines = []
    for d in diagnostics:
        severity = d.severity.value
        if color:
            severity = f"{_COLORS[d.severity]}{severity}{_RESET}"
        lines.append(f"{d.location}: {severity}: [{d.code}] {d.message}")
        witness = d.witness_text()
        if witness:
            shown = ", ".join(f"{atom}={'T' if v else 'F'}" for atom, v in witness.items())
            lines.append(f"    witness: {shown}")
    totals = count(diagnostics)
    lines.append(f"{totals['errors']} error(s), {totals['warnings']} warning(s), "
                 f"{totals['infos']} info(s)")
    return "\n".join(lines) + "\n"
