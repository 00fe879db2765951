"""Serialization of test reports and simulation tables.

A test report is written as a human-readable ``key: value`` document plus a
JSON sidecar holding the same fields. Both embed the package version, the
resolved configuration and the seed, so the run can be repeated exactly.

Text schema (one field per line, in this order)::

    adaptest_version, status, message, family, w2, p_value, q_hat,
    beta, theta, alpha_star, x0, psi_n_x0, variance_mode,
    dataset.<key>..., options.<key>..., diagnostics.<key>..., config.<key>...

Vectors are written as space-separated numbers in shortest round-trip form.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from . import __version__
from .transform import TestReport

__all__ = ["report_to_dict", "format_report", "write_report", "parse_report_text",
           "table_header", "write_table"]

_FIELDS = ("status", "message", "family", "w2", "p_value", "q_hat", "beta", "theta",
           "alpha_star", "x0", "psi_n_x0", "variance_mode")


def _plain(value):
    """Convert numpy containers and scalars to JSON-friendly Python values."""
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (np.floating, float)):
        v = float(value)
        return v if math.isfinite(v) else str(v)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def report_to_dict(report: TestReport, config: dict | None = None) -> dict:
    out = {"adaptest_version": __version__}
    for name in _FIELDS:
        out[name] = _plain(getattr(report, name))
    out["dataset"] = _plain(report.dataset)
    out["options"] = _plain(report.options)
    out["diagnostics"] = _plain(report.diagnostics)
    out["config"] = _plain(config or {})
    return out


def _text_value(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, list):
        if v and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
            return " ".join(repr(x) for x in v)
        return json.dumps(v)
    if isinstance(v, dict):
        return json.dumps(v, sort_keys=True)
    return str(v).replace("\n", " ")


def format_report(report: TestReport, config: dict | None = None) -> str:
    data = report_to_dict(report, config)
    lines = []
    for key, value in data.items():
        if isinstance(value, dict):
            for sub, v in value.items():
                lines.append(f"{key}.{sub}: {_text_value(v)}")
        else:
            lines.append(f"{key}: {_text_value(value)}")
    return "\n".join(lines) + "\n"


def parse_report_text(text: str) -> dict:
    """Read a text report back into a flat ``{key: raw string}`` mapping."""
    out = {}
    for line in text.splitlines():
        if ": " in line:
            k, v = line.split(": ", 1)
            out[k] = v
        elif line.endswith(":"):
            out[line[:-1]] = ""
    return out


def write_report(report: TestReport, path, config: dict | None = None) -> tuple[Path, Path]:
    """Write ``path`` (text) and ``path`` + ``.json`` (sidecar)."""
    path = Path(path)
    sidecar = path.with_name(path.name + ".json")
    path.write_text(format_report(report, config))
    sidecar.write_text(json.dumps(report_to_dict(report, config), indent=2, sort_keys=False) + "\n")
    return path, sidecar


def table_header(config: dict) -> str:
    """Comment lines (``# key: value``) placed above a delimited table."""
    lines = [f"# adaptest_version: {__version__}"]
    for k, v in config.items():
        lines.append(f"# {k}: {_text_value(_plain(v))}")
    return "\n".join(lines) + "\n"


def write_table(body: str, path, config: dict) -> Path:
    path = Path(path)
    path.write_text(table_header(config) + body)
    return path
