"""
Report Service Module

Reports are plain JSON documents. The JSON view is canonical: keys are sorted,
degree-indexed maps use string integer keys in ascending numeric order,
rationals are ``"p/q"`` strings, and every report carries ``"schema":
"rephom/1"`` and the conventions fingerprint. The CSV and text views are
derived from the same payload.
"""

import csv
import hashlib
import io
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

from pydantic import BaseModel
from sympy.polys.domains import QQ

from rephom.core.errors import InputError
from rephom.core.linalg import format_rational
from rephom.core.series import PoincareSeries

logger = logging.getLogger(__name__)

SCHEMA = "rephom/1"
FORMATS = ("json", "csv", "text")


def _key_order(key: str) -> Tuple[int, Any]:
    # Integer keys first, in numeric order; then names alphabetically.
    try:
        return (0, int(key))
    except ValueError:
        return (1, key)


def canonical(value: Any) -> Any:
    """Convert a payload to JSON-ready values in canonical key order."""
    if isinstance(value, BaseModel):
        return canonical(value.dict())
    if isinstance(value, PoincareSeries):
        return str(value)
    if isinstance(value, Mapping):
        items = {str(k) if not isinstance(k, tuple) else ",".join(map(str, k)): canonical(v) for k, v in value.items()}
        return {k: items[k] for k in sorted(items, key=_key_order)}
    if isinstance(value, (list, tuple)):
        return [canonical(v) for v in value]
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, Path):
        return str(value)
    try:
        rational = QQ.convert(value)
    except Exception:
        return str(value)
    return int(rational.numerator) if rational.denominator == 1 else format_rational(rational)


def fingerprint(conventions: Mapping[str, Any]) -> Dict[str, Any]:
    """The conventions block with a sha256 digest of its canonical JSON."""
    body = canonical(dict(conventions))
    digest = hashlib.sha256(json.dumps(body, separators=(",", ":")).encode()).hexdigest()
    return {**body, "sha256": digest}


def build_report(command: str, body: Mapping[str, Any], conventions: Mapping[str, Any]) -> Dict[str, Any]:
    """
    Assemble a versioned report.

    Args:
        command (str): the command that produced the report
        body (Mapping[str, Any]): command-specific payload
        conventions (Mapping[str, Any]): sign and normalization conventions

    Returns:
        Dict[str, Any]: canonical payload
    """
    payload = {"schema": SCHEMA, "command": command, "conventions": fingerprint(conventions)}
    payload.update(canonical(dict(body)))
    return canonical(payload)


def to_json(payload: Mapping[str, Any]) -> str:
    return json.dumps(canonical(payload), indent=2, ensure_ascii=False) + "\n"


def _flatten(value: Any, prefix: str = "") -> List[Tuple[str, str]]:
    if isinstance(value, Mapping):
        rows = []
        for k, v in value.items():
            rows += _flatten(v, f"{prefix}.{k}" if prefix else str(k))
        return rows
    if isinstance(value, list):
        if all(not isinstance(v, (Mapping, list)) for v in value):
            return [(prefix, " ".join(str(v) for v in value))]
        rows = []
        for i, v in enumerate(value):
            rows += _flatten(v, f"{prefix}[{i}]")
        return rows
    return [(prefix, "" if value is None else str(value))]


def to_csv(payload: Mapping[str, Any]) -> str:
    """Two columns, ``key`` and ``value``, one row per leaf of the payload."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["key", "value"])
    for key, value in _flatten(canonical(payload)):
        if not key.startswith("conventions."):
            writer.writerow([key, value])
    return buffer.getvalue()


def to_text(payload: Mapping[str, Any]) -> str:
    lines = [f"{key}: {value}" for key, value in _flatten(canonical(payload)) if not key.startswith("conventions.")]
    return "\n".join(lines) + "\n"


def render(payload: Mapping[str, Any], fmt: str = "json") -> str:
    """
    Render a payload in one of ``json``, ``csv`` or ``text``.

    Raises:
        InputError: for an unknown format
    """
    if fmt == "json":
        return to_json(payload)
    if fmt == "csv":
        return to_csv(payload)
    if fmt == "text":
        return to_text(payload)
    raise InputError(f"unknown format {fmt!r} (known: {', '.join(FORMATS)})")


def write_report(payload: Mapping[str, Any], output: Optional[Union[str, Path]] = None, fmt: str = "json") -> str:
    """Render and write to ``output``, or return the text when no path is given."""
    text = render(payload, fmt)
    if output is not None:
        Path(output).write_text(text)
        logger.info("wrote %s report to %s", fmt, output)
    return text


def series_dims(series: PoincareSeries) -> Dict[int, int]:
    """Coefficients of z^n with weights forgotten."""
    return {n: int(c) for n, c in series.degree_coefficients().items()}
