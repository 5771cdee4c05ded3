"""Parsing of distributions, channels and payoffs; CSV/JSON writers with a provenance header."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from . import __version__
from .prob import Channel, PayoffTable, Pmf

CSV_COMMENT = "#"


def parse_grid(text: str) -> np.ndarray:
    """``start:stop:step`` (inclusive of stop up to rounding) or a comma list."""
    text = str(text).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid {text!r} must look like start:stop:step")
        a, b, s = (float(p) for p in parts)
        if s <= 0 or b < a:
            raise ValueError(f"grid {text!r} needs a positive step and stop >= start")
        count = int(math.floor((b - a) / s + 1e-9)) + 1
        return np.round(a + s * np.arange(count), 12)
    return np.array([float(v) for v in text.split(",") if v.strip()])


def _load(text_or_path):
    """JSON from a file path, or the literal text itself."""
    p = Path(str(text_or_path))
    if p.suffix in (".json", ".txt") or p.exists():
        if not p.exists():
            raise FileNotFoundError(f"no such file: {p}")
        return json.loads(p.read_text())
    return json.loads(text_or_path)


def parse_pmf(text) -> Pmf:
    """Comma list (``0.25,0.25,0.5``), JSON list, or a JSON file with a list or ``{"probs": [...]}``."""
    s = str(text).strip()
    literal = not s.startswith(("[", "{")) and not Path(s).exists()
    if literal and ("," in s or _is_number(s)):
        vals = [float(v) for v in s.split(",")]
    else:
        doc = _load(s)
        vals = doc["probs"] if isinstance(doc, dict) else doc
    return Pmf(np.asarray(vals, float))


def _is_number(s):
    try:
        float(s)
        return True
    except ValueError:
        return False


def parse_channel(text) -> Channel:
    """JSON matrix or ``{"rows": [[...], ...]}``; also ``identity:k``, ``constant:k`` and ``bsc:alpha``."""
    s = str(text).strip()
    if ":" in s and s.split(":")[0] in ("identity", "constant", "bsc"):
        kind, arg = s.split(":", 1)
        if kind == "identity":
            return Channel.identity(int(arg))
        if kind == "constant":
            return Channel.constant(int(arg))
        a = float(arg)
        return Channel(np.array([[1 - a, a], [a, 1 - a]]))
    doc = _load(s)
    rows = doc["rows"] if isinstance(doc, dict) else doc
    return Channel(np.asarray(rows, float))


def parse_payoff(text, ny: int | None = None) -> PayoffTable:
    """
    ``hamming:k``, ``agree_and_hide:k``, or JSON with ``values`` (x, y, z) or ``xz`` (x, z).

    An ``xz`` payoff is broadcast over ``ny`` reconstruction symbols (default 1).
    """
    s = str(text).strip()
    if ":" in s and s.split(":")[0] in ("hamming", "agree_and_hide"):
        kind, arg = s.split(":", 1)
        k = int(arg)
        return PayoffTable.hamming(k, ny or 1) if kind == "hamming" else PayoffTable.agree_and_hide(k)
    doc = _load(s)
    if isinstance(doc, dict) and "values" in doc:
        vals = np.array([[[float(v) for v in row] for row in plane] for plane in doc["values"]])
        return PayoffTable(vals, allow_neg_inf=bool(doc.get("allow_neg_inf", False)))
    xz = doc["xz"] if isinstance(doc, dict) else doc
    return PayoffTable.from_xz(np.asarray(xz, float), ny or 1)


def parse_aux(text):
    """
    Auxiliary system from JSON: ``px``, ``p_uv_given_x`` (|X|,|U|,|V|), ``p_y_given_uv`` (|U|,|V|,|Y|),
    ``payoff`` (name or object) and optional ``wx`` / ``wy`` channels.
    """
    from .region.aux import AuxSystem

    doc = _load(text)
    try:
        py = np.asarray(doc["p_y_given_uv"], float)
        payoff = doc["payoff"]
        payoff = parse_payoff(payoff if isinstance(payoff, str) else json.dumps(payoff), ny=py.shape[2])
        wx = parse_channel(_jsonish(doc["wx"])) if doc.get("wx") is not None else None
        wy = parse_channel(_jsonish(doc["wy"])) if doc.get("wy") is not None else None
        return AuxSystem.build(Pmf(np.asarray(doc["px"], float)), np.asarray(doc["p_uv_given_x"], float), py,
                               payoff, wx, wy)
    except KeyError as exc:
        raise ValueError(f"auxiliary system file is missing {exc}") from exc


def _jsonish(v):
    return v if isinstance(v, str) else json.dumps(v)


def provenance(command: str, seed=None) -> list[str]:
    return [f"command: {command}", f"seed: {seed if seed is not None else 'none'}",
            f"version: causal_secrecy {__version__}"]


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def csv_text(columns, rows, header_lines=()) -> str:
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"{CSV_COMMENT} {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def json_text(obj, header_lines=()) -> str:
    doc = {"provenance": list(header_lines), "data": obj}
    return json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(f"cannot serialise {type(o).__name__}")


def read_csv(text: str):
    """Inverse of :func:`csv_text`: (provenance lines, column names, rows with numbers parsed)."""
    header, body = [], []
    for line in text.splitlines():
        if line.startswith(CSV_COMMENT):
            header.append(line[len(CSV_COMMENT):].strip())
        elif line.strip():
            body.append(line)
    reader = csv.reader(body)
    columns = next(reader)
    rows = []
    for r in reader:
        if len(r) != len(columns):
            raise ValueError(f"row {r} has {len(r)} fields, expected {len(columns)}")
        rows.append([float(v) if _is_number(v) else v for v in r])
    return header, columns, rows
