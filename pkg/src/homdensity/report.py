"""Deterministic rendering of result objects as JSON or CSV.

Rationals become ``{"exact": "a/b", "float": x}``; integers stay integers.
Dataclass fields declared with ``repr=False`` (bulky internals) are skipped.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from fractions import Fraction

import jsonschema

from .graph import Graph, PatternGraph
from .homcount import Density, Kernel


def rational(x: Fraction) -> dict:
    x = Fraction(x)
    try:
        f = float(x)
    except OverflowError:
        f = None
    if f is not None and not math.isfinite(f):
        f = None
    return {"exact": f"{x.numerator}/{x.denominator}", "float": f}


def to_jsonable(obj):
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, int):
        return int(obj)
    if isinstance(obj, Fraction):
        return rational(obj)
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, Density):
        return {"count": obj.count, "base": obj.base, "exponent": obj.exponent,
                "value": rational(obj.value)}
    if isinstance(obj, Kernel):
        return {"weights": [[rational(x) for x in row] for row in obj.weights],
                "measure": [rational(x) for x in obj.measure]}
    if isinstance(obj, Graph):
        out = {"n": obj.n, "edges": [list(e) for e in obj.edges]}
        if isinstance(obj, PatternGraph):
            out["parts"] = [list(obj.part1), list(obj.part2)]
        return out
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name))
                for f in dataclasses.fields(obj) if f.repr}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [to_jsonable(v) for v in items]
    if hasattr(obj, "item"):  # numpy scalars
        return to_jsonable(obj.item())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"


def flatten(value, prefix: str = "") -> list[tuple[str, object]]:
    """Dotted-path rows; list indices become path components."""
    if isinstance(value, dict):
        rows = []
        for k in sorted(value):
            rows += flatten(value[k], f"{prefix}.{k}" if prefix else k)
        return rows
    if isinstance(value, list):
        rows = []
        for i, v in enumerate(value):
            rows += flatten(v, f"{prefix}.{i}" if prefix else str(i))
        return rows or [(prefix, "[]")]
    return [(prefix, value)]


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def to_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["field", "value"])
    for key, v in flatten(report):
        w.writerow([key, _csv_cell(v)])
    return buf.getvalue()


def from_csv(text: str) -> dict[str, str]:
    rows = list(csv.reader(io.StringIO(text)))
    return {k: v for k, v in rows[1:]}


RATIONAL_PATTERN = r"^-?[0-9]+/[1-9][0-9]*$"

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$id": "homdensity-report",
    "type": "object",
    "required": ["subcommand", "config", "engine", "result", "status"],
    "additionalProperties": False,
    "properties": {
        "subcommand": {"type": "string"},
        "status": {"enum": ["computed", "verdict-failure"]},
        "failures": {"type": "array", "items": {"type": "string"}},
        "config": {
            "type": "object",
            "required": ["subcommand", "seed", "budget_vertices", "budget_enum",
                         "budget_search", "tol_edge", "tol_c4", "format", "inputs", "options"],
            "properties": {
                "seed": {"type": "integer"},
                "format": {"enum": ["text", "json", "csv"]},
                "inputs": {"type": "object"},
                "options": {"type": "object"},
            },
        },
        "engine": {
            "type": "object",
            "required": ["package", "rng", "numpy"],
            "properties": {"package": {"type": "string"}, "rng": {"type": "string"},
                           "numpy": {"type": "string"}},
        },
        "labels": {"type": "object"},
        "result": {"$ref": "#/$defs/value"},
    },
    "$defs": {
        "rational": {
            "type": "object",
            "required": ["exact", "float"],
            "additionalProperties": False,
            "properties": {
                "exact": {"type": "string", "pattern": RATIONAL_PATTERN},
                "float": {"type": ["number", "null"]},
            },
        },
        "value": {
            "anyOf": [
                {"type": ["null", "boolean", "integer", "number", "string"]},
                {"type": "array", "items": {"$ref": "#/$defs/value"}},
                {"$ref": "#/$defs/rational"},
                {"type": "object", "not": {"required": ["exact"]},
                 "additionalProperties": {"$ref": "#/$defs/value"}},
            ]
        },
    },
}


def validate(report: dict) -> None:
    jsonschema.validate(report, SCHEMA)
