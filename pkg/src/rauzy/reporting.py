"""JSON and CSV encodings of reports.

Exact fractions are written as ``"num/den"`` strings with a ``<name>_float``
mirror next to them. Every top-level JSON object carries ``"schema": 1``.
Encoding never includes timings or host details, so identical inputs give
byte-identical files.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
from fractions import Fraction
from typing import Any, Iterable

import numpy as np

from .enumeration import VOLUME_UNITS, DeltaMode, XRecord

SCHEMA_VERSION = 1
CSV_HEADER = ["n", "k", "value_num", "value_den", "value_float", "word_count"]


def frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(text: str) -> Fraction:
    return Fraction(text)


def encode(obj: Any) -> Any:
    """Recursively convert reports into JSON-ready values."""
    if isinstance(obj, DeltaMode):
        return "exact" if obj.exact else obj.delta
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return encode_fields({f.name: getattr(obj, f.name) for f in dataclasses.fields(obj)})
    if isinstance(obj, dict):
        return encode_fields(obj)
    if isinstance(obj, Fraction):
        return frac_str(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (list, tuple)):
        return [encode(x) for x in obj]
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def encode_fields(fields: dict) -> dict:
    out: dict[str, Any] = {}
    for key, val in fields.items():
        key = str(key)
        if key == "passed":
            key = "pass"
        if key == "hist":
            continue
        out[key] = encode(val)
        if isinstance(val, Fraction):
            out[f"{key}_float"] = float(val)
    return out


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def bound_document(result, certificate, params: dict) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "kind": "bound",
        "parameters": params,
        "bisection": encode(result),
        "exact_certificate": encode(certificate),
        "dim_upper_bound": result.dim_upper_bound,
        "verdict": bool(result.final_report.verdict),
    }


def check_documents(reports: Iterable, params: dict) -> list[dict]:
    docs = []
    for r in reports:
        doc = encode(r)
        doc["schema"] = SCHEMA_VERSION
        doc["invocation"] = params
        docs.append(doc)
    return docs


def xsum_csv(records: Iterable[XRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        if isinstance(r.value, Fraction):
            num, den, flt = r.value.numerator, r.value.denominator, float(r.value)
        else:
            num, den, flt = "", "", r.value
        writer.writerow([r.n, "" if r.k is None else r.k, num, den, repr(float(flt)), r.word_count])
    return buf.getvalue()


def xsum_document(records: list[XRecord], params: dict) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "kind": "xsum",
        "parameters": params,
        "units": VOLUME_UNITS,
        "records": [encode(r) for r in records],
    }


_FRACTION = {"type": "string", "pattern": r"^-?[0-9]+/[0-9]+$"}
_NUMBER_OR_FRACTION = {"anyOf": [{"type": "number"}, _FRACTION]}

CRITERION_SCHEMA = {
    "type": "object",
    "required": ["d", "delta", "K", "partial_sum", "tail_bound", "upper_bound", "verdict", "tail_lower_limit"],
    "properties": {
        "d": {"type": "integer", "minimum": 3},
        "delta": {"anyOf": [{"const": "exact"}, {"type": "number"}]},
        "K": {"type": "integer", "minimum": 1},
        "partial_sum": _NUMBER_OR_FRACTION,
        "tail_bound": _NUMBER_OR_FRACTION,
        "upper_bound": _NUMBER_OR_FRACTION,
        "verdict": {"type": "boolean"},
        "tail_lower_limit": {"type": "integer", "minimum": 1},
    },
}

BOUND_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "kind", "parameters", "bisection", "exact_certificate", "dim_upper_bound", "verdict"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "kind": {"const": "bound"},
        "parameters": {"type": "object"},
        "bisection": {
            "type": "object",
            "required": ["d", "delta_star", "dim_upper_bound", "iterations", "final_report"],
            "properties": {
                "delta_star": {"type": "number", "exclusiveMaximum": 1.0000001},
                "dim_upper_bound": {"type": "number"},
                "iterations": {"type": "integer"},
                "final_report": CRITERION_SCHEMA,
            },
        },
        "exact_certificate": CRITERION_SCHEMA,
        "dim_upper_bound": {"type": "number"},
        "verdict": {"type": "boolean"},
    },
}

CHECK_SCHEMA = {
    "type": "object",
    "required": ["schema", "name", "parameters", "pass", "witness", "max_discrepancy", "invocation"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "name": {"type": "string"},
        "parameters": {"type": "object"},
        "pass": {"type": "boolean"},
        "max_discrepancy": _NUMBER_OR_FRACTION,
        "notes": {"type": "array", "items": {"type": "string"}},
        "values": {"type": "object"},
    },
    "if": {"properties": {"pass": {"const": False}}},
    "then": {"properties": {"witness": {"not": {"type": "null"}}}},
}

VERIFY_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "array",
    "items": CHECK_SCHEMA,
}

XSUM_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "kind", "parameters", "units", "records"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "records": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["n", "k", "value", "word_count"],
                "properties": {"value": _NUMBER_OR_FRACTION, "word_count": {"type": "integer"}},
            },
        },
    },
}

BOXDIM_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "kind", "parameters", "slope", "counts"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "slope": {"type": "number"},
        "counts": {"type": "array", "items": {"type": "integer"}},
    },
}
