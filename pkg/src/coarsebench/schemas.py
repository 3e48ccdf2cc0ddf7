"""JSON codecs for spaces, doubles, operators, and reports.

Field names are stable and round-trip; rational values travel as strings
("3/2") or plain integers.  Schema violations raise :class:`SchemaError`
carrying a JSON pointer to the offending field.  Canonical report encoding
(sorted keys, no timestamps) is byte-deterministic for golden-file testing.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Optional

from .compare import CoarseVerdict
from .doubles import (
    DoubleMetric,
    NestedFamily,
    constant_double,
    idempotent_from_family,
    matrix_double,
    portal_double,
    translation_double,
    unit_double,
    zero_double,
)
from .exact import as_q, q_str
from .operators import BandOperator
from .spaces import MetricTower, json_point, tower_from_generator, tower_from_matrix


class SchemaError(Exception):
    def __init__(self, pointer: str, message: str):
        self.pointer = pointer
        self.message = message
        super().__init__(f"{pointer}: {message}")


def _need(obj, key, pointer):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaError(f"{pointer}/{key}", "missing required field")
    return obj[key]


def _rational(value, pointer):
    try:
        return as_q(value)
    except (TypeError, ValueError) as exc:
        raise SchemaError(pointer, f"not a rational: {value!r} ({exc})")


# ---------------------------------------------------------------------------
# spaces

def space_from_json(obj, pointer: str = "") -> MetricTower:
    if not isinstance(obj, dict):
        raise SchemaError(pointer or "/", "space must be an object")
    if "generator" in obj:
        gen = obj["generator"]
        name = _need(gen, "name", f"{pointer}/generator")
        params = gen.get("params", {})
        try:
            return tower_from_generator(name, params)
        except Exception as exc:
            raise SchemaError(f"{pointer}/generator", str(exc))
    if "points" in obj or "matrix" in obj:
        points = _need(obj, "points", pointer)
        matrix = _need(obj, "matrix", pointer)
        rows = [
            [_rational(v, f"{pointer}/matrix/{i}/{j}") for j, v in enumerate(row)]
            for i, row in enumerate(matrix)
        ]
        try:
            return tower_from_matrix(points, rows, obj.get("levels"))
        except Exception as exc:
            raise SchemaError(f"{pointer}/matrix", str(exc))
    raise SchemaError(pointer or "/", "space needs 'generator' or 'points'+'matrix'")


def space_to_json(tower: MetricTower) -> dict:
    if tower.generator is not None:
        return {"generator": tower.generator}
    pts = tower.points(-1)
    D = tower.dense(-1)
    return {
        "points": [json_point(p) for p in pts],
        "matrix": [[q_str(v) for v in row] for row in D],
        "levels": [len(level) for level in tower.levels],
    }


# ---------------------------------------------------------------------------
# doubles

def double_from_json(obj, pointer: str = "", base: Optional[MetricTower] = None) -> DoubleMetric:
    if not isinstance(obj, dict):
        raise SchemaError(pointer or "/", "double must be an object")
    if base is None:
        base = space_from_json(_need(obj, "base", pointer), f"{pointer}/base")
    cross = _need(obj, "cross", pointer)
    kind = _need(cross, "type", f"{pointer}/cross")
    label = cross.get("label")
    try:
        if kind == "unit":
            return unit_double(base)
        if kind == "zero":
            return zero_double(base, cross.get("basepoint"))
        if kind == "family":
            sets = _need(cross, "sets", f"{pointer}/cross")
            fam = NestedFamily.of(sets)
            return idempotent_from_family(base, fam, cross.get("require_growth", True))
        if kind == "matrix":
            rows = [
                [_rational(v, f"{pointer}/cross/rows/{i}/{j}") for j, v in enumerate(row)]
                for i, row in enumerate(_need(cross, "rows", f"{pointer}/cross"))
            ]
            return matrix_double(base, rows, label or "matrix")
        if kind == "constant":
            return constant_double(base, _rational(cross.get("value", 1), f"{pointer}/cross/value"), label)
        if kind == "shift":
            return translation_double(
                base, _need(cross, "by", f"{pointer}/cross"),
                _rational(cross.get("weight", 1), f"{pointer}/cross/weight"), label
            )
        if kind == "portals":
            portals = [
                (a, b, _rational(t, f"{pointer}/cross/portals/{i}/2"))
                for i, (a, b, t) in enumerate(_need(cross, "portals", f"{pointer}/cross"))
            ]
            return portal_double(base, portals, label or "portals")
    except SchemaError:
        raise
    except Exception as exc:
        raise SchemaError(f"{pointer}/cross", str(exc))
    raise SchemaError(f"{pointer}/cross/type", f"unknown cross type {kind!r}")


def double_to_json(dm: DoubleMetric) -> dict:
    out = {"base": space_to_json(dm.base), "label": dm.label}
    if dm.portals is not None:
        out["cross"] = {
            "type": "portals",
            "label": dm.label,
            "portals": [[json_point(a), json_point(b), q_str(t)] for a, b, t in dm.portals],
        }
    else:
        out["cross"] = {
            "type": "tables",
            "label": dm.label,
            "levels": [
                [[q_str(v) for v in row] for row in dm.cross(lvl)]
                for lvl in range(dm.base.num_levels)
            ],
        }
    return out


# ---------------------------------------------------------------------------
# operators

def operator_from_json(obj, pointer: str = "") -> BandOperator:
    source = _need(obj, "source", pointer)
    target = _need(obj, "target", pointer)
    entries = {}
    for i, item in enumerate(_need(obj, "entries", pointer)):
        if not isinstance(item, (list, tuple)) or len(item) not in (3, 4):
            raise SchemaError(f"{pointer}/entries/{i}", "entry must be [x, y, re] or [x, y, re, im]")
        x, y = item[0], item[1]
        re = _rational(item[2], f"{pointer}/entries/{i}/2")
        im = _rational(item[3], f"{pointer}/entries/{i}/3") if len(item) == 4 else 0
        entries[(x, y)] = (re, im)
    try:
        return BandOperator.build(source, target, entries)
    except Exception as exc:
        raise SchemaError(f"{pointer}/entries", str(exc))


# ---------------------------------------------------------------------------
# reports

def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def verdict_csv(verdict: CoarseVerdict) -> str:
    """Distortion tables as CSV rows: level, direction, radius, value."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["level", "direction", "radius", "value"])
    for table in verdict.tables:
        for r, v in table.forward.samples:
            writer.writerow([table.level, "forward", q_str(r), q_str(v)])
        for r, v in table.reverse.samples:
            writer.writerow([table.level, "reverse", q_str(r), q_str(v)])
    return buf.getvalue()
