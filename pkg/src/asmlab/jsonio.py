"""JSON codecs for matrices, measures, families, and sampled functions.

Complex scalars are two-element [re, im] arrays; matrices are row-major
arrays of rows. Decimal round trips are not bit-exact but re-parse within
1e-15 relative. Schema violations raise FormatError so callers can map them
to usage errors, distinct from domain failures.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from asmlab import spin
from asmlab.asm import AsmFamily
from asmlab.config import Tolerances, resolve
from asmlab.measures import Povm, Pvm, SampleSpace

__all__ = [
    "FormatError",
    "decode_matrix",
    "encode_matrix",
    "family_from_json",
    "function_values_from_json",
    "load_family",
    "load_povm",
    "povm_from_json",
    "povm_to_json",
    "save_povm",
]


class FormatError(ValueError):
    """Malformed or schema-violating input document."""


def encode_matrix(m) -> list:
    a = np.asarray(m, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def decode_matrix(rows) -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        raise FormatError("matrix must be a nonempty array of rows")
    width = None
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, list):
            raise FormatError(f"row {i} is not an array")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise FormatError(f"row {i} has length {len(row)}, expected {width}")
        parsed = []
        for j, cell in enumerate(row):
            if (not isinstance(cell, list) or len(cell) != 2
                    or not all(isinstance(v, (int, float)) for v in cell)):
                raise FormatError(
                    f"entry ({i},{j}) must be a two-element [re, im] array"
                )
            parsed.append(complex(cell[0], cell[1]))
        out.append(parsed)
    return np.asarray(out, dtype=np.complex128)


def povm_to_json(p: Povm) -> dict:
    outcomes = []
    for i, label in enumerate(p.labels):
        entry = {"label": str(label), "operator": encode_matrix(p.effects[i])}
        if p.space.values is not None:
            entry["value"] = p.space.values[i]
        outcomes.append(entry)
    return {"dim": p.dim, "outcomes": outcomes}


def povm_from_json(obj, tol: Tolerances | None = None) -> Povm:
    t = resolve(tol)
    if not isinstance(obj, dict):
        raise FormatError("POVM document must be an object")
    outcomes = obj.get("outcomes")
    if not isinstance(outcomes, list) or not outcomes:
        raise FormatError("POVM document needs a nonempty 'outcomes' array")
    labels = []
    values = []
    effects = []
    for i, entry in enumerate(outcomes):
        if not isinstance(entry, dict):
            raise FormatError(f"outcome {i} is not an object")
        if "label" not in entry or "operator" not in entry:
            raise FormatError(f"outcome {i} needs 'label' and 'operator'")
        labels.append(str(entry["label"]))
        if "value" in entry:
            if not isinstance(entry["value"], (int, float)):
                raise FormatError(f"outcome {i} value must be a number")
            values.append(float(entry["value"]))
        effects.append(decode_matrix(entry["operator"]))
    if values and len(values) != len(labels):
        raise FormatError("either every outcome carries a value or none does")
    dim = obj.get("dim")
    if dim is not None and any(e.shape[0] != dim for e in effects):
        raise FormatError("declared dim does not match the operators")
    try:
        space = SampleSpace(points=tuple(labels),
                            values=tuple(values) if values else None)
    except ValueError as e:
        raise FormatError(str(e)) from None
    return Povm(space, effects, t)


def family_from_json(obj, tol: Tolerances | None = None) -> AsmFamily:
    t = resolve(tol)
    if not isinstance(obj, dict) or "type" not in obj:
        raise FormatError("family document must be an object with a 'type'")
    kind = obj["type"]
    if kind == "roy_kar":
        n = _vec3(obj, "n")
        return AsmFamily.roy_kar(n, t)
    if kind == "smeared":
        n = _vec3(obj, "n")
        return AsmFamily.smeared_spin(n, t)
    if kind == "bloch_path_table":
        hbars = obj.get("hbar")
        points = obj.get("points")
        if not isinstance(hbars, list) or not isinstance(points, list):
            raise FormatError("bloch_path_table needs 'hbar' and 'points' arrays")
        try:
            path = spin.BlochPath.from_table(hbars, points, t)
        except ValueError as e:
            raise FormatError(str(e)) from None
        return AsmFamily.from_path(path, kind="bloch_path_table", tol=t)
    if kind == "constant_pvm":
        if "povm" not in obj:
            raise FormatError("constant_pvm needs an embedded 'povm'")
        p = povm_from_json(obj["povm"], t)
        # Projectivity is a domain property of the data, not a format issue.
        pvm = Pvm(p.space, p.effects, t)
        return AsmFamily.constant(pvm, tol=t)
    raise FormatError(f"unknown family type {kind!r}")


def _vec3(obj: dict, key: str) -> list:
    v = obj.get(key)
    if (not isinstance(v, list) or len(v) != 3
            or not all(isinstance(x, (int, float)) for x in v)):
        raise FormatError(f"'{key}' must be a 3-vector of numbers")
    return [float(x) for x in v]


def function_values_from_json(obj, space: SampleSpace) -> np.ndarray:
    """Sample a function spec on a space.

    Specs: {"type":"indicator","set":[labels]} | {"type":"const","c":v} |
    {"type":"coordinate"} | {"type":"table","values":[...]}.
    """
    if not isinstance(obj, dict) or "type" not in obj:
        raise FormatError("function spec must be an object with a 'type'")
    kind = obj["type"]
    n = len(space)
    if kind == "indicator":
        subset = obj.get("set")
        if not isinstance(subset, list):
            raise FormatError("indicator needs a 'set' array of labels")
        wanted = {str(x) for x in subset}
        known = {str(p) for p in space.points}
        missing = wanted - known
        if missing:
            raise FormatError(f"indicator set has unknown labels {sorted(missing)}")
        return np.asarray(
            [1.0 if str(p) in wanted else 0.0 for p in space.points],
            dtype=np.complex128,
        )
    if kind == "const":
        if not isinstance(obj.get("c"), (int, float)):
            raise FormatError("const needs a numeric 'c'")
        return np.full(n, complex(obj["c"]), dtype=np.complex128)
    if kind == "coordinate":
        if space.values is None:
            raise FormatError("coordinate function needs a valued sample space")
        return np.asarray(space.values, dtype=np.complex128)
    if kind == "table":
        vals = obj.get("values")
        if not isinstance(vals, list) or len(vals) != n:
            raise FormatError(f"table needs a 'values' array of length {n}")
        if not all(isinstance(v, (int, float)) for v in vals):
            raise FormatError("table values must be numbers")
        return np.asarray(vals, dtype=np.complex128)
    raise FormatError(f"unknown function type {kind!r}")


def _load_json(path) -> object:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from None


def load_povm(path, tol: Tolerances | None = None) -> Povm:
    return povm_from_json(_load_json(path), tol)


def save_povm(path, p: Povm) -> None:
    Path(path).write_text(json.dumps(povm_to_json(p), indent=2) + "\n",
                          encoding="utf-8")


def load_family(path, tol: Tolerances | None = None) -> AsmFamily:
    return family_from_json(_load_json(path), tol)
