"""JSON scenario/report schema: parsing and deterministic encoding.

Floats are written with 17 significant digits so that reports round-trip
exactly and two runs can be compared byte for byte.
"""
from __future__ import annotations

import json
import math

import numpy as np

from .errors import InputError
from .groups import (AffineIsometry, BlockDiagonal, SignedPermutation, UnitaryConjugation,
                     clock_and_shift, pauli_matrices, transposition)
from .spaces import Kind, SpaceSpec, matrix_to_point, point_to_matrix

# spaces ------------------------------------------------------------------------------


def parse_space(obj) -> SpaceSpec:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InputError("space: expected an object with a 'kind' field")
    kind = obj["kind"]
    try:
        if kind == "weighted_l1":
            if "weights" in obj:
                return SpaceSpec.weighted_l1(obj["weights"])
            return SpaceSpec.l1(int(obj["dim"]))
        if kind == "trace_class":
            return SpaceSpec.trace_class(int(obj["dim"]))
        if kind == "direct_sum":
            return SpaceSpec.direct_sum(*[parse_space(s) for s in obj["summands"]])
    except KeyError as exc:
        raise InputError(f"space: missing field {exc.args[0]!r} for kind {kind!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"space: {exc}") from None
    raise InputError(f"space: unknown kind {kind!r}")


def format_space(space: SpaceSpec) -> dict:
    if space.kind is Kind.WEIGHTED_L1:
        return {"kind": "weighted_l1", "weights": list(space.weights)}
    if space.kind is Kind.TRACE_CLASS:
        return {"kind": "trace_class", "dim": space.d}
    return {"kind": "direct_sum", "summands": [format_space(s) for s in space.summands]}


def parse_matrix(obj, d=None) -> np.ndarray:
    """Nested rows of ``[re, im]`` pairs (plain reals are accepted too)."""
    try:
        rows = [[complex(e[0], e[1]) if isinstance(e, (list, tuple)) else complex(e) for e in row]
                for row in obj]
    except (TypeError, IndexError, ValueError):
        raise InputError("matrix: expected rows of [re, im] pairs") from None
    m = np.array(rows, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or (d is not None and m.shape[0] != d):
        raise InputError(f"matrix: expected a square {d or ''}x{d or ''} matrix, got {m.shape}")
    return m


def format_matrix(m) -> list:
    m = np.asarray(m, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def parse_point(space: SpaceSpec, obj) -> np.ndarray:
    coords = obj["coords"] if isinstance(obj, dict) else obj
    if space.kind is Kind.TRACE_CLASS:
        if coords and isinstance(coords[0], list):
            return matrix_to_point(parse_matrix(coords, space.d))
        return space.point(coords)
    if space.kind is Kind.DIRECT_SUM and coords and isinstance(coords[0], list):
        if len(coords) != len(space.summands):
            raise InputError(f"point: expected {len(space.summands)} summand blocks")
        return np.concatenate([parse_point(s, c) for s, c in zip(space.summands, coords)])
    try:
        return space.point(coords)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"point: {exc}") from None


def format_point(space: SpaceSpec, p) -> list:
    p = np.asarray(p, dtype=float)
    if space.kind is Kind.WEIGHTED_L1:
        return [float(x) for x in p]
    if space.kind is Kind.TRACE_CLASS:
        return format_matrix(point_to_matrix(p, space.d))
    return [format_point(s, p[o:o + s.dim]) for s, o in zip(space.summands, space.offsets)]


# groups ------------------------------------------------------------------------------


def _parse_linear(space: SpaceSpec, obj):
    if space.kind is Kind.WEIGHTED_L1:
        if "perm" not in obj:
            raise InputError("generator: weighted_l1 generators need 'perm' (and optional 'signs')")
        return SignedPermutation(obj["perm"], obj.get("signs", ()))
    if space.kind is Kind.TRACE_CLASS:
        if "unitary" not in obj:
            raise InputError("generator: trace_class generators need 'unitary'")
        return UnitaryConjugation(parse_matrix(obj["unitary"], space.d))
    blocks = obj.get("blocks")
    if blocks is None or len(blocks) != len(space.summands):
        raise InputError(f"generator: direct_sum generators need {len(space.summands)} 'blocks'")
    return BlockDiagonal(tuple(_parse_linear(s, b) for s, b in zip(space.summands, blocks)))


def parse_generator(space: SpaceSpec, obj) -> AffineIsometry:
    lin = _parse_linear(space, obj)
    t = parse_point(space, obj["coords"]) if "coords" in obj else np.zeros(space.dim)
    return AffineIsometry(lin, t)


def preset_generators(space: SpaceSpec, name: str) -> list:
    if name == "pauli":
        if space.kind is not Kind.TRACE_CLASS or space.d != 2:
            raise InputError("preset 'pauli' needs trace_class with dim 2")
        return [AffineIsometry.from_linear(UnitaryConjugation(m)) for m in pauli_matrices()]
    if name == "clock_shift":
        if space.kind is not Kind.TRACE_CLASS:
            raise InputError("preset 'clock_shift' needs a trace_class space")
        return [AffineIsometry.from_linear(UnitaryConjugation(m)) for m in clock_and_shift(space.d)]
    if name == "symmetric":
        if space.kind is not Kind.WEIGHTED_L1:
            raise InputError("preset 'symmetric' needs a weighted_l1 space")
        return [AffineIsometry.from_linear(transposition(space.n, i, i + 1)) for i in range(space.n - 1)]
    raise InputError(f"unknown group preset {name!r}")


def parse_generators(space: SpaceSpec, obj) -> list:
    if not isinstance(obj, dict):
        raise InputError("group: expected an object with 'generators' or 'preset'")
    if "preset" in obj:
        return preset_generators(space, obj["preset"])
    gens = obj.get("generators")
    if not gens:
        raise InputError("group: 'generators' must be a non-empty list")
    return [parse_generator(space, g) for g in gens]


# deterministic JSON ------------------------------------------------------------------


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    s = format(x, ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    return _encode(obj, indent, 0) + "\n"
