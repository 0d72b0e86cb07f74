"""JSON codecs for the wire formats shared by the CLI and the service.

Integers outside the signed 64-bit range are serialized as decimal
strings so downstream consumers never silently lose precision.
"""

from __future__ import annotations

import json
from typing import Any

from .ehrhart import IVPoly
from .fan import Fan, build_fan
from .matroid import BergmanFan, Matroid
from .pering import PEElement
from .plfun import PLFunction
from .polytope import HPolytope

_I64_MAX = 2**63 - 1
_I64_MIN = -(2**63)


def big_safe(value: Any) -> Any:
    """Recursively convert out-of-range integers to decimal strings."""
    if isinstance(value, bool):
        return value
    if isinstance(value, int):
        return value if _I64_MIN <= value <= _I64_MAX else str(value)
    if isinstance(value, dict):
        return {k: big_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [big_safe(v) for v in value]
    return value


def canonical_dumps(payload: Any) -> str:
    """Deterministic byte-for-byte JSON: sorted keys, compact separators."""
    return json.dumps(big_safe(payload), sort_keys=True, separators=(",", ":"))


def _as_int(x) -> int:
    """Accept plain ints and decimal strings (the big-integer convention)."""
    if isinstance(x, bool):
        raise ValueError("boolean is not an integer")
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        return int(x, 10)
    raise ValueError(f"expected integer, got {type(x).__name__}")


def fan_to_dict(fan: Fan) -> dict:
    return {
        "ambient_dim": fan.ambient_dim,
        "rays": [list(r) for r in fan.rays],
        "maximal_cones": [list(c) for c in fan.maximal_cones],
    }


def fan_from_dict(doc: dict, require_unimodular: bool = True) -> Fan:
    return build_fan(
        int(doc["ambient_dim"]),
        [[_as_int(x) for x in ray] for ray in doc["rays"]],
        [[int(i) for i in cone] for cone in doc["maximal_cones"]],
        require_unimodular=require_unimodular,
    )


def pl_to_dict(f: PLFunction) -> dict:
    return {"values": list(f.values)}


def pl_from_dict(doc: dict, fan: Fan) -> PLFunction:
    return PLFunction(fan, tuple(_as_int(v) for v in doc["values"]))


def poly_to_dict(poly: IVPoly) -> dict:
    return {
        "vars": list(poly.variables),
        "terms": [{"alpha": {str(k): v for k, v in alpha.items()}, "c": c}
                  for alpha, c in poly.terms()],
    }


def poly_from_dict(doc: dict) -> IVPoly:
    variables = tuple(int(v) for v in doc["vars"])
    pos = {v: i for i, v in enumerate(variables)}
    coeffs: dict[tuple[int, ...], int] = {}
    for term in doc["terms"]:
        alpha = [0] * len(variables)
        for k, e in term["alpha"].items():
            alpha[pos[int(k)]] = int(e)
        coeffs[tuple(alpha)] = _as_int(term["c"])
    return IVPoly(variables, coeffs)


def polytope_to_dict(poly: HPolytope) -> dict:
    return {"inequalities": [{"normal": list(n), "bound": b} for n, b in poly.inequalities]}


def polytope_from_dict(doc: dict) -> HPolytope:
    return HPolytope(tuple(
        (tuple(_as_int(x) for x in item["normal"]), _as_int(item["bound"]))
        for item in doc["inequalities"]
    ))


def matroid_from_dict(doc: dict) -> Matroid:
    kind = doc.get("type")
    if kind == "uniform":
        return Matroid.uniform(int(doc["rank"]), int(doc["n"]))
    if kind == "bases":
        return Matroid.from_bases(int(doc["ground_size"]),
                                  [[int(e) for e in b] for b in doc["bases"]])
    if kind == "graphic":
        return Matroid.from_graph(int(doc["vertices"]),
                                  [[int(v) for v in e] for e in doc["edges"]])
    raise ValueError(f"unknown matroid type {kind!r}")


def bergman_to_dict(bergman: BergmanFan) -> dict:
    return {
        "fan": fan_to_dict(bergman.fan),
        "ray_flats": [sorted(f) for f in bergman.ray_flats],
    }


def pe_to_dict(element: PEElement) -> dict:
    return {"terms": [{"c": c, "values": list(v)} for c, v in element.terms]}


def pe_from_dict(doc: dict, fan: Fan) -> PEElement:
    return PEElement(fan, tuple(
        (_as_int(t["c"]), tuple(_as_int(v) for v in t["values"])) for t in doc["terms"]
    ))
