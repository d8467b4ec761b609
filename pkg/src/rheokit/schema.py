"""JSON model documents: parsing with field-precise errors, and dumping.

Model document::

    {"node": "leaf", "potential": {"kind": "dashpot", "D": 1.0}}
    {"node": "serial"|"parallel", "children": [ ...model documents... ]}

Simulation document::

    {"E": 1.0,
     "elements": [ ...potential objects... ],
     "drive": [{"t_end": 1.0, "eps": 0.5}, ...],
     "e_el0": 0.0}            # optional initial elastic strain

Potential kinds: ``dashpot {D}``, ``plastic {sigma_a}``,
``powerlaw {D, n}``, ``huber {sigma_a, D}``.  All moduli must be
positive numbers.  Validation errors carry the JSON path of the
offending field.
"""

from __future__ import annotations

import math

from .errors import SchemaError
from .maxwell0d import DriveProgram, MaxwellModel
from .potentials import Dashpot, Huber, PerfectPlastic, Potential, PowerLaw
from .rheology import Leaf, Parallel, RheoExpr, Serial

__all__ = [
    "parse_model",
    "parse_potential",
    "parse_simulation",
    "dump_model",
    "dump_potential",
    "dump_simulation",
]

_POTENTIAL_FIELDS = {
    "dashpot": ("D",),
    "plastic": ("sigma_a",),
    "powerlaw": ("D", "n"),
    "huber": ("sigma_a", "D"),
}


def _expect_object(doc, path):
    if not isinstance(doc, dict):
        raise SchemaError(path or "<root>", f"expected an object, got {type(doc).__name__}")
    return doc


def _positive_number(doc, key, path):
    if key not in doc:
        raise SchemaError(f"{path}.{key}" if path else key, "missing required field")
    val = doc[key]
    where = f"{path}.{key}" if path else key
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise SchemaError(where, f"must be a number, got {val!r}")
    val = float(val)
    if not (math.isfinite(val) and val > 0):
        raise SchemaError(where, f"must be a positive finite number, got {val}")
    return val


def parse_potential(doc, path: str = "potential") -> Potential:
    doc = _expect_object(doc, path)
    kind = doc.get("kind")
    if kind not in _POTENTIAL_FIELDS:
        raise SchemaError(
            f"{path}.kind",
            f"must be one of {sorted(_POTENTIAL_FIELDS)}, got {kind!r}",
        )
    fields = _POTENTIAL_FIELDS[kind]
    extra = set(doc) - {"kind", *fields}
    if extra:
        raise SchemaError(f"{path}.{sorted(extra)[0]}", f"unknown field for kind {kind!r}")
    vals = {f: _positive_number(doc, f, path) for f in fields}
    if kind == "dashpot":
        return Dashpot(vals["D"])
    if kind == "plastic":
        return PerfectPlastic(vals["sigma_a"])
    if kind == "powerlaw":
        return PowerLaw(vals["D"], vals["n"])
    return Huber(vals["sigma_a"], vals["D"])


def parse_model(doc, path: str = "") -> RheoExpr:
    doc = _expect_object(doc, path)
    node = doc.get("node")
    here = f"{path}.node" if path else "node"
    if node not in ("leaf", "parallel", "serial"):
        raise SchemaError(here, f"must be 'leaf', 'parallel' or 'serial', got {node!r}")
    extra = set(doc) - {"node", "potential", "children"}
    if extra:
        raise SchemaError(
            f"{path}.{sorted(extra)[0]}" if path else sorted(extra)[0], "unknown field"
        )
    if node == "leaf":
        if "children" in doc:
            raise SchemaError(f"{path}.children" if path else "children", "leaf takes no children")
        if "potential" not in doc:
            raise SchemaError(f"{path}.potential" if path else "potential", "missing required field")
        pot_path = f"{path}.potential" if path else "potential"
        return Leaf(parse_potential(doc["potential"], pot_path))
    if "potential" in doc:
        raise SchemaError(
            f"{path}.potential" if path else "potential", f"{node} node takes no potential"
        )
    children = doc.get("children")
    kids_path = f"{path}.children" if path else "children"
    if not isinstance(children, list) or not children:
        raise SchemaError(kids_path, "must be a nonempty array")
    kids = [parse_model(c, f"{kids_path}[{i}]") for i, c in enumerate(children)]
    try:
        return Parallel(kids) if node == "parallel" else Serial(kids)
    except Exception as exc:
        raise SchemaError(path or "<root>", str(exc)) from exc


def dump_potential(p: Potential) -> dict:
    if isinstance(p, Dashpot):
        return {"kind": "dashpot", "D": p.D}
    if isinstance(p, PerfectPlastic):
        return {"kind": "plastic", "sigma_a": p.sigma_a}
    if isinstance(p, PowerLaw):
        return {"kind": "powerlaw", "D": p.D, "n": p.n}
    if isinstance(p, Huber):
        return {"kind": "huber", "sigma_a": p.sigma_a, "D": p.D}
    raise SchemaError("potential", f"{type(p).__name__} is not representable in a document")


def dump_model(e: RheoExpr) -> dict:
    if isinstance(e, Leaf):
        return {"node": "leaf", "potential": dump_potential(e.p)}
    node = "parallel" if isinstance(e, Parallel) else "serial"
    return {"node": node, "children": [dump_model(c) for c in e.children]}


def parse_simulation(doc):
    """Parse a simulation document into (model, drive, initial elastic strain)."""
    doc = _expect_object(doc, "")
    extra = set(doc) - {"E", "elements", "drive", "e_el0"}
    if extra:
        raise SchemaError(sorted(extra)[0], "unknown field")
    e_mod = _positive_number(doc, "E", "")
    elements = doc.get("elements")
    if not isinstance(elements, list) or not elements:
        raise SchemaError("elements", "must be a nonempty array")
    pots = [parse_potential(p, f"elements[{i}]") for i, p in enumerate(elements)]
    drive = doc.get("drive")
    if not isinstance(drive, list) or not drive:
        raise SchemaError("drive", "must be a nonempty array")
    segments = []
    for i, seg in enumerate(drive):
        seg = _expect_object(seg, f"drive[{i}]")
        extra = set(seg) - {"t_end", "eps"}
        if extra:
            raise SchemaError(f"drive[{i}].{sorted(extra)[0]}", "unknown field")
        t_end = _positive_number(seg, "t_end", f"drive[{i}]")
        if "eps" not in seg:
            raise SchemaError(f"drive[{i}].eps", "missing required field")
        eps = seg["eps"]
        if isinstance(eps, bool) or not isinstance(eps, (int, float)):
            raise SchemaError(f"drive[{i}].eps", f"must be a number, got {eps!r}")
        segments.append((t_end, float(eps)))
    e_el0 = doc.get("e_el0", 0.0)
    if isinstance(e_el0, bool) or not isinstance(e_el0, (int, float)):
        raise SchemaError("e_el0", f"must be a number, got {e_el0!r}")
    try:
        model = MaxwellModel(e_mod, pots)
        program = DriveProgram(segments)
    except Exception as exc:
        raise SchemaError("", str(exc)) from exc
    return model, program, float(e_el0)


def dump_simulation(model: MaxwellModel, drive: DriveProgram, e_el0: float = 0.0) -> dict:
    return {
        "E": model.E,
        "elements": [dump_potential(p) for p in model.elements],
        "drive": [{"t_end": t, "eps": r} for t, r in drive.segments],
        "e_el0": e_el0,
    }
