"""JSON encoding of operator expressions and monotone-operator descriptions.

Every node is an object with a ``"type"`` key::

    {"type": "translation", "a": [1, 2]}
    {"type": "affine_scale", "beta": 0.5, "a": [0]}
    {"type": "proj_hyperplane", "normal": [0, 1], "offset": 0}
    {"type": "proj_halfspace", "normal": [1, 1], "offset": 2}
    {"type": "proj_box", "lo": [0, 0], "hi": [1, 1]}
    {"type": "proj_ball", "center": [0, 0], "radius": 1}
    {"type": "proj_hyperbola_epi"}
    {"type": "resolvent", "operator": <monotone node>}
    {"type": "compose", "children": [...]}          # first child applied first
    {"type": "convex_combo", "weights": [...], "children": [...]}
    {"type": "averaged", "alpha": 0.5, "inner": <node>}

Monotone nodes use ``"constant_map"`` (``c``), ``"psd_linear"``
(``matrix``), ``"subdiff_abs"`` (``weight``, ``dim``), ``"normal_cone_box"``
(``lo``, ``hi``) and ``"shifted"`` (``inner``, ``v``).  Any operator node may
carry an optional ``"label"`` string.

Parse failures raise :class:`~displab.errors.DSLError` with one of the codes
below and a JSON pointer to the offending node.
"""

import json
import math
import numbers
from importlib import resources

import numpy as np

from . import monotone as mono
from . import operators as ops
from .errors import DimensionError, DSLError, InvalidOperatorError

__all__ = ["parse_operator", "parse_operator_file", "parse_monotone", "dump_operator",
           "dump_monotone", "dumps_operator", "shipped_operator", "shipped_path", "MALFORMED_JSON", "NOT_AN_OBJECT",
           "UNKNOWN_TYPE", "MISSING_FIELD", "INVALID_VALUE", "WEIGHT_RANGE",
           "WEIGHT_SUM", "DIM_MISMATCH", "ARITY"]

MALFORMED_JSON = "MALFORMED_JSON"
NOT_AN_OBJECT = "NOT_AN_OBJECT"
UNKNOWN_TYPE = "UNKNOWN_TYPE"
MISSING_FIELD = "MISSING_FIELD"
INVALID_VALUE = "INVALID_VALUE"
WEIGHT_RANGE = "WEIGHT_RANGE"
WEIGHT_SUM = "WEIGHT_SUM"
DIM_MISMATCH = "DIM_MISMATCH"
ARITY = "ARITY"


def _child(pointer, *keys):
    for k in keys:
        pointer += "/" + str(k).replace("~", "~0").replace("/", "~1")
    return pointer


def _field(node, key, pointer):
    if key not in node:
        raise DSLError(MISSING_FIELD, f"missing field '{key}'", pointer)
    return node[key]


def _number(value, pointer):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise DSLError(INVALID_VALUE, f"expected a number, got {value!r}", pointer)
    value = float(value)
    if not math.isfinite(value):
        raise DSLError(INVALID_VALUE, "number must be finite", pointer)
    return value


def _vector(value, pointer):
    if not isinstance(value, list) or not value:
        raise DSLError(INVALID_VALUE, "expected a non-empty list of numbers", pointer)
    return np.array([_number(t, _child(pointer, i)) for i, t in enumerate(value)])


def _same_dim(vectors, pointer):
    dims = {v.size for v in vectors}
    if len(dims) != 1:
        raise DSLError(DIM_MISMATCH, f"inconsistent dimensions {sorted(dims)}", pointer)


def _object(node, pointer):
    if not isinstance(node, dict):
        raise DSLError(NOT_AN_OBJECT, f"expected an object, got {type(node).__name__}", pointer)
    kind = _field(node, "type", pointer)
    if not isinstance(kind, str):
        raise DSLError(UNKNOWN_TYPE, f"'type' must be a string, got {kind!r}", _child(pointer, "type"))
    return kind


def _children(node, pointer, what):
    kids = _field(node, "children", pointer)
    p = _child(pointer, "children")
    if not isinstance(kids, list):
        raise DSLError(INVALID_VALUE, "'children' must be a list", p)
    if len(kids) < 2:
        raise DSLError(ARITY, f"{what} needs at least 2 children, got {len(kids)}", p)
    parsed = [parse_operator(c, _child(p, i)) for i, c in enumerate(kids)]
    dims = {c.dim for c in parsed}
    if len(dims) != 1:
        raise DSLError(DIM_MISMATCH, f"children have dimensions {sorted(dims)}", p)
    return parsed


def _guard(build, pointer):
    try:
        return build()
    except DimensionError as exc:
        raise DSLError(DIM_MISMATCH, str(exc), pointer) from None
    except (InvalidOperatorError, ValueError) as exc:
        raise DSLError(INVALID_VALUE, str(exc), pointer) from None


def parse_monotone(node, pointer=""):
    """Build a :class:`~displab.monotone.MonotoneSpec` from its JSON form."""
    kind = _object(node, pointer)
    if kind == "constant_map":
        c = _vector(_field(node, "c", pointer), _child(pointer, "c"))
        return mono.ConstantMap(c)
    if kind == "psd_linear":
        rows = _field(node, "matrix", pointer)
        p = _child(pointer, "matrix")
        if not isinstance(rows, list) or not rows:
            raise DSLError(INVALID_VALUE, "'matrix' must be a non-empty list of rows", p)
        mat = [_vector(r, _child(p, i)) for i, r in enumerate(rows)]
        if any(r.size != len(mat) for r in mat):
            raise DSLError(DIM_MISMATCH, "matrix must be square", p)
        return _guard(lambda: mono.PsdLinear(np.array(mat)), p)
    if kind == "subdiff_abs":
        w = _number(_field(node, "weight", pointer), _child(pointer, "weight"))
        dim = _field(node, "dim", pointer)
        if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
            raise DSLError(INVALID_VALUE, "'dim' must be a positive integer", _child(pointer, "dim"))
        return _guard(lambda: mono.SubdiffAbs(w, dim), pointer)
    if kind == "normal_cone_box":
        lo = _vector(_field(node, "lo", pointer), _child(pointer, "lo"))
        hi = _vector(_field(node, "hi", pointer), _child(pointer, "hi"))
        _same_dim([lo, hi], pointer)
        return _guard(lambda: mono.NormalConeBox(lo, hi), pointer)
    if kind == "shifted":
        inner = parse_monotone(_field(node, "inner", pointer), _child(pointer, "inner"))
        v = _vector(_field(node, "v", pointer), _child(pointer, "v"))
        if v.size != inner.dim:
            raise DSLError(DIM_MISMATCH, f"shift in R^{v.size} for operator on R^{inner.dim}",
                           _child(pointer, "v"))
        return mono.Shifted(inner, v)
    raise DSLError(UNKNOWN_TYPE, f"unknown monotone operator type '{kind}'", _child(pointer, "type"))


def parse_operator(node, pointer=""):
    """Build an operator expression from a decoded JSON value."""
    kind = _object(node, pointer)
    label = node.get("label")
    if label is not None and not isinstance(label, str):
        raise DSLError(INVALID_VALUE, "'label' must be a string", _child(pointer, "label"))

    if kind == "translation":
        a = _vector(_field(node, "a", pointer), _child(pointer, "a"))
        return ops.Translation(a, label=label)
    if kind == "affine_scale":
        beta = _number(_field(node, "beta", pointer), _child(pointer, "beta"))
        a = _vector(_field(node, "a", pointer), _child(pointer, "a"))
        return _guard(lambda: ops.AffineScale(beta, a, label=label), _child(pointer, "beta"))
    if kind in ("proj_hyperplane", "proj_halfspace"):
        normal = _vector(_field(node, "normal", pointer), _child(pointer, "normal"))
        offset = _number(_field(node, "offset", pointer), _child(pointer, "offset"))
        cls = ops.ProjHyperplane if kind == "proj_hyperplane" else ops.ProjHalfspace
        return _guard(lambda: cls(normal, offset, label=label), _child(pointer, "normal"))
    if kind == "proj_box":
        lo = _vector(_field(node, "lo", pointer), _child(pointer, "lo"))
        hi = _vector(_field(node, "hi", pointer), _child(pointer, "hi"))
        _same_dim([lo, hi], pointer)
        return _guard(lambda: ops.ProjBox(lo, hi, label=label), pointer)
    if kind == "proj_ball":
        center = _vector(_field(node, "center", pointer), _child(pointer, "center"))
        radius = _number(_field(node, "radius", pointer), _child(pointer, "radius"))
        return _guard(lambda: ops.ProjBall(center, radius, label=label), _child(pointer, "radius"))
    if kind == "proj_hyperbola_epi":
        if "dim" in node and node["dim"] != 2:
            raise DSLError(DIM_MISMATCH, "hyperbola projector acts on R^2 only", _child(pointer, "dim"))
        return ops.ProjHyperbolaEpi(label=label)
    if kind == "resolvent":
        spec = parse_monotone(_field(node, "operator", pointer), _child(pointer, "operator"))
        return mono.Resolvent(spec, label=label)
    if kind == "compose":
        return ops.Compose(_children(node, pointer, "compose"), label=label)
    if kind == "convex_combo":
        kids = _children(node, pointer, "convex_combo")
        raw = _field(node, "weights", pointer)
        p = _child(pointer, "weights")
        if not isinstance(raw, list):
            raise DSLError(INVALID_VALUE, "'weights' must be a list", p)
        weights = [_number(w, _child(p, i)) for i, w in enumerate(raw)]
        if len(weights) != len(kids):
            raise DSLError(INVALID_VALUE, f"{len(weights)} weights for {len(kids)} children", p)
        for i, w in enumerate(weights):
            if not 0.0 < w <= 1.0:
                raise DSLError(WEIGHT_RANGE, f"weight {w} outside (0, 1]", _child(p, i))
        total = math.fsum(weights)
        if abs(total - 1.0) > ops.WEIGHT_SUM_TOL:
            raise DSLError(WEIGHT_SUM, f"weights sum to {total!r}, not 1", p)
        return ops.ConvexCombo(weights, kids, label=label)
    if kind == "averaged":
        alpha = _number(_field(node, "alpha", pointer), _child(pointer, "alpha"))
        inner = parse_operator(_field(node, "inner", pointer), _child(pointer, "inner"))
        return _guard(lambda: ops.Averaged(alpha, inner, label=label), _child(pointer, "alpha"))
    raise DSLError(UNKNOWN_TYPE, f"unknown operator type '{kind}'", _child(pointer, "type"))


def parse_operator_file(path):
    """Read and validate an operator DSL file."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        node = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DSLError(MALFORMED_JSON, f"{exc.msg} (line {exc.lineno}, column {exc.colno})") from None
    return parse_operator(node)


def shipped_path(name):
    """Path of a bundled operator file, e.g. ``shipped_path("depierro")``."""
    return resources.files("displab").joinpath("data", f"{name}.json")


def shipped_operator(name):
    """Parse one of the bundled operator files by name."""
    return parse_operator(json.loads(shipped_path(name).read_text(encoding="utf-8")))


def _floats(v):
    return [float(t) for t in np.ravel(v)]


def dump_monotone(spec):
    if isinstance(spec, mono.ConstantMap):
        return {"type": "constant_map", "c": _floats(spec.c)}
    if isinstance(spec, mono.PsdLinear):
        return {"type": "psd_linear", "matrix": [_floats(r) for r in spec.matrix]}
    if isinstance(spec, mono.SubdiffAbs):
        return {"type": "subdiff_abs", "weight": spec.weight, "dim": spec.dim}
    if isinstance(spec, mono.NormalConeBox):
        return {"type": "normal_cone_box", "lo": _floats(spec.lo), "hi": _floats(spec.hi)}
    if isinstance(spec, mono.Shifted):
        return {"type": "shifted", "inner": dump_monotone(spec.inner), "v": _floats(spec.v)}
    raise TypeError(f"cannot serialize {type(spec).__name__}")


def dump_operator(op):
    """Inverse of :func:`parse_operator`."""
    if isinstance(op, ops.Translation):
        out = {"type": "translation", "a": _floats(op.a)}
    elif isinstance(op, ops.AffineScale):
        out = {"type": "affine_scale", "beta": op.beta, "a": _floats(op.a)}
    elif isinstance(op, (ops.ProjHyperplane, ops.ProjHalfspace)):
        out = {"type": op.kind, "normal": _floats(op.normal), "offset": op.offset}
    elif isinstance(op, ops.ProjBox):
        out = {"type": "proj_box", "lo": _floats(op.lo), "hi": _floats(op.hi)}
    elif isinstance(op, ops.ProjBall):
        out = {"type": "proj_ball", "center": _floats(op.center), "radius": op.radius}
    elif isinstance(op, ops.ProjHyperbolaEpi):
        out = {"type": "proj_hyperbola_epi"}
    elif isinstance(op, mono.Resolvent):
        out = {"type": "resolvent", "operator": dump_monotone(op.spec)}
    elif isinstance(op, ops.Compose):
        out = {"type": "compose", "children": [dump_operator(c) for c in op.children]}
    elif isinstance(op, ops.ConvexCombo):
        out = {"type": "convex_combo", "weights": _floats(op.weights),
               "children": [dump_operator(c) for c in op.children]}
    elif isinstance(op, ops.Averaged):
        out = {"type": "averaged", "alpha": op.alpha, "inner": dump_operator(op.inner)}
    else:
        raise TypeError(f"cannot serialize {type(op).__name__}")
    if op.label is not None:
        out["label"] = op.label
    return out


def dumps_operator(op, **kwargs):
    return json.dumps(dump_operator(op), **kwargs)
