"""Stage-by-stage traces of a composition in the plane, as CSV and SVG.

For ``compose([T_1, ..., T_m])`` each outer step records the point after
``T_1``, after ``T_2 T_1``, ..., after the full composition.  Stage names are
built from child labels (``"P1"``, ``"P2P1"``, ``"P3P2P1"``), falling back to
``T1, T2, ...``.  Output is byte-deterministic: coordinates are written with
``repr`` in the CSV and fixed 4-decimal formatting in the SVG.
"""

import csv
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from .errors import DimensionError
from .operators import (Compose, ProjBall, ProjBox, ProjHalfspace, ProjHyperbolaEpi,
                        ProjHyperplane, as_vector, projector_leaves)

__all__ = ["TraceRecord", "trace_points", "write_trace_csv", "write_trace_svg", "emit_trace"]

# blue, green, black for the first two stages and the full composition
_STAGE_COLORS = ("#1f4fd1", "#1b9e3a", "#000000", "#b35806", "#7b3294")
_SET_COLOR = "#888888"
_WIDTH, _HEIGHT, _MARGIN = 800.0, 600.0, 40.0


@dataclass(frozen=True)
class TraceRecord:
    step: int
    stage: str
    point: tuple


def _stage_names(op):
    children = op.children if isinstance(op, Compose) else (op,)
    labels = [c.label or f"T{i + 1}" for i, c in enumerate(children)]
    if not isinstance(op, Compose):
        return children, [labels[0]]
    names, acc = [], ""
    for lab in labels:
        acc = lab + acc
        names.append(acc)
    return children, names


def trace_points(op, x0, steps):
    """List of :class:`TraceRecord`, steps numbered from 1."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    x = as_vector(x0, dim=op.dim, name="x0")
    children, names = _stage_names(op)
    records = []
    for n in range(1, steps + 1):
        for child, name in zip(children, names):
            x = child._eval(x)
            records.append(TraceRecord(n, name, tuple(float(t) for t in x)))
    return records


def write_trace_csv(records, path):
    """Columns ``step,stage,x,y`` for planar traces, ``x1..xd`` otherwise."""
    dim = len(records[0].point) if records else 2
    coords = ["x", "y"] if dim == 2 else [f"x{i + 1}" for i in range(dim)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "stage"] + coords)
        for r in records:
            w.writerow([r.step, r.stage] + [repr(t) for t in r.point])


def _f(v):
    out = f"{v:.4f}"
    return "0.0000" if out == "-0.0000" else out


class _Frame:
    """Uniform-scale map from data coordinates to the SVG canvas."""

    def __init__(self, pts):
        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
        lo = np.minimum(lo, [-0.5, -0.5])
        hi = np.maximum(hi, [1.5, 1.5])
        pad = 0.08 * (hi - lo)
        self.lo, self.hi = lo - pad, hi + pad
        span = self.hi - self.lo
        self.scale = min((_WIDTH - 2 * _MARGIN) / span[0], (_HEIGHT - 2 * _MARGIN) / span[1])

    def __call__(self, x, y):
        return (_MARGIN + (x - self.lo[0]) * self.scale,
                _HEIGHT - _MARGIN - (y - self.lo[1]) * self.scale)

    def line_through(self, normal, offset):
        """Endpoints of ``{<normal, p> = offset}`` clipped to the data window."""
        n0, n1 = normal
        if abs(n1) >= abs(n0):
            xs = (self.lo[0], self.hi[0])
            return [(x, (offset - n0 * x) / n1) for x in xs]
        ys = (self.lo[1], self.hi[1])
        return [((offset - n1 * y) / n0, y) for y in ys]


def _set_elements(frame, leaf):
    style = f'fill="none" stroke="{_SET_COLOR}" stroke-width="1.5"'
    if isinstance(leaf, (ProjHyperplane, ProjHalfspace)):
        (xa, ya), (xb, yb) = [frame(*p) for p in frame.line_through(leaf.normal, leaf.offset)]
        dash = ' stroke-dasharray="6 4"' if isinstance(leaf, ProjHalfspace) else ""
        return [f'<line x1="{_f(xa)}" y1="{_f(ya)}" x2="{_f(xb)}" y2="{_f(yb)}" {style}{dash}/>']
    if isinstance(leaf, ProjBox):
        x0, y1 = frame(leaf.lo[0], leaf.lo[1])
        x1, y0 = frame(leaf.hi[0], leaf.hi[1])
        return [f'<rect x="{_f(x0)}" y="{_f(y0)}" width="{_f(x1 - x0)}" '
                f'height="{_f(y1 - y0)}" {style}/>']
    if isinstance(leaf, ProjBall):
        cx, cy = frame(*leaf.center)
        return [f'<circle cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(leaf.radius * frame.scale)}" {style}/>']
    if isinstance(leaf, ProjHyperbolaEpi):
        t_lo = max(frame.lo[0], 1.0 / frame.hi[1], 1e-3)
        t_hi = frame.hi[0]
        if t_hi <= t_lo:
            return []
        ts = np.geomspace(t_lo, t_hi, 400)
        pts = " ".join(f"{_f(a)},{_f(b)}" for a, b in (frame(t, 1.0 / t) for t in ts))
        return [f'<polyline points="{pts}" {style}/>']
    return []


def write_trace_svg(records, path, op=None):
    """Render the point families (and the sets of ``op``'s projectors) as SVG 1.1."""
    if not records:
        raise ValueError("nothing to draw")
    pts = np.array([r.point for r in records])
    if pts.shape[1] != 2:
        raise DimensionError("SVG traces need points in R^2")
    frame = _Frame(pts)
    stages = list(dict.fromkeys(r.stage for r in records))
    final = stages[-1]
    colors = {s: _STAGE_COLORS[i % len(_STAGE_COLORS)] for i, s in enumerate(stages[:-1])}
    colors[final] = "#000000"

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{int(_WIDTH)}" '
        f'height="{int(_HEIGHT)}" viewBox="0 0 {int(_WIDTH)} {int(_HEIGHT)}">',
        f'<rect x="0" y="0" width="{int(_WIDTH)}" height="{int(_HEIGHT)}" fill="#ffffff"/>',
    ]
    ox, oy = frame(0.0, 0.0)
    lines.append(f'<line x1="{_f(_MARGIN)}" y1="{_f(oy)}" x2="{_f(_WIDTH - _MARGIN)}" '
                 f'y2="{_f(oy)}" stroke="#dddddd" stroke-width="1"/>')
    lines.append(f'<line x1="{_f(ox)}" y1="{_f(_MARGIN)}" x2="{_f(ox)}" '
                 f'y2="{_f(_HEIGHT - _MARGIN)}" stroke="#dddddd" stroke-width="1"/>')
    if op is not None:
        for leaf in projector_leaves(op):
            if leaf.dim == 2:
                lines.extend(_set_elements(frame, leaf))
    for stage in stages:
        lines.append(f'<g fill="{colors[stage]}">')
        for r in records:
            if r.stage == stage:
                cx, cy = frame(*r.point)
                lines.append(f'<circle cx="{_f(cx)}" cy="{_f(cy)}" r="3"/>')
        lines.append("</g>")
    for i, stage in enumerate(stages):
        y = _MARGIN + 18.0 * i
        lines.append(f'<circle cx="{_f(_WIDTH - 150)}" cy="{_f(y)}" r="4" fill="{colors[stage]}"/>')
        lines.append(f'<text x="{_f(_WIDTH - 140)}" y="{_f(y + 4)}" font-family="sans-serif" '
                     f'font-size="12" fill="#000000">{escape(stage)}</text>')
    lines.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def emit_trace(op, x0, steps, csv_path=None, svg_path=None):
    """Trace ``op`` from ``x0`` and write CSV and/or SVG; returns the records."""
    records = trace_points(op, x0, steps)
    if csv_path is not None:
        write_trace_csv(records, csv_path)
    if svg_path is not None:
        if op.dim != 2:
            raise DimensionError("SVG traces need an operator on R^2")
        write_trace_svg(records, svg_path, op)
    return records
