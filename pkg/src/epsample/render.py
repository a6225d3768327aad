"""Deterministic SVG drawings of cuttings and partitions.

Cells are clipped to a view box with the classic polygon-clipping pass
over their halfplane constraints, so unbounded cells draw fine. Output
depends only on the structure and arguments; equal inputs give equal
bytes.
"""

from __future__ import annotations

import math

import numpy as np

from .cutting import Cutting
from .geom import GeometryError
from .partition import Partition

MAX_CELLS = 100_000

_BOX_CLAMP = 10.0  # cutting view box never chases far-out vertices


def _clip(poly, f, cross):
    out = []
    m = len(poly)
    for i in range(m):
        p, q = poly[i], poly[(i + 1) % m]
        fp, fq = f(p), f(q)
        if fp >= 0.0:
            out.append(p)
        if (fp >= 0.0) != (fq >= 0.0):
            out.append(cross(p, q))
    return out


def _cell_polygon(cell, box):
    """Cell intersected with the view box, as vertex tuples."""
    x0, y0, x1, y1 = box
    poly = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
    ea, eb, eup, lo, hi = cell.constraint_arrays()

    def line_cross(a, b):
        def cross(p, q):
            denom = (q[1] - p[1]) - a * (q[0] - p[0])
            t = (a * p[0] + b - p[1]) / denom
            x = p[0] + t * (q[0] - p[0])
            return (x, a * x + b)
        return cross

    def x_cross(c):
        def cross(p, q):
            t = (c - p[0]) / (q[0] - p[0])
            return (c, p[1] + t * (q[1] - p[1]))
        return cross

    for a, b, up in zip(ea, eb, eup):
        sgn = 1.0 if up else -1.0
        poly = _clip(poly, lambda p, a=a, b=b, s=sgn: s * (p[1] - (a * p[0] + b)),
                     line_cross(a, b))
        if not poly:
            return []
    if math.isfinite(lo):
        poly = _clip(poly, lambda p, c=lo: p[0] - c, x_cross(lo))
    if poly and math.isfinite(hi):
        poly = _clip(poly, lambda p, c=hi: c - p[0], x_cross(hi))
    return poly


def _cutting_box(cells):
    xs, ys = [], []
    for c in cells:
        for v in c.vertices():
            if abs(v.x) <= _BOX_CLAMP and abs(v.y) <= _BOX_CLAMP:
                xs.append(v.x)
                ys.append(v.y)
    if not xs:
        return (-1.0, -1.0, 1.0, 1.0)
    return _pad(min(xs), min(ys), max(xs), max(ys))


def _pad(x0, y0, x1, y1, frac=0.05):
    w = max(x1 - x0, 1e-9)
    h = max(y1 - y0, 1e-9)
    return (x0 - frac * w, y0 - frac * h, x1 + frac * w, y1 + frac * h)


def render_svg(structure, path=None, lines=None, size: int = 640) -> str:
    """SVG text for a Cutting or Partition; written to path when given.

    Cells are stroked filled polygons; `lines` adds an input-line layer;
    partitions with retained points get a dot layer.
    """
    if isinstance(structure, Cutting):
        cells = [leaf for leaf in structure.tree.leaves()]
        regions = cells
        points = None
        box = _cutting_box(cells)
    elif isinstance(structure, Partition):
        regions = []
        for region, _ in structure.cells:
            if region is None:
                raise GeometryError("partition carries no cell regions")
            regions.append(region)
        points = structure.points
        if points is not None and len(points):
            box = _pad(points[:, 0].min(), points[:, 1].min(),
                       points[:, 0].max(), points[:, 1].max())
        else:
            box = _cutting_box(regions)
    else:
        raise GeometryError(
            f"cannot render {type(structure).__name__}; "
            "expected Cutting or Partition")
    if len(regions) > MAX_CELLS:
        raise GeometryError(
            f"refusing to render {len(regions)} cells (cap {MAX_CELLS})")

    x0, y0, x1, y1 = box
    scale = size / max(x1 - x0, y1 - y0)
    w = (x1 - x0) * scale
    h = (y1 - y0) * scale

    def sx(x):
        return (x - x0) * scale

    def sy(y):
        return h - (y - y0) * scale

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" '
           f'width="{w:.1f}" height="{h:.1f}" '
           f'viewBox="0 0 {w:.1f} {h:.1f}">']
    out.append(f'<rect width="{w:.1f}" height="{h:.1f}" fill="white"/>')
    for i, cell in enumerate(regions):
        poly = _cell_polygon(cell, box)
        if len(poly) < 3:
            continue
        pts = " ".join(f"{sx(x):.3f},{sy(y):.3f}" for x, y in poly)
        hue = (i * 47) % 360
        out.append(f'<polygon points="{pts}" '
                   f'fill="hsl({hue},60%,85%)" '
                   f'stroke="#333" stroke-width="1"/>')
    if lines:
        for wl in lines:
            ln = getattr(wl, "line", wl)
            p = (x0, ln.a * x0 + ln.b)
            q = (x1, ln.a * x1 + ln.b)
            out.append(f'<line x1="{sx(p[0]):.3f}" y1="{sy(p[1]):.3f}" '
                       f'x2="{sx(q[0]):.3f}" y2="{sy(q[1]):.3f}" '
                       f'stroke="#1d4ed8" stroke-width="0.8" '
                       f'opacity="0.6"/>')
    if points is not None and 0 < len(points) <= 20_000:
        for x, y in points:
            out.append(f'<circle cx="{sx(x):.3f}" cy="{sy(y):.3f}" '
                       f'r="1.4" fill="#222" opacity="0.5"/>')
    out.append("</svg>")
    text = "\n".join(out) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text
