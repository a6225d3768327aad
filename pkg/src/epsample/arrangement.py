"""Binary arrangement trees over convex planar cells.

A tree starts from a single cell (the whole plane, or a caller-supplied
convex region) and grows by splitting one leaf at a time with a full line.
Polygon-kind cells are intersections of halfplane edges; an optional side cap
re-splits oversized polygons along a balancing chord. Trapezoid-kind cells
keep at most a top line, a bottom line, and an x-window, with "vertical"
walls realized as x-threshold splits so no vertical Line is ever needed.

Routing is exact and closed-above: a point on a splitting line belongs to
the upper child, a point on an x-threshold to the right child. The tree
structure itself lives in flat arrays (the mirror) shared with the numba
kernels; leaf payloads are Cell objects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from epsample import kernels
from epsample.geom import (
    DEFAULT_TOL,
    DoubleWedge,
    GeometryError,
    InvariantViolation,
    Line,
    Point,
    Segment,
    Tolerance,
    approx_eq,
    line_through,
)

_INF = math.inf


class NoCrossing(GeometryError):
    """The splitting line misses the interior of the target cell."""


@dataclass(frozen=True)
class CellKind:
    shape: str  # "polygon" | "trapezoid"
    max_sides: int | None = 8

    def __post_init__(self):
        if self.shape not in ("polygon", "trapezoid"):
            raise ValueError(f"unknown cell shape {self.shape!r}")
        if self.shape == "polygon" and self.max_sides is not None and self.max_sides < 3:
            raise ValueError("polygon side cap must be at least 3")


POLY4 = CellKind("polygon", 4)
POLY8 = CellKind("polygon", 8)
POLY_UNCAPPED = CellKind("polygon", None)
TRAPEZOID = CellKind("trapezoid", None)


class _Edge:
    """One halfplane constraint of a polygon cell, with its border extent."""

    __slots__ = ("a", "b", "up", "lo", "hi")

    def __init__(self, a, b, up, lo=-_INF, hi=_INF):
        self.a = a
        self.b = b
        self.up = up  # cell lies on/above the line when True
        self.lo = lo
        self.hi = hi


def _wide_enough(lo, hi, tol):
    """Interval [lo, hi] has interior width above the tolerance floor."""
    if hi <= lo:
        return False
    width = hi - lo
    if math.isinf(width):
        return True
    return width > max(tol.rel_tol * max(abs(lo), abs(hi)), tol.abs_tol)


def _halfplane_interval(a, b, ca, cb, want_up, lo, hi, tol):
    """Clip [lo, hi] to where line (a,b) satisfies the halfplane of (ca,cb).

    Returns (lo, hi, collinear). Collinear segments come back empty; the
    caller decides what coincidence means.
    """
    da = a - ca
    db = b - cb
    ta = tol.rel_tol * max(abs(a), abs(ca)) + tol.abs_tol
    tb = tol.rel_tol * max(abs(b), abs(cb)) + tol.abs_tol
    if abs(da) <= ta:
        if abs(db) <= tb:
            return _INF, -_INF, True
        if (db > 0.0) == want_up:
            return lo, hi, False
        return _INF, -_INF, False
    root = -db / da
    if (da > 0.0) == want_up:
        lo = max(lo, root)
    else:
        hi = min(hi, root)
    if lo > hi:
        return _INF, -_INF, False
    return lo, hi, False


class Cell:
    """Leaf payload: a convex region plus resident points and crossing lines."""

    __slots__ = ("kind", "edges", "top", "bottom", "x_lo", "x_hi",
                 "point_idx", "cross", "node")

    def __init__(self, kind, edges=None, top=None, bottom=None,
                 x_lo=-_INF, x_hi=_INF):
        self.kind = kind
        self.edges = edges if edges is not None else []
        self.top = top        # trapezoid only: Line or None
        self.bottom = bottom  # trapezoid only
        self.x_lo = x_lo
        self.x_hi = x_hi
        self.point_idx = np.empty(0, dtype=np.int64)
        self.cross = None     # optional (ids, a, b, lo, hi, w) arrays
        self.node = -1

    # -- geometry ----------------------------------------------------------

    def side_count(self) -> int:
        if self.kind.shape == "polygon":
            return len(self.edges)
        n = 0
        n += self.top is not None
        n += self.bottom is not None
        n += math.isfinite(self.x_lo)
        n += math.isfinite(self.x_hi)
        return n

    def constraint_arrays(self):
        """(edge_a, edge_b, edge_up, x_lo, x_hi) for the clip kernels."""
        if self.kind.shape == "polygon":
            k = len(self.edges)
            ea = np.empty(k)
            eb = np.empty(k)
            eup = np.empty(k, dtype=np.bool_)
            for i, e in enumerate(self.edges):
                ea[i] = e.a
                eb[i] = e.b
                eup[i] = e.up
            return ea, eb, eup, self.x_lo, self.x_hi
        ea, eb, eup = [], [], []
        if self.bottom is not None:
            ea.append(self.bottom.a)
            eb.append(self.bottom.b)
            eup.append(True)
        if self.top is not None:
            ea.append(self.top.a)
            eb.append(self.top.b)
            eup.append(False)
        return (np.array(ea), np.array(eb), np.array(eup, dtype=np.bool_),
                self.x_lo, self.x_hi)

    def contains(self, p: Point) -> bool:
        # window is closed on the left, open on the right (matches routing)
        if p.x < self.x_lo or p.x >= self.x_hi:
            return False
        if self.kind.shape == "polygon":
            for e in self.edges:
                y = e.a * p.x + e.b
                if e.up:
                    if p.y < y:
                        return False
                elif p.y >= y:
                    return False
            return True
        if self.bottom is not None and p.y < self.bottom.y_at(p.x):
            return False
        if self.top is not None and p.y >= self.top.y_at(p.x):
            return False
        return True

    def line_interval(self, a, b, tol: Tolerance = DEFAULT_TOL):
        """Feasible x-interval of line y=ax+b inside this cell."""
        lo, hi = self.x_lo, self.x_hi
        if self.kind.shape == "polygon":
            cons = [(e.a, e.b, e.up) for e in self.edges]
        else:
            cons = []
            if self.bottom is not None:
                cons.append((self.bottom.a, self.bottom.b, True))
            if self.top is not None:
                cons.append((self.top.a, self.top.b, False))
        for ca, cb, up in cons:
            lo, hi, _ = _halfplane_interval(a, b, ca, cb, up, lo, hi, tol)
            if lo > hi:
                break
        return lo, hi

    def crossed_by(self, a, b, tol: Tolerance = DEFAULT_TOL) -> bool:
        """True when the line meets the cell's interior with positive length."""
        lo, hi = self.line_interval(a, b, tol)
        return _wide_enough(lo, hi, tol)

    def vertices(self, tol: Tolerance = DEFAULT_TOL):
        """Finite boundary vertices in convex-position angular order."""
        pts = []
        if self.kind.shape == "polygon":
            for e in self.edges:
                for x in (e.lo, e.hi):
                    if math.isfinite(x):
                        pts.append((x, e.a * x + e.b))
        else:
            for x in (self.x_lo, self.x_hi):
                if not math.isfinite(x):
                    continue
                for l in (self.bottom, self.top):
                    if l is not None:
                        pts.append((x, l.y_at(x)))
            # top/bottom meeting inside the window forms a vertex too
            if self.top is not None and self.bottom is not None \
                    and not approx_eq(self.top.a, self.bottom.a, tol):
                x = (self.bottom.b - self.top.b) / (self.top.a - self.bottom.a)
                if self.x_lo <= x <= self.x_hi:
                    pts.append((x, self.top.y_at(x)))
        if not pts:
            return []
        pts = sorted(set(pts))
        out = []
        for x, y in pts:
            if out and approx_eq(out[-1][0], x, tol) and approx_eq(out[-1][1], y, tol):
                continue
            out.append((x, y))
        if len(out) > 2:
            cx = sum(p[0] for p in out) / len(out)
            cy = sum(p[1] for p in out) / len(out)
            out.sort(key=lambda p: math.atan2(p[1] - cy, p[0] - cx))
        return [Point(x, y) for x, y in out]

    def boundary_segments(self):
        """Boundary as Segments (polygon edges, or trapezoid walls omitted)."""
        segs = []
        if self.kind.shape == "polygon":
            for e in self.edges:
                segs.append(Segment(Line(e.a, e.b), e.lo, e.hi))
        else:
            if self.bottom is not None:
                segs.append(Segment(self.bottom, self.x_lo, self.x_hi))
            if self.top is not None:
                segs.append(Segment(self.top, self.x_lo, self.x_hi))
        return segs

    def crossing_weight(self) -> float:
        if self.cross is None:
            return 0.0
        return float(self.cross[5].sum())


def _clip_cross(cross, ea, eb, eup, x_lo, x_hi, tol):
    """Crossing arrays clipped to a sub-region; drops degenerate leftovers."""
    if cross is None:
        return None
    ids, a, b, lo, hi, w = cross
    if ids.shape[0] == 0:
        return cross
    nlo, nhi = kernels.clip_intervals(a, b, lo, hi, ea, eb, eup, x_lo, x_hi,
                                      tol.rel_tol, tol.abs_tol)
    width = nhi - nlo
    with np.errstate(invalid="ignore"):
        sep = np.maximum(tol.rel_tol * np.maximum(np.abs(nlo), np.abs(nhi)),
                         tol.abs_tol)
        keep = (nhi > nlo) & ((width > sep) | np.isinf(width))
    return (ids[keep], a[keep], b[keep], nlo[keep], nhi[keep], w[keep])


class ArrangementTree:
    """Growable arrangement of convex cells; see module docstring."""

    def __init__(self, kind: CellKind = POLY8, points=None, root_cell=None,
                 tol: Tolerance = DEFAULT_TOL):
        self.kind = kind
        self.tol = tol
        self.points = None
        # mirror arrays (python lists, appended in step with node creation)
        self._kind = []
        self._na = []
        self._nb = []
        self._above = []
        self._below = []
        self._ax = []
        self._ay = []
        self._leaf_by_node = {}
        self._frozen = None
        root = self._clone_region(root_cell) if root_cell is not None \
            else Cell(kind)
        self._add_leaf(root)
        if points is not None:
            self.insert_points(points)

    # -- bookkeeping -------------------------------------------------------

    def _clone_region(self, src: Cell) -> Cell:
        if src.kind.shape != self.kind.shape and src.kind.shape == "trapezoid":
            raise GeometryError("cannot root a polygon tree at a trapezoid")
        c = Cell(self.kind, x_lo=src.x_lo, x_hi=src.x_hi)
        if src.kind.shape == "polygon":
            c.edges = [_Edge(e.a, e.b, e.up, e.lo, e.hi) for e in src.edges]
            if self.kind.shape == "trapezoid":
                raise GeometryError("cannot root a trapezoid tree at a polygon")
        else:
            c.top = src.top
            c.bottom = src.bottom
        return c

    def _add_leaf(self, cell: Cell) -> Cell:
        nid = len(self._kind)
        self._kind.append(kernels.NODE_LEAF)
        self._na.append(0.0)
        self._nb.append(0.0)
        self._above.append(-1)
        self._below.append(-1)
        self._ax.append(0.0)
        self._ay.append(0.0)
        cell.node = nid
        self._leaf_by_node[nid] = cell
        return cell

    def _make_internal(self, nid, node_kind, a, b, up_child, down_child,
                       anchor):
        self._kind[nid] = node_kind
        self._na[nid] = a
        self._nb[nid] = b
        self._above[nid] = up_child
        self._below[nid] = down_child
        self._ax[nid] = anchor[0]
        self._ay[nid] = anchor[1]
        del self._leaf_by_node[nid]
        self._frozen = None

    def leaves(self):
        return [self._leaf_by_node[k] for k in sorted(self._leaf_by_node)]

    @property
    def n_leaves(self) -> int:
        return len(self._leaf_by_node)

    # -- points ------------------------------------------------------------

    def insert_points(self, pts) -> None:
        """Append points and route them to leaves (closed-above ties)."""
        pts = np.asarray(pts, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise GeometryError("points must be an (n, 2) array")
        if not np.all(np.isfinite(pts)):
            raise GeometryError("points must be finite")
        if self.points is None:
            self.points = pts.copy()
            base = 0
        else:
            base = self.points.shape[0]
            self.points = np.vstack([self.points, pts])
        idx = np.arange(base, base + pts.shape[0], dtype=np.int64)
        self._frozen = None
        if len(self._kind) == 1:
            root = self._leaf_by_node[0]
            root.point_idx = np.concatenate([root.point_idx, idx])
            return
        nodes = self._locate_nodes(pts)
        order = np.argsort(nodes, kind="stable")
        nodes = nodes[order]
        idx = idx[order]
        cuts = np.flatnonzero(np.diff(nodes)) + 1
        for chunk_nodes, chunk_idx in zip(np.split(nodes, cuts),
                                          np.split(idx, cuts)):
            leaf = self._leaf_by_node[int(chunk_nodes[0])]
            leaf.point_idx = np.concatenate([leaf.point_idx, chunk_idx])

    def _locate_nodes(self, pts):
        return kernels.locate_points(
            np.array(self._kind, dtype=np.int8),
            np.array(self._na), np.array(self._nb),
            np.array(self._above, dtype=np.int64),
            np.array(self._below, dtype=np.int64),
            pts[:, 0], pts[:, 1])

    def locate(self, p: Point) -> Cell:
        """Leaf whose cell holds p (ties resolved closed-above/right)."""
        nid = int(self._locate_nodes(np.array([[p.x, p.y]]))[0])
        return self._leaf_by_node[nid]

    def locate_bulk(self, pts):
        """Leaf node ids for each point; map back via ``leaf_of``."""
        pts = np.asarray(pts, dtype=np.float64)
        return self._locate_nodes(pts)

    def leaf_of(self, node_id: int) -> Cell:
        return self._leaf_by_node[int(node_id)]

    # -- splitting ---------------------------------------------------------

    def attach_crossings(self, cell: Cell, ids, a, b, w) -> None:
        """Install a crossing-line set on a leaf, clipped to its region."""
        ids = np.asarray(ids, dtype=np.int64)
        a = np.asarray(a, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        w = np.asarray(w, dtype=np.float64)
        lo = np.full(a.shape, -_INF)
        hi = np.full(a.shape, _INF)
        ea, eb, eup, xlo, xhi = cell.constraint_arrays()
        cell.cross = _clip_cross((ids, a, b, lo, hi, w), ea, eb, eup,
                                 xlo, xhi, self.tol)

    def split_leaf(self, cell: Cell, line: Line):
        """Split one leaf by a full line; returns the replacement leaves.

        Raises NoCrossing when the line misses the cell interior. Polygon
        trees may return more than two leaves when the side cap forces chord
        re-splits; trapezoid trees return up to four.
        """
        if cell.node not in self._leaf_by_node:
            raise InvariantViolation("cell is no longer a leaf")
        if not cell.crossed_by(line.a, line.b, self.tol):
            raise NoCrossing(f"line {line} misses cell interior")
        self._frozen = None
        if self.kind.shape == "polygon":
            up, down = self._split_by_line(cell, line)
            out = []
            for child in (up, down):
                out.extend(self._enforce_cap(child))
            return out
        return self._split_trapezoid(cell, line)

    def _anchor_for(self, lo, hi, line: Line):
        if math.isinf(lo) and math.isinf(hi):
            x = 0.0
        elif math.isinf(lo):
            x = hi - 1.0
        elif math.isinf(hi):
            x = lo + 1.0
        else:
            x = 0.5 * (lo + hi)
        return (x, line.y_at(x))

    def _split_by_line(self, cell: Cell, line: Line):
        tol = self.tol
        c_lo, c_hi = cell.line_interval(line.a, line.b, tol)
        up = Cell(self.kind, x_lo=cell.x_lo, x_hi=cell.x_hi)
        down = Cell(self.kind, x_lo=cell.x_lo, x_hi=cell.x_hi)
        if self.kind.shape == "polygon":
            for child, side_up in ((up, True), (down, False)):
                kept = []
                for e in cell.edges:
                    lo, hi, _ = _halfplane_interval(
                        e.a, e.b, line.a, line.b, side_up, e.lo, e.hi, tol)
                    if _wide_enough(lo, hi, tol):
                        kept.append(_Edge(e.a, e.b, e.up, lo, hi))
                kept.append(_Edge(line.a, line.b, side_up, c_lo, c_hi))
                child.edges = kept
        else:
            up.top, up.bottom = cell.top, line
            down.top, down.bottom = line, cell.bottom
        # route points: exact closed-above
        if cell.point_idx.shape[0]:
            pts = self.points[cell.point_idx]
            mask = pts[:, 1] >= line.a * pts[:, 0] + line.b
            up.point_idx = cell.point_idx[mask]
            down.point_idx = cell.point_idx[~mask]
        # route crossing lines
        if cell.cross is not None:
            one = np.array([line.a]), np.array([line.b])
            up.cross = _clip_cross(cell.cross, one[0], one[1],
                                   np.array([True]), cell.x_lo, cell.x_hi, tol)
            down.cross = _clip_cross(cell.cross, one[0], one[1],
                                     np.array([False]), cell.x_lo, cell.x_hi,
                                     tol)
        nid = cell.node
        self._add_leaf(up)
        self._add_leaf(down)
        self._make_internal(nid, kernels.NODE_LINE, line.a, line.b,
                            up.node, down.node,
                            self._anchor_for(c_lo, c_hi, line))
        return up, down

    def _split_by_x(self, cell: Cell, x0: float, anchor_y: float):
        tol = self.tol
        right = Cell(self.kind, top=cell.top, bottom=cell.bottom,
                     x_lo=x0, x_hi=cell.x_hi)
        left = Cell(self.kind, top=cell.top, bottom=cell.bottom,
                    x_lo=cell.x_lo, x_hi=x0)
        if cell.point_idx.shape[0]:
            pts = self.points[cell.point_idx]
            mask = pts[:, 0] >= x0
            right.point_idx = cell.point_idx[mask]
            left.point_idx = cell.point_idx[~mask]
        if cell.cross is not None:
            empty = (np.empty(0), np.empty(0), np.empty(0, dtype=np.bool_))
            right.cross = _clip_cross(cell.cross, *empty, x0, cell.x_hi, tol)
            left.cross = _clip_cross(cell.cross, *empty, cell.x_lo, x0, tol)
        nid = cell.node
        self._add_leaf(right)
        self._add_leaf(left)
        self._make_internal(nid, kernels.NODE_XSPLIT, x0, 0.0,
                            right.node, left.node, (x0, anchor_y))
        return right, left

    def _split_trapezoid(self, cell: Cell, line: Line):
        tol = self.tol
        xs = []
        for wall in (cell.top, cell.bottom):
            if wall is None or approx_eq(wall.a, line.a, tol):
                continue
            x = (line.b - wall.b) / (wall.a - line.a)
            lo, hi = cell.x_lo, cell.x_hi
            sep = max(tol.rel_tol * max(abs(x), 1.0), tol.abs_tol)
            if x > lo + sep and x < hi - sep:
                xs.append(x)
        xs = sorted(set(xs))
        strips = []
        current = cell
        for x0 in xs:
            right, left = self._split_by_x(current, x0, line.y_at(x0))
            strips.append(left)
            current = right
        strips.append(current)
        out = []
        crossed = False
        for strip in strips:
            if self._line_inside_strip(strip, line):
                up, down = self._split_by_line(strip, line)
                out.extend((up, down))
                crossed = True
            else:
                out.append(strip)
        if not crossed:
            raise NoCrossing(f"line {line} misses trapezoid interior")
        return out

    def _line_inside_strip(self, strip: Cell, line: Line) -> bool:
        lo, hi = strip.x_lo, strip.x_hi
        if math.isinf(lo) and math.isinf(hi):
            xm = 0.0
        elif math.isinf(lo):
            xm = hi - 1.0
        elif math.isinf(hi):
            xm = lo + 1.0
        else:
            xm = 0.5 * (lo + hi)
        y = line.y_at(xm)
        if strip.bottom is not None and y <= strip.bottom.y_at(xm):
            return False
        if strip.top is not None and y >= strip.top.y_at(xm):
            return False
        return True

    def _enforce_cap(self, cell: Cell):
        cap = self.kind.max_sides
        if cap is None or len(cell.edges) <= cap:
            return [cell]
        chord = self._balancing_chord(cell)
        up, down = self._split_by_line(cell, chord)
        return self._enforce_cap(up) + self._enforce_cap(down)

    def _balancing_chord(self, cell: Cell) -> Line:
        verts = cell.vertices(self.tol)
        v = len(verts)
        if v < 4:
            raise InvariantViolation(
                f"oversized cell with {v} vertices cannot be chorded")
        half = v // 2
        # prefer the most balanced vertex pairing, fall back toward less
        # balanced ones if a pairing is (near-)vertical
        for shift in range(half - 1):
            for delta in (shift, -shift) if shift else (0,):
                j = half + delta
                if j < 2 or j > v - 2:
                    continue
                for i in range(v):
                    p, q = verts[i], verts[(i + j) % v]
                    try:
                        chord = line_through(p, q, self.tol)
                    except GeometryError:
                        continue
                    if cell.crossed_by(chord.a, chord.b, self.tol):
                        return chord
        raise InvariantViolation("no usable chord found for oversized cell")

    # -- queries -----------------------------------------------------------

    def zone(self, line: Line):
        """Leaves whose cell interior the line crosses."""
        tol = self.tol
        # the carried interval only prunes; each leaf re-checks against its
        # full constraint set, which also covers a region-rooted tree
        out = []
        stack = [(0, -_INF, _INF)]
        while stack:
            nid, lo, hi = stack.pop()
            if self._kind[nid] == kernels.NODE_LEAF:
                cell = self._leaf_by_node[nid]
                if cell.crossed_by(line.a, line.b, tol):
                    out.append(cell)
                continue
            if self._kind[nid] == kernels.NODE_LINE:
                na, nb = self._na[nid], self._nb[nid]
                for side_up, child in ((True, self._above[nid]),
                                       (False, self._below[nid])):
                    nlo, nhi, coll = _halfplane_interval(
                        line.a, line.b, na, nb, side_up, lo, hi, tol)
                    if coll or not _wide_enough(nlo, nhi, tol):
                        continue
                    stack.append((child, nlo, nhi))
            else:
                x0 = self._na[nid]
                if x0 < hi:
                    stack.append((self._above[nid], max(lo, x0), hi))
                if x0 > lo:
                    stack.append((self._below[nid], lo, min(hi, x0)))
        out.sort(key=lambda c: c.node)
        return out

    # -- wedge counting ----------------------------------------------------

    def freeze(self):
        """Flat query snapshot: mirrors, DFS leaf ranges, and a point CSR."""
        if self._frozen is not None:
            return self._frozen
        n = len(self._kind)
        kind = np.array(self._kind, dtype=np.int8)
        na = np.array(self._na)
        nb = np.array(self._nb)
        anx = np.array(self._ax)
        any_ = np.array(self._ay)
        above = np.array(self._above, dtype=np.int64)
        below = np.array(self._below, dtype=np.int64)
        counts = np.zeros(n, dtype=np.int64)
        leaf_lo = np.zeros(n, dtype=np.int64)
        leaf_hi = np.zeros(n, dtype=np.int64)
        leaf_order = []
        # iterative post-order DFS
        stack = [(0, False)]
        while stack:
            nid, done = stack.pop()
            if kind[nid] == kernels.NODE_LEAF:
                leaf_lo[nid] = len(leaf_order)
                leaf_order.append(nid)
                leaf_hi[nid] = len(leaf_order)
                counts[nid] = self._leaf_by_node[nid].point_idx.shape[0]
                continue
            if not done:
                stack.append((nid, True))
                stack.append((below[nid], False))
                stack.append((above[nid], False))
            else:
                counts[nid] = counts[above[nid]] + counts[below[nid]]
                leaf_lo[nid] = min(leaf_lo[above[nid]], leaf_lo[below[nid]])
                leaf_hi[nid] = max(leaf_hi[above[nid]], leaf_hi[below[nid]])
        leaf_ptr = np.zeros(len(leaf_order) + 1, dtype=np.int64)
        tot = 0
        chunks = []
        for pos, nid in enumerate(leaf_order):
            idx = self._leaf_by_node[nid].point_idx
            tot += idx.shape[0]
            leaf_ptr[pos + 1] = tot
            chunks.append(idx)
        pt_id = (np.concatenate(chunks) if chunks
                 else np.empty(0, dtype=np.int64))
        if self.points is not None and pt_id.shape[0]:
            pt_x = self.points[pt_id, 0].copy()
            pt_y = self.points[pt_id, 1].copy()
        else:
            pt_x = np.empty(0)
            pt_y = np.empty(0)
        self._frozen = (kind, na, nb, anx, any_, above, below, counts,
                        leaf_lo, leaf_hi, leaf_ptr, pt_x, pt_y, pt_id)
        return self._frozen

    def total_points(self) -> int:
        return 0 if self.points is None else int(
            sum(c.point_idx.shape[0] for c in self._leaf_by_node.values()))

    def count_in_wedge(self, w: DoubleWedge) -> int:
        """Stored points inside the double wedge (boundary contact counts)."""
        if w.degenerate:
            return self.total_points()
        frozen = self.freeze()
        total, _ = kernels.wedge_query(frozen, w.upper.a, w.upper.b,
                                       w.lower.a, w.lower.b, report=False)
        return int(total)

    def report_in_wedge(self, w: DoubleWedge):
        """Ids of stored points inside the double wedge."""
        if w.degenerate:
            ids = [c.point_idx for c in self.leaves()]
            return np.sort(np.concatenate(ids)) if ids else np.empty(0, np.int64)
        frozen = self.freeze()
        _, ids = kernels.wedge_query(frozen, w.upper.a, w.upper.b,
                                     w.lower.a, w.lower.b, report=True)
        return np.sort(ids)

    # -- export ------------------------------------------------------------

    def to_json(self) -> dict:
        cells = []
        for cell in self.leaves():
            cells.append({
                "sides": cell.side_count(),
                "n_points": int(cell.point_idx.shape[0]),
                "crossing_weight": cell.crossing_weight(),
                "vertices": [[v.x, v.y] for v in cell.vertices(self.tol)],
            })
        return {
            "kind": self.kind.shape,
            "max_sides": self.kind.max_sides,
            "n_leaves": self.n_leaves,
            "cells": cells,
        }
