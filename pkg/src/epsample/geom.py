"""Scalar geometry: points, lines, segments, wedges, duality.

Lines are slope/intercept only, so vertical lines are unrepresentable by
design; callers remove verticality up front (see ``rotate_points``). Side
tests on points are exact float comparisons with ties going to the closed
Above side. Tolerances enter only where two lines are compared for
parallelism/coincidence or a segment is classified against a line.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np


class GeometryError(Exception):
    """Base for everything raised out of this package."""


class DegenerateLine(GeometryError):
    """A construction needed a non-vertical line and could not get one."""


class InvariantViolation(GeometryError):
    """An internal structural guarantee failed; a bug, not bad input."""


@dataclass(frozen=True)
class Tolerance:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12

    def eq(self, u: float, v: float) -> bool:
        if not (math.isfinite(u) and math.isfinite(v)):
            return u == v
        return abs(u - v) <= max(self.rel_tol * max(abs(u), abs(v)), self.abs_tol)


def _tol_from_env() -> Tolerance:
    rel = float(os.environ.get("EPSAMPLE_REL_TOL", "1e-9"))
    abs_ = float(os.environ.get("EPSAMPLE_ABS_TOL", "1e-12"))
    return Tolerance(rel, abs_)


DEFAULT_TOL = _tol_from_env()


def approx_eq(u: float, v: float, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Symmetric relative/absolute comparison: |u-v| <= max(rel*max|.|, abs)."""
    return tol.eq(u, v)


def as_rng(seed) -> np.random.Generator:
    """Accept an int seed or a Generator; always hand back a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(f"non-finite point ({self.x}, {self.y})")


@dataclass(frozen=True)
class Line:
    """y = a*x + b."""

    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise DegenerateLine(f"non-finite line ({self.a}, {self.b})")

    def y_at(self, x: float) -> float:
        return self.a * x + self.b

    def above_closed(self, p: Point) -> bool:
        """True when p is on or above the line (the tie rule used everywhere)."""
        return p.y >= self.y_at(p.x)

    def above_open(self, p: Point) -> bool:
        return p.y > self.y_at(p.x)


def line_through(p: Point, q: Point, tol: Tolerance = DEFAULT_TOL) -> Line:
    """Line through two points; rejects (near-)vertical pairs."""
    if approx_eq(p.x, q.x, tol):
        raise DegenerateLine(f"points share x within tolerance: {p.x} vs {q.x}")
    a = (q.y - p.y) / (q.x - p.x)
    return Line(a, p.y - a * p.x)


def intersect_lines(l1: Line, l2: Line, tol: Tolerance = DEFAULT_TOL):
    """Intersection point, or None for (near-)parallel lines."""
    if approx_eq(l1.a, l2.a, tol):
        return None
    x = (l2.b - l1.b) / (l1.a - l2.a)
    return Point(x, l1.y_at(x))


class Side:
    ABOVE = "above"
    BELOW = "below"
    CROSSES = "crosses"


@dataclass(frozen=True)
class Segment:
    """A piece of a line restricted to [x_lo, x_hi]; infinities allowed."""

    line: Line
    x_lo: float = -math.inf
    x_hi: float = math.inf

    def __post_init__(self):
        if not self.x_lo <= self.x_hi:
            raise GeometryError(f"inverted extent [{self.x_lo}, {self.x_hi}]")

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.x_lo) and math.isfinite(self.x_hi)

    def endpoints(self):
        """Finite endpoints as Points; unbounded ends are None."""
        lo = Point(self.x_lo, self.line.y_at(self.x_lo)) if math.isfinite(self.x_lo) else None
        hi = Point(self.x_hi, self.line.y_at(self.x_hi)) if math.isfinite(self.x_hi) else None
        return lo, hi

    def _end_state(self, other: Line, x: float, sign_at_inf: int,
                   tol: Tolerance):
        # returns +1 above, -1 below, 0 on, comparing self.line to other at x
        if not math.isfinite(x):
            da = self.line.a - other.a
            if approx_eq(self.line.a, other.a, tol):
                if approx_eq(self.line.b, other.b, tol):
                    return 0
                return 1 if self.line.b > other.b else -1
            s = 1 if da > 0 else -1
            return s * sign_at_inf
        ys = self.line.y_at(x)
        yo = other.y_at(x)
        if approx_eq(ys, yo, tol):
            return 0
        return 1 if ys > yo else -1

    def classify(self, other: Line, closed: bool = True,
                 tol: Tolerance = DEFAULT_TOL) -> str:
        """Above / Below / Crosses relative to ``other``.

        Closed mode lets endpoint contact (or full collinearity) still count
        as Above/Below; open mode demands strict clearance at both ends, so a
        segment touching the line at an endpoint Crosses it.
        """
        s_lo = self._end_state(other, self.x_lo, -1, tol)
        s_hi = self._end_state(other, self.x_hi, +1, tol)
        if closed:
            if s_lo >= 0 and s_hi >= 0:
                return Side.ABOVE
            if s_lo <= 0 and s_hi <= 0:
                return Side.BELOW
            return Side.CROSSES
        if s_lo > 0 and s_hi > 0:
            return Side.ABOVE
        if s_lo < 0 and s_hi < 0:
            return Side.BELOW
        return Side.CROSSES


def segment_intersection(s: Segment, t: Segment, tol: Tolerance = DEFAULT_TOL):
    """Intersection point of two segments, or None.

    Parallel-within-tolerance pairs return None even when collinear and
    overlapping. The crossing must land in both x-extents (closed, with
    tolerance slack at the ends).
    """
    p = intersect_lines(s.line, t.line, tol)
    if p is None:
        return None
    for seg in (s, t):
        if p.x < seg.x_lo and not approx_eq(p.x, seg.x_lo, tol):
            return None
        if p.x > seg.x_hi and not approx_eq(p.x, seg.x_hi, tol):
            return None
    return p


# ---------------------------------------------------------------------------
# duality
#
# Fixed maps: point (a, b) -> line y = a*x - b, line y = c*x + d -> point
# (c, -d). Applying either map twice is the identity. Order transfers as:
# p strictly above l iff dualize_line(l) lies strictly above dualize_point(p),
# and a line g crosses a bounded segment s iff dualize_line(g) lies inside
# dualize_segment(s).


def dualize_point(p: Point) -> Line:
    return Line(p.x, -p.y)


def dualize_line(l: Line) -> Point:
    return Point(l.a, -l.b)


@dataclass(frozen=True)
class DoubleWedge:
    """Region between two lines through a common apex (both closed).

    A point q is inside when it does not lie strictly on the same side of
    both boundary lines. Coincident boundaries degenerate to the whole plane.
    """

    apex: Point
    upper: Line
    lower: Line

    def __post_init__(self):
        for l in (self.upper, self.lower):
            if not approx_eq(l.y_at(self.apex.x), self.apex.y, DEFAULT_TOL):
                raise GeometryError("wedge boundary misses the apex")

    @property
    def degenerate(self) -> bool:
        return (approx_eq(self.upper.a, self.lower.a, DEFAULT_TOL)
                and approx_eq(self.upper.b, self.lower.b, DEFAULT_TOL))

    def contains(self, q: Point) -> bool:
        if self.degenerate:
            return True
        d1 = q.y - self.upper.y_at(q.x)
        d2 = q.y - self.lower.y_at(q.x)
        return d1 * d2 <= 0.0


def dualize_segment(s: Segment) -> DoubleWedge:
    """Dual double wedge of a bounded segment.

    Lines crossing the segment map exactly to dual points inside the wedge.
    """
    if not s.bounded:
        raise DegenerateLine("only bounded segments have a dual double wedge")
    apex = dualize_line(s.line)
    e_lo, e_hi = s.endpoints()
    b1 = dualize_point(e_lo)
    b2 = dualize_point(e_hi)
    if b1.a > b2.a:
        b1, b2 = b2, b1
    return DoubleWedge(apex=apex, upper=b2, lower=b1)


# ---------------------------------------------------------------------------
# degeneracy-killing rotation


def rotation_angle(seed: int) -> float:
    """Small deterministic angle in [1e-4, 1e-3) radians derived from seed."""
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 0x9E3779B9]))
    return float(rng.uniform(1e-4, 1e-3))


def rotate_points(pts: np.ndarray, angle: float) -> np.ndarray:
    """Rotate an (n, 2) array about the origin.

    Applied once at ingestion so duplicate x-coordinates and exactly vertical
    alignments have measure zero afterward; all later constructions assume it.
    """
    pts = np.asarray(pts, dtype=np.float64)
    c, s = math.cos(angle), math.sin(angle)
    rot = np.array([[c, -s], [s, c]])
    return pts @ rot.T
