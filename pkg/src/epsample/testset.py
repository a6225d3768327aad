"""Test-set generators: weighted line families that probe a partition.

Three constructions of roughly O(r log^2 n) or O(r) lines. The dual method
also keeps its internal dual-space cutting tree, with the cutting vertices
stored as points (point id = test-line index), so callers can count test
lines crossing a segment with one wedge query.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from epsample.arrangement import POLY_UNCAPPED, ArrangementTree
from epsample.cutting import WeightedLine, create_cutting
from epsample.geom import (
    DEFAULT_TOL,
    DegenerateLine,
    GeometryError,
    Point,
    approx_eq,
    as_rng,
    dualize_point,
    intersect_lines,
    line_through,
)


class TooFewPoints(GeometryError):
    """The construction needs more input points than it was given."""


@dataclass
class TestSet:
    lines: list
    method: str  # "lines" | "points" | "dual"
    r: float
    tree: ArrangementTree | None = None
    _arrays: tuple | None = field(default=None, repr=False)

    def __len__(self):
        return len(self.lines)

    def line_arrays(self):
        """(a, b, weight) float arrays over the test lines."""
        if self._arrays is None:
            self._arrays = (
                np.array([wl.line.a for wl in self.lines]),
                np.array([wl.line.b for wl in self.lines]),
                np.array([wl.weight for wl in self.lines]),
            )
        return self._arrays


def _check_points(X):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != 2:
        raise GeometryError("points must be an (n, 2) array")
    if X.shape[0] < 2:
        raise TooFewPoints(f"need at least 2 points, got {X.shape[0]}")
    return X


def _dx_floor(X) -> float:
    span = float(X[:, 0].max() - X[:, 0].min())
    return 1e-7 * span if span > 0 else 1e-12


def test_set_lines(X, r, seed=0, c=1.0) -> TestSet:
    """~c * r * ln^2 n lines, each through a random pair of input points."""
    X = _check_points(X)
    n = X.shape[0]
    rng = as_rng(seed)
    m = max(1, math.ceil(c * r * math.log(n) ** 2))
    floor = _dx_floor(X)
    out = []
    attempts = 0
    while len(out) < m:
        attempts += 1
        if attempts > 100 * m + 1000:
            raise DegenerateLine("could not sample enough non-vertical pairs")
        i, j = rng.integers(0, n, size=2)
        if i == j or abs(X[i, 0] - X[j, 0]) <= floor:
            continue
        out.append(WeightedLine(line_through(Point(*X[i]), Point(*X[j]))))
    return TestSet(lines=out, method="lines", r=float(r))


def _distinct_x_sample(X, s, rng, retries=50):
    floor = _dx_floor(X)
    pool = np.arange(X.shape[0])
    for _ in range(2):
        for _ in range(retries):
            idx = rng.choice(pool, size=s, replace=False)
            xs = np.sort(X[idx, 0])
            if s < 2 or np.min(np.diff(xs)) > floor:
                return idx
        # Duplicate-heavy input: retry over one point per distinct x.
        _, first = np.unique(X[pool, 0], return_index=True)
        pool = pool[first]
        if pool.shape[0] < s:
            break
    raise DegenerateLine("sampled points keep colliding in x")


def test_set_points(X, r, seed=0, c=1.0) -> TestSet:
    """All spanning lines of a ~c * sqrt(r) * ln n point subsample."""
    X = _check_points(X)
    n = X.shape[0]
    rng = as_rng(seed)
    s = max(2, math.ceil(c * math.sqrt(r) * math.log(n)))
    s = min(s, n)
    idx = _distinct_x_sample(X, s, rng)
    out = []
    for a in range(s):
        for b in range(a + 1, s):
            out.append(WeightedLine(
                line_through(Point(*X[idx[a]]), Point(*X[idx[b]]))))
    return TestSet(lines=out, method="points", r=float(r))


def test_set_dual(X, r, seed=0, c=1.0) -> TestSet:
    """Duals of the cell vertices of a dual-space cutting; size ~O(r).

    Samples ~c * sqrt(r) * ln r points, dualizes them to lines, cuts that
    arrangement at 1/ceil(sqrt(r)), and returns the dual of every finite
    cell vertex. Uncapped polygon cells keep every vertex on two sampled
    duals. The cutting tree is retained with the vertices inserted as its
    points for fast crossing counts in dual space.
    """
    X = _check_points(X)
    n = X.shape[0]
    rng = as_rng(seed)
    s = max(2, math.ceil(c * math.sqrt(r) * math.log(max(r, 2.0))))
    s = min(s, n)
    idx = _distinct_x_sample(X, s, rng)
    duals = [WeightedLine(dualize_point(Point(*X[i]))) for i in idx]
    r_cut = max(2, math.ceil(math.sqrt(r)))
    cutting = create_cutting(duals, r_cut, POLY_UNCAPPED, rng)

    tol = DEFAULT_TOL
    verts = []
    for cell in cutting.tree.leaves():
        verts.extend((v.x, v.y) for v in cell.vertices(tol))
    verts.sort()
    kept = []
    for x, y in verts:
        if kept and approx_eq(kept[-1][0], x, tol) and \
                approx_eq(kept[-1][1], y, tol):
            continue
        kept.append((x, y))
    # a true vertex lies on at least two of the sampled duals
    lines = []
    coords = []
    for x, y in kept:
        hits = sum(1 for wl in duals if approx_eq(wl.line.y_at(x), y, tol))
        if hits >= 2:
            lines.append(WeightedLine(dualize_point(Point(x, y))))
            coords.append((x, y))
    if not lines:
        # tiny samples can finish cutting before any cell gains a finite
        # vertex; fall back to the pairwise meets of the sampled duals
        for a in range(len(duals)):
            for b in range(a + 1, len(duals)):
                p = intersect_lines(duals[a].line, duals[b].line, tol)
                if p is None:
                    continue
                if any(approx_eq(cx, p.x, tol) and approx_eq(cy, p.y, tol)
                       for cx, cy in coords):
                    continue
                lines.append(WeightedLine(dualize_point(p)))
                coords.append((p.x, p.y))
    if not lines:
        raise TooFewPoints("sampled duals are parallel; no test lines")
    cutting.tree.insert_points(np.array(coords))
    return TestSet(lines=lines, method="dual", r=float(r),
                   tree=cutting.tree)
