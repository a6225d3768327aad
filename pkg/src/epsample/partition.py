"""Partitions of planar point sets with low halfplane crossing number.

Two constructions. The weight-doubling build carves one light cell at a
time out of a cutting of a test set, doubling the weight of test lines
that cross each emitted cell so later cuttings steer around crowded
directions. The level build refines every oversized cell at once against
a single dual-construction test set with multiplicative reweighting, in
either an exact ("simple") or a sampled flavor.

Both return cells that hold at most 2n/t points each and whose point
lists exactly partition the input. Regions are nested convex cells, so a
query line's crossing number can be read off by direct containment
tests; ``crossing_profile`` does that for a batch of probe lines.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .arrangement import (
    POLY_UNCAPPED,
    ArrangementTree,
    NoCrossing,
    _wide_enough,
)
from .cutting import WeightedLine, create_cutting, permutation_ranks
from .geom import (
    DEFAULT_TOL,
    DegenerateLine,
    GeometryError,
    Line,
    Tolerance,
    as_rng,
    dualize_segment,
)
from .testset import test_set_dual, test_set_lines, test_set_points

# Slope of the near-vertical cuts used for shrinking and median halving.
STEEP_SLOPE = 1.0e6


class InvalidT(GeometryError):
    """Cell-count target outside 2 <= t <= n."""


@dataclass(frozen=True)
class MatParams:
    """Knobs for the weight-doubling build.

    b is the emission precision: each round extracts about 1/b of the
    current points, and the remainder recursion halves it. late_refiner,
    when set, replaces the standard recursion on emitted cells; it gets
    (points, ids, region, b_eff) and must return finished (region, ids)
    pairs. Default off.
    """

    b: int = 16
    test_set_method: str = "dual"
    late_refiner: object = None

    def __post_init__(self):
        if self.b < 4:
            raise GeometryError(f"b must be at least 4, got {self.b}")
        if self.test_set_method not in ("lines", "points", "dual"):
            raise GeometryError(
                f"unknown test set method {self.test_set_method!r}")


@dataclass(frozen=True)
class ChanParams:
    """Knobs for the level build.

    simple=True disables sampling entirely (p = q = 1, the whole test set
    feeds every cutting). Otherwise p and q default to the standard
    budget-balancing formulas and explicit values override them.
    """

    b: int = 22
    p: float | None = None
    q: float | None = None
    simple: bool = False

    def __post_init__(self):
        if self.b < 4:
            raise GeometryError(f"b must be at least 4, got {self.b}")
        if self.simple:
            object.__setattr__(self, "p", 1.0)
            object.__setattr__(self, "q", 1.0)
        for name in ("p", "q"):
            v = getattr(self, name)
            if v is not None and not (0.0 < v <= 1.0):
                raise GeometryError(f"{name} must lie in (0, 1], got {v}")


@dataclass
class Partition:
    """A partition of points into cells with convex regions.

    cells holds (region, ids) pairs; ids index into the original input
    array and the lists are disjoint with union {0..n-1}. points keeps a
    reference to that array so downstream samplers can resolve ids.
    stats carries build metadata ("seconds", plus "max_crossing" once a
    profile has been run).
    """

    cells: list
    t: int
    method: str
    n: int
    stats: dict = field(default_factory=dict)
    points: np.ndarray | None = None

    def __len__(self):
        return len(self.cells)

    def sizes(self) -> np.ndarray:
        return np.array([ids.shape[0] for _, ids in self.cells], dtype=np.int64)

    def point_cover(self) -> np.ndarray:
        """All point ids across cells, sorted. Equals arange(n) when valid."""
        if not self.cells:
            return np.empty(0, dtype=np.int64)
        return np.sort(np.concatenate([ids for _, ids in self.cells]))

    def max_cell_size(self) -> int:
        return int(self.sizes().max(initial=0))

    def to_json(self) -> dict:
        """Plain-data form: regions as vertex lists, points as id lists.

        Unbounded regions serialize their finite vertices only; the point
        lists are the authoritative content. Timing stays out so equal
        builds serialize identically.
        """
        return {
            "method": self.method,
            "t": self.t,
            "n": self.n,
            "n_cells": len(self.cells),
            "max_cell_size": self.max_cell_size(),
            "max_crossing": self.stats.get("max_crossing"),
            "cells": [
                {
                    "vertices": [[float(v.x), float(v.y)]
                                 for v in region.vertices()],
                    "points": [int(i) for i in ids],
                }
                for region, ids in self.cells
            ],
        }


_TEST_SET_BUILDERS = {
    "lines": test_set_lines,
    "points": test_set_points,
    "dual": test_set_dual,
}


def _check_partition_input(X, t):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != 2:
        raise GeometryError("points must be an (n, 2) array")
    if not np.isfinite(X).all():
        raise GeometryError("points must be finite")
    if t < 2 or t > X.shape[0]:
        raise InvalidT(f"need 2 <= t <= n, got t={t}, n={X.shape[0]}")
    return X


def _order_by_cut(X, ids, steep):
    """Sort ids by position along a cut direction, ties by id.

    Steep cuts order by kappa = x - y/A (increasing kappa = moving right),
    shallow cuts by y. Returns (order over ids, key values in that order).
    """
    pts = X[ids]
    if steep:
        key = pts[:, 0] - pts[:, 1] / STEEP_SLOPE
    else:
        key = pts[:, 1]
    order = np.lexsort((ids, key))
    return order, key[order]


def _cut_line(steep, c):
    if steep:
        # kappa <= c <=> y >= A x - A c, so the kept side is "above".
        return Line(STEEP_SLOPE, -STEEP_SLOPE * c)
    return Line(0.0, c)


def _cut_value(vals, k):
    """Threshold between vals[k-1] and vals[k] (vals ascending)."""
    left, right = vals[k - 1], vals[k]
    if right > left:
        return 0.5 * (left + right), False
    return left, True


def _split_region(tree, cell, line):
    """Split a leaf region into (above, below) halves.

    Uncapped polygon splits always return exactly the upper and lower
    piece, in that order. Point lists are authoritative; when the cut
    misses the cell (through a corner, degenerate sliver) both halves
    keep the parent region and only the lists divide.
    """
    try:
        up, down = tree.split_leaf(cell, line)
    except NoCrossing:
        return cell, cell
    return up, down


def _halve_to_limit(X, ids, region, limit, depth, out, tol):
    """Median halving cuts, alternating steep/shallow, down to <= limit."""
    m = ids.shape[0]
    if m <= limit or m <= 1:
        out.append((region, ids))
        return
    steep = depth % 2 == 0
    order, vals = _order_by_cut(X, ids, steep)
    k = m // 2
    c, tied = _cut_value(vals, k)
    first, rest = ids[order[:k]], ids[order[k:]]
    tree = ArrangementTree(POLY_UNCAPPED, root_cell=region, tol=tol)
    above, below = _split_region(tree, tree.leaves()[0], _cut_line(steep, c))
    if steep:
        # Smaller kappa lies above the steep cut.
        pairs = ((above, first), (below, rest))
    else:
        pairs = ((below, first), (above, rest))
    for reg, part in pairs:
        _halve_to_limit(X, part, reg, limit, depth + 1, out, tol)


def _crossing_line_ids(cell, la, lb, tol):
    """Indices of lines y = la x + lb whose interior chord in cell is real."""
    lo0 = np.full(la.shape, -np.inf)
    hi0 = np.full(la.shape, np.inf)
    ea, eb, eup, xlo, xhi = cell.constraint_arrays()
    lo, hi = kernels.clip_intervals(la, lb, lo0, hi0, ea, eb, eup, xlo, xhi,
                                    tol.rel_tol, tol.abs_tol)
    width = hi - lo
    with np.errstate(invalid="ignore"):
        sep = np.maximum(tol.rel_tol * np.maximum(np.abs(lo), np.abs(hi)),
                         tol.abs_tol)
        alive = (hi > lo) & ((width > sep) | np.isinf(width))
    return np.flatnonzero(alive)


def _crossing_ids_dual(cell, ts, la, lb, tol):
    """Test-line indices crossing the cell, via wedge queries on the dual
    tree. Returns None when the cell has an unbounded edge (caller falls
    back to direct clipping).

    The wedge query is closed, so it also reports lines that only touch
    the boundary -- in particular every line collinear with a cell edge,
    common here because cells are carved out by test lines. A direct clip
    over just the candidates restores the open-interior rule exactly.
    """
    segs = cell.boundary_segments()
    found = set()
    for s in segs:
        if not s.bounded:
            return None
        found.update(ts.tree.report_in_wedge(dualize_segment(s)).tolist())
    cand = np.array(sorted(found), dtype=np.int64)
    if cand.size == 0:
        return cand
    return cand[_crossing_line_ids(cell, la[cand], lb[cand], tol)]


# ---------------------------------------------------------------------------
# Weight-doubling build


def partition_mat(X, t, params: MatParams | None = None, seed=0,
                  tol: Tolerance = DEFAULT_TOL) -> Partition:
    """Partition X into ~t cells, each under n/t points, with cuttings of
    a weight-doubled test set steering cell shapes away from any single
    direction of lines.

    Rounds extract the heaviest cutting cell, shrunk by a steep cut to
    exactly floor(m/b) points; the weight of every test line crossing the
    emitted region doubles before the next cutting. Once half the points
    are emitted, the emitted cells are refined at the same precision and
    the remainder restarts at precision b/2 (finishing with plain median
    halving below b = 4).
    """
    params = params or MatParams()
    X = _check_partition_input(X, t)
    rng = as_rng(seed)
    n = X.shape[0]
    final_thr = n / t
    limit = math.ceil(final_thr) - 1  # largest size allowed to finish
    builder = _TEST_SET_BUILDERS[params.test_set_method]
    t0 = time.perf_counter()
    out = []

    def worker(ids, region, b_eff):
        m = ids.shape[0]
        if m <= limit or m <= 1:
            out.append((region, ids))
            return
        target = int(m // b_eff)
        if b_eff < 4 or target < 2:
            # Low precision, or emissions would dribble out one point at a
            # time as steep slivers. Balanced halving finishes the job in
            # log(m/limit) fat cuts instead.
            _halve_to_limit(X, ids, region, limit, 0, out, tol)
            return
        try:
            ts = builder(X[ids], r=b_eff, seed=rng)
        except DegenerateLine:
            ts = None
        if ts is None or len(ts) == 0:
            # Too degenerate for a test set (duplicate piles): index-tied
            # median halving still partitions correctly.
            _halve_to_limit(X, ids, region, limit, 0, out, tol)
            return
        la, lb, _ = ts.line_arrays()
        weights = np.ones(len(ts))
        rem = ids
        emitted = []
        rounds = 0
        while rem.shape[0] >= m / 2 and rem.shape[0] > target \
                and rounds < 4 * b_eff:
            rounds += 1
            H = [WeightedLine(Line(float(a), float(b)), float(w))
                 for a, b, w in zip(la, lb, weights)]
            cutting = create_cutting(H, max(2.0, math.sqrt(b_eff)),
                                     POLY_UNCAPPED, rng, root_cell=region,
                                     tol=tol)
            cutting.tree.insert_points(X[rem])
            heavy = max(cutting.tree.leaves(),
                        key=lambda c: c.point_idx.shape[0])
            cell_ids = rem[heavy.point_idx]
            if cell_ids.shape[0] > target:
                region_cell, cell_ids = _shrink_cell(
                    X, cutting.tree, heavy, cell_ids, target, tol)
            else:
                region_cell = heavy
            emitted.append((region_cell, cell_ids))
            crossing = _crossing_line_ids(region_cell, la, lb, tol)
            weights[crossing] *= 2.0
            rem = rem[~np.isin(rem, cell_ids)]
        for region_cell, cell_ids in emitted:
            if params.late_refiner is not None:
                out.extend(params.late_refiner(X, cell_ids, region_cell, b_eff))
            else:
                worker(cell_ids, region_cell, b_eff)
        if rem.shape[0]:
            worker(rem, region, b_eff / 2)

    root = ArrangementTree(POLY_UNCAPPED, tol=tol).leaves()[0]
    worker(np.arange(n, dtype=np.int64), root, float(params.b))
    part = Partition(out, t, "mat", n,
                     {"seconds": time.perf_counter() - t0,
                      "max_crossing": None}, points=X)
    _check_partition(part, n)
    return part


def _shrink_cell(X, tree, cell, ids, target, tol):
    """Steep-cut a heavy leaf so exactly target points survive.

    The kept side is the closed upper halfplane (small kappa); exact
    kappa ties keep the cut at the tied value and trim the kept list to
    target by (kappa, id), so the count is exact even then.
    """
    order, vals = _order_by_cut(X, ids, True)
    c, _ = _cut_value(vals, target)
    kept_ids = ids[order[:target]]
    above, _ = _split_region(tree, cell, _cut_line(True, c))
    return above, kept_ids


def _check_partition(part, n):
    cover = part.point_cover()
    if cover.shape[0] != n or not np.array_equal(cover, np.arange(n)):
        raise GeometryError("cell point lists do not partition the input")


# ---------------------------------------------------------------------------
# Level build


def partition_chan(X, t, params: ChanParams | None = None, seed=0,
                   tol: Tolerance = DEFAULT_TOL) -> Partition:
    """Partition X into ~t cells by levels of simultaneous refinement.

    One dual-construction test set is built up front; its tree doubles as
    a wedge-query index, so the lines crossing a new cell can be reported
    by querying each boundary edge's dual wedge. Each level splits every
    cell above n/t points with a cutting of (a weighted sample of) the
    test set, then bumps the weight of crossing lines on a sampled subset
    of the new cells. simple mode skips both sampling steps.
    """
    params = params or ChanParams()
    X = _check_partition_input(X, t)
    rng = as_rng(seed)
    n = X.shape[0]
    b = params.b
    method = "chan-simple" if params.simple else "chan"
    t0 = time.perf_counter()

    try:
        ts = test_set_dual(X, r=t, seed=rng)
    except DegenerateLine:
        ts = None
    if ts is not None and len(ts):
        la, lb, _ = ts.line_arrays()
        n_lines = len(ts)
    else:
        # Degenerate input; levels fall back to pure median halving.
        ts, la, lb, n_lines = None, np.empty(0), np.empty(0), 0
    weights = np.ones(n_lines)
    log_n = math.log(max(n, 3))

    root = ArrangementTree(POLY_UNCAPPED, tol=tol).leaves()[0]
    cells = [(root, np.arange(n, dtype=np.int64))]
    c_hat_sum, c_hat_cnt = 8.0, 1  # running mean of observed leaves/r^2

    while True:
        active = [i for i, (_, ids) in enumerate(cells)
                  if ids.shape[0] > n / t]
        if not active:
            break
        weights[:] = 1.0
        rng.shuffle(active)
        active_set = set(active)
        new_cells = []
        done = [cells[i] for i in range(len(cells)) if i not in active_set]
        for i in active:
            region, ids = cells[i]
            m_i = ids.shape[0]
            if params.simple or n_lines == 0:
                cut_lines = [WeightedLine(Line(float(a), float(bb)), float(w))
                             for a, bb, w in zip(la, lb, weights)]
            else:
                q = params.q if params.q is not None else \
                    min(1.0, math.sqrt(b * m_i) / n)
                kq = max(1, math.ceil(q * n_lines))
                ranks = permutation_ranks(weights, rng)
                chosen = np.flatnonzero(ranks < kq)
                cut_lines = [WeightedLine(Line(float(la[j]), float(lb[j])))
                             for j in chosen]
            limit = max(math.ceil(m_i / b), int(n // t))
            pieces = []
            if cut_lines:
                c_hat = c_hat_sum / c_hat_cnt
                r_i = max(2, int(math.sqrt(b / (4.0 * c_hat))))
                cutting = create_cutting(cut_lines, r_i, POLY_UNCAPPED, rng,
                                         root_cell=region, tol=tol)
                c_hat_sum += cutting.leaves_per_r2
                c_hat_cnt += 1
                cutting.tree.insert_points(X[ids])
                for leaf in cutting.tree.leaves():
                    _halve_to_limit(X, ids[leaf.point_idx], leaf, limit, 0,
                                    pieces, tol)
            else:
                _halve_to_limit(X, ids, region, limit, 0, pieces, tol)
            if ts is not None:
                p = params.p if params.p is not None else \
                    min(1.0, math.sqrt(b / m_i) * log_n)
                for reg, pids in pieces:
                    if pids.shape[0] and rng.random() < p:
                        hit = _crossing_ids_dual(reg, ts, la, lb, tol)
                        if hit is None:
                            hit = _crossing_line_ids(reg, la, lb, tol)
                        weights[hit] *= 1.0 + 1.0 / b
            new_cells.extend(pieces)
        cells = done + new_cells

    cells = [(reg, ids) for reg, ids in cells if ids.shape[0]]
    part = Partition(cells, t, method, n,
                     {"seconds": time.perf_counter() - t0,
                      "max_crossing": None}, points=X)
    _check_partition(part, n)
    return part


def crossing_profile(part: Partition, probes,
                     tol: Tolerance = DEFAULT_TOL):
    """(max, mean, histogram) of per-probe counts of crossed cells.

    A probe crosses a cell when it meets the region's interior without
    lying entirely inside it: a region that contains the whole probe is
    not split by it and does not count. The histogram is indexed by
    crossing count.
    """
    if not probes:
        return 0, 0.0, np.zeros(0, dtype=np.int64)
    counts = np.zeros(len(probes), dtype=np.int64)
    for k, line in enumerate(probes):
        c = 0
        for region, _ in part.cells:
            lo, hi = region.line_interval(line.a, line.b, tol)
            if math.isinf(lo) and math.isinf(hi):
                continue
            if _wide_enough(lo, hi, tol):
                c += 1
        counts[k] = c
    hist = np.bincount(counts)
    mx = int(counts.max())
    part.stats["max_crossing"] = max(part.stats.get("max_crossing") or 0, mx)
    return mx, float(counts.mean()), hist
