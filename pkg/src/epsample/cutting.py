"""Weighted (1/r)-cuttings by incremental splitting of overloaded cells.

A cutting partitions the plane into convex cells so that no cell's interior
is crossed by lines of total weight above total/r. Construction keeps a FIFO
worklist of violating leaves and splits each by its crossing line that comes
earliest in a weighted random permutation of the whole input.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from epsample import kernels
from epsample.arrangement import POLY8, ArrangementTree, CellKind, NoCrossing
from epsample.geom import (
    DEFAULT_TOL,
    GeometryError,
    InvariantViolation,
    Line,
    Tolerance,
    as_rng,
)


class NonPositiveWeight(GeometryError):
    """Weighted sampling needs every weight strictly positive."""


class InvalidR(GeometryError):
    """Cutting/partition parameters must exceed 1."""


@dataclass(frozen=True)
class WeightedLine:
    line: Line
    weight: float = 1.0

    def __post_init__(self):
        if not (self.weight > 0 and math.isfinite(self.weight)):
            raise NonPositiveWeight(f"weight {self.weight!r} must be > 0")


def permutation_ranks(weights, rng) -> np.ndarray:
    """rank[i] = position of item i in a weighted random permutation.

    Key for item i is u_i^(1/w_i) with u_i uniform, ordered descending, so
    heavier items tend to appear earlier; equal weights give a uniform
    shuffle. Comparing log(u)/w avoids the fractional powers.
    """
    w = np.asarray(weights, dtype=np.float64)
    if w.size == 0:
        return np.empty(0, dtype=np.int64)
    if not np.all(w > 0) or not np.all(np.isfinite(w)):
        raise NonPositiveWeight("all weights must be positive and finite")
    u = rng.random(w.shape[0])
    u = np.clip(u, np.finfo(np.float64).tiny, 1.0)
    keys = np.log(u) / w
    order = np.argsort(-keys, kind="stable")
    ranks = np.empty(w.shape[0], dtype=np.int64)
    ranks[order] = np.arange(w.shape[0])
    return ranks


def weighted_permutation(items, seed):
    """Items of (item, weight) pairs in weighted random order."""
    pairs = list(items)
    ranks = permutation_ranks([wt for _, wt in pairs], as_rng(seed))
    order = np.argsort(ranks)
    return [pairs[i][0] for i in order]


@dataclass
class Cutting:
    tree: ArrangementTree
    r: float
    total_weight: float
    n_lines: int

    @property
    def leaves(self) -> int:
        return self.tree.n_leaves

    @property
    def leaves_per_r2(self) -> float:
        return self.leaves / (self.r * self.r)

    @property
    def max_crossing_weight(self) -> float:
        return max(c.crossing_weight() for c in self.tree.leaves())

    def metrics(self) -> dict:
        return {
            "n_lines": self.n_lines,
            "r": self.r,
            "kind": self.tree.kind.shape,
            "max_sides": self.tree.kind.max_sides,
            "leaves": self.leaves,
            "leaves_per_r2": self.leaves_per_r2,
            "max_crossing_weight": self.max_crossing_weight,
        }


def _surviving_weight(cell, k, side_up, tol):
    """Total crossing weight landing in one child of a split by line k."""
    ids, la, lb, lo, hi, w = cell.cross
    ea = np.array([la[k]])
    eb = np.array([lb[k]])
    clo, chi = kernels.clip_intervals(la, lb, lo, hi, ea, eb,
                                      np.array([side_up]),
                                      cell.x_lo, cell.x_hi,
                                      tol.rel_tol, tol.abs_tol)
    width = chi - clo
    with np.errstate(invalid="ignore"):
        sep = np.maximum(tol.rel_tol * np.maximum(np.abs(clo), np.abs(chi)),
                         tol.abs_tol)
        alive = (chi > clo) & ((width > sep) | np.isinf(width))
    alive[k] = False
    return float(w[alive].sum())


def _pick_balanced(cell, ranks, tol):
    """Crossing line whose heavier child keeps the least crossing weight.

    Balance-seeking: both children end up light, so fewer follow-up splits.
    Costs a clip pass per candidate line; noticeably slower than rank order.
    Ties go to the earliest-permutation line to keep the build deterministic.
    """
    ids = cell.cross[0]
    best = 0
    best_key = (math.inf, math.inf)
    for k in range(ids.shape[0]):
        up_w = _surviving_weight(cell, k, True, tol)
        down_w = _surviving_weight(cell, k, False, tol)
        key = (max(up_w, down_w), ranks[ids[k]])
        if key < best_key:
            best_key = key
            best = k
    return best


def create_cutting(H, r, kind: CellKind = POLY8, seed=0, *,
                   prefer_balanced_split: bool = False, root_cell=None,
                   tol: Tolerance = DEFAULT_TOL) -> Cutting:
    """Build a (1/r)-cutting of weighted lines H.

    Every leaf of the result is crossed by total weight at most W/r where W
    is the total input weight. Same seed, same inputs: identical cutting.
    """
    if not r > 1:
        raise InvalidR(f"r must exceed 1, got {r}")
    H = list(H)
    if not H:
        raise GeometryError("cutting needs at least one line")
    rng = as_rng(seed)
    m = len(H)
    la = np.array([wl.line.a for wl in H])
    lb = np.array([wl.line.b for wl in H])
    w = np.array([wl.weight for wl in H])
    total = float(w.sum())
    threshold = total / r

    ranks = permutation_ranks(w, rng)
    tree = ArrangementTree(kind, root_cell=root_cell, tol=tol)
    root = tree.leaves()[0]
    tree.attach_crossings(root, np.arange(m, dtype=np.int64), la, lb, w)

    work = deque()
    if root.crossing_weight() > threshold:
        work.append(root)
    while work:
        cell = work.popleft()
        ids = cell.cross[0]
        if ids.shape[0] == 0:
            raise InvariantViolation("overloaded cell has no crossing lines")
        if prefer_balanced_split:
            k = _pick_balanced(cell, ranks, tol)
        else:
            k = int(np.argmin(ranks[ids]))
        line = Line(float(cell.cross[1][k]), float(cell.cross[2][k]))
        try:
            new_leaves = tree.split_leaf(cell, line)
        except NoCrossing as e:
            raise InvariantViolation(
                f"tracked crossing line failed to split its cell: {e}")
        for leaf in new_leaves:
            if leaf.crossing_weight() > threshold:
                work.append(leaf)
    return Cutting(tree=tree, r=float(r), total_weight=total, n_lines=m)
