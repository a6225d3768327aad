"""Partition trees built from approximate ham-sandwich cuts.

A ham-sandwich cut is a single line that bisects two point sets at once.
Instead of the exact linear-time construction we pick the best line
through a pair of sampled points: sample t points from the union, try
all C(t, 2) spanning lines, keep the one whose worse half is closest to
an even split. Cheap, seed-deterministic, and good cuts in practice.

Two trees use these cuts. The four-way tree halves a set with a median
vertical cut and then bisects both halves with one ham cut, recursing on
the four quadrant sets. The paired tree keeps sets in pairs: after one
initial vertical pairing every level cuts a pair jointly, and each set's
two halves form a pair of the next level, so no further vertical cuts
are needed. Both emit the same Partition shape as the cutting-based
builds, with regions maintained as nested convex cells.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .arrangement import POLY_UNCAPPED, ArrangementTree
from .geom import (
    DEFAULT_TOL,
    DegenerateLine,
    GeometryError,
    Line,
    Tolerance,
    as_rng,
)
from .partition import (
    Partition,
    _cut_line,
    _cut_value,
    _halve_to_limit,
    _order_by_cut,
    _split_region,
)
from .testset import TooFewPoints

DEFAULT_HAM_T = 11

# Candidate scoring walks the full input per candidate line; chunking
# keeps the boolean matrix small at large n.
_SCORE_CHUNK = 128


@dataclass(frozen=True)
class HamCut:
    """A cut line with its realized imbalance.

    imbalance is max over the two sets of 2*|fraction above - 1/2|,
    counted against the full sets (not the sample), closed rule
    y >= a x + b. 0 is a perfect bisection of both, 1 leaves some set
    entirely on one side.
    """

    line: Line
    imbalance: float


def _above_mask(P: np.ndarray, line: Line) -> np.ndarray:
    """Closed above-side test, the one rule used for scoring and splits."""
    return P[:, 1] >= line.a * P[:, 0] + line.b


def _candidate_lines(S, tol):
    """Slopes/intercepts of lines through all sample pairs, in pair order.

    Pairs whose endpoints (nearly) share an x cannot be represented and
    are dropped; the surviving candidate order still follows (i, j)
    lexicographically so index tie-breaks are reproducible.
    """
    i, j = np.triu_indices(S.shape[0], k=1)
    xi, xj = S[i, 0], S[j, 0]
    dx = xj - xi
    sep = np.maximum(tol.rel_tol * np.maximum(np.abs(xi), np.abs(xj)),
                     tol.abs_tol)
    ok = np.abs(dx) > sep
    i, j, dx = i[ok], j[ok], dx[ok]
    a = (S[j, 1] - S[i, 1]) / dx
    b = S[i, 1] - a * S[i, 0]
    return a, b


def approx_ham_sandwich(A, B, t: int = DEFAULT_HAM_T, seed=None,
                        tol: Tolerance = DEFAULT_TOL) -> HamCut:
    """Best simultaneous bisector of A and B among sampled spanning lines.

    Samples t points from the union of both sets, scores every line
    through a sampled pair by the worse of its two imbalances, and
    returns the minimizer (first candidate wins ties). The recorded
    imbalance comes from counting the actual sets against the chosen
    line.
    """
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    for P in (A, B):
        if P.ndim != 2 or P.shape[1] != 2:
            raise GeometryError("point sets must be (n, 2) arrays")
        if not np.isfinite(P).all():
            raise GeometryError("point sets must be finite")
    if A.shape[0] < 1 or B.shape[0] < 1:
        raise TooFewPoints("both sets need at least one point")
    if t < 2:
        raise TooFewPoints(f"need t >= 2 sample points, got {t}")
    rng = as_rng(seed)
    pool = np.vstack((A, B))
    s = min(int(t), pool.shape[0])
    for _ in range(8):
        S = pool[rng.choice(pool.shape[0], size=s, replace=False)]
        a, b = _candidate_lines(S, tol)
        if a.shape[0]:
            break
    else:
        raise DegenerateLine("no spanning line: sampled pairs share x")

    best_score = math.inf
    best = 0
    for c0 in range(0, a.shape[0], _SCORE_CHUNK):
        ac = a[c0:c0 + _SCORE_CHUNK, None]
        bc = b[c0:c0 + _SCORE_CHUNK, None]
        fa = (A[None, :, 1] >= ac * A[None, :, 0] + bc).mean(axis=1)
        fb = (B[None, :, 1] >= ac * B[None, :, 0] + bc).mean(axis=1)
        score = 2.0 * np.maximum(np.abs(fa - 0.5), np.abs(fb - 0.5))
        k = int(np.argmin(score))
        if score[k] < best_score:
            best_score = float(score[k])
            best = c0 + k
    return HamCut(Line(float(a[best]), float(b[best])), best_score)


def _check_points(X):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != 2:
        raise GeometryError("points must be an (n, 2) array")
    if not np.isfinite(X).all():
        raise GeometryError("points must be finite")
    if X.shape[0] < 1:
        raise TooFewPoints("need at least one point")
    return X


def _median_split(X, ids, region, tol):
    """Steep median cut: (left ids, left region, right ids, right region)."""
    m = ids.shape[0]
    order, vals = _order_by_cut(X, ids, True)
    k = m // 2
    c, _ = _cut_value(vals, k)
    tree = ArrangementTree(POLY_UNCAPPED, root_cell=region, tol=tol)
    above, below = _split_region(tree, tree.leaves()[0], _cut_line(True, c))
    # Smaller kappa (the left half) lies above a steep cut.
    return ids[order[:k]], above, ids[order[k:]], below


def _ham_split(X, ids, region, cut, tol):
    """Split one side's ids and region by a ham cut line."""
    up = _above_mask(X[ids], cut.line)
    tree = ArrangementTree(POLY_UNCAPPED, root_cell=region, tol=tol)
    above, below = _split_region(tree, tree.leaves()[0], cut.line)
    return ids[up], above, ids[~up], below


def ham_tree(X, leaf_size: int, t: int = DEFAULT_HAM_T, seed=0,
             tol: Tolerance = DEFAULT_TOL) -> Partition:
    """Four-way partition tree: vertical median cut, then one ham cut
    bisecting both halves, recursing until cells hold <= leaf_size
    points.

    The median cut guarantees progress no matter how lopsided the ham
    cut lands, so every input terminates; duplicate piles that defeat
    the candidate sampling fall back to plain median halving.
    """
    X = _check_points(X)
    if leaf_size < 1:
        raise GeometryError(f"leaf_size must be >= 1, got {leaf_size}")
    if t < 2:
        raise TooFewPoints(f"need t >= 2 sample points, got {t}")
    rng = as_rng(seed)
    n = X.shape[0]
    t0 = time.perf_counter()
    out = []
    imbalances = []

    def recurse(ids, region):
        if ids.shape[0] <= leaf_size:
            out.append((region, ids))
            return
        l_ids, l_reg, r_ids, r_reg = _median_split(X, ids, region, tol)
        try:
            cut = approx_ham_sandwich(X[l_ids], X[r_ids], t, rng, tol)
        except DegenerateLine:
            _halve_to_limit(X, ids, region, leaf_size, 0, out, tol)
            return
        imbalances.append(cut.imbalance)
        lu, lu_reg, ld, ld_reg = _ham_split(X, l_ids, l_reg, cut, tol)
        ru, ru_reg, rd, rd_reg = _ham_split(X, r_ids, r_reg, cut, tol)
        for part, reg in ((lu, lu_reg), (ld, ld_reg),
                          (ru, ru_reg), (rd, rd_reg)):
            if part.shape[0]:
                recurse(part, reg)

    root = ArrangementTree(POLY_UNCAPPED, tol=tol).leaves()[0]
    recurse(np.arange(n, dtype=np.int64), root)
    return _finish(X, out, n, leaf_size, "ham", t, imbalances, t0)


def double_ham_tree(X, leaf_size: int, t: int = DEFAULT_HAM_T, seed=0,
                    tol: Tolerance = DEFAULT_TOL) -> Partition:
    """Paired partition tree: one vertical median cut pairs the input,
    then every level bisects a pair of sets with a single ham cut; each
    set's two halves, separated by that cut, form a pair of the next
    level. No vertical cuts after the first.

    A cut that leaves a set whole pairs it with an empty sibling, and
    that pair drops to median halving, so every input terminates; pairs
    whose larger set fits in a leaf emit both sides.
    """
    X = _check_points(X)
    if leaf_size < 1:
        raise GeometryError(f"leaf_size must be >= 1, got {leaf_size}")
    if t < 2:
        raise TooFewPoints(f"need t >= 2 sample points, got {t}")
    rng = as_rng(seed)
    n = X.shape[0]
    t0 = time.perf_counter()
    out = []
    imbalances = []

    def halve(ids, region):
        if ids.shape[0]:
            _halve_to_limit(X, ids, region, leaf_size, 0, out, tol)

    def recurse(a_ids, a_reg, b_ids, b_reg):
        if max(a_ids.shape[0], b_ids.shape[0]) <= leaf_size:
            for part, reg in ((a_ids, a_reg), (b_ids, b_reg)):
                if part.shape[0]:
                    out.append((reg, part))
            return
        if min(a_ids.shape[0], b_ids.shape[0]) == 0:
            halve(a_ids, a_reg)
            halve(b_ids, b_reg)
            return
        try:
            cut = approx_ham_sandwich(X[a_ids], X[b_ids], t, rng, tol)
        except DegenerateLine:
            halve(a_ids, a_reg)
            halve(b_ids, b_reg)
            return
        imbalances.append(cut.imbalance)
        au, au_reg, ad, ad_reg = _ham_split(X, a_ids, a_reg, cut, tol)
        bu, bu_reg, bd, bd_reg = _ham_split(X, b_ids, b_reg, cut, tol)
        recurse(au, au_reg, ad, ad_reg)
        recurse(bu, bu_reg, bd, bd_reg)

    root = ArrangementTree(POLY_UNCAPPED, tol=tol).leaves()[0]
    all_ids = np.arange(n, dtype=np.int64)
    if n <= leaf_size:
        out.append((root, all_ids))
    else:
        l_ids, l_reg, r_ids, r_reg = _median_split(X, all_ids, root, tol)
        recurse(l_ids, l_reg, r_ids, r_reg)
    return _finish(X, out, n, leaf_size, "double-ham", t, imbalances, t0)


def _finish(X, out, n, leaf_size, method, ham_t, imbalances, t0):
    part = Partition(out, math.ceil(n / leaf_size), method, n,
                     {"seconds": time.perf_counter() - t0,
                      "max_crossing": None,
                      "ham_t": ham_t,
                      "mean_imbalance":
                          float(np.mean(imbalances)) if imbalances else 0.0},
                     points=X)
    cover = part.point_cover()
    if cover.shape[0] != n or not np.array_equal(cover, np.arange(n)):
        raise GeometryError("cell point lists do not partition the input")
    return part
