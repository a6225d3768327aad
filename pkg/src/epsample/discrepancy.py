"""Halfplane error oracles and the planted-anomaly scan statistic.

The error of a weighted sample S against a point set X is the largest
disagreement, over all halfplanes, between S's weight inside and X's
fraction inside. Writing each point's signed mass (sample weight minus
1/|X|, merged for coincident coordinates) turns that into the extreme
signed halfplane sum, which a rotational sweep finds exactly in
O(N^2 log N): boundaries in direction space, so vertical cuts need no
special casing, with open/closed endpoint variants enumerated per pair.

The budgeted variant restricts boundary pairs to a seeded subsample
whose prefixes are nested, so it never exceeds the exact error and can
only grow with budget. The anomaly half plants a measured/baseline label
disparity inside a quantile halfplane and scans net-pair halfplanes for
the largest sample-estimated discrepancy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .arrangement import POLY_UNCAPPED, ArrangementTree
from .geom import (
    DEFAULT_TOL,
    DegenerateLine,
    GeometryError,
    Line,
    Tolerance,
    as_rng,
)

EXACT_LIMIT = 5000


class TooLarge(GeometryError):
    """Input exceeds the exact oracle's size guard."""


def _as_points(P, what):
    P = np.asarray(P, dtype=np.float64)
    if P.ndim != 2 or P.shape[1] != 2:
        raise GeometryError(f"{what} must be an (n, 2) array")
    if not np.isfinite(P).all():
        raise GeometryError(f"{what} must be finite")
    return P


def _signed_universe(X, sample):
    """Distinct coordinates with net mass (sample weight - X share).

    Sample points coincide with input points by construction, so exact
    duplicates are merged; a halfplane boundary then treats each site as
    the single point it is. Weights are taken as-is (the WeightedSample
    invariant says they sum to 1); renormalizing here would perturb the
    exact cancellation that makes the identity sample score 0.
    """
    S = _as_points(sample.points, "sample points")
    w = np.asarray(sample.weights, dtype=np.float64)
    n = X.shape[0]
    U = np.vstack((X, S))
    dm = np.concatenate((np.full(n, -1.0 / n), w))
    order = np.lexsort((U[:, 1], U[:, 0]))
    U = U[order]
    dm = dm[order]
    new = np.ones(U.shape[0], dtype=bool)
    np.not_equal(U[1:], U[:-1]).any(axis=1, out=new[1:])
    group = np.cumsum(new) - 1
    # accumulate signs separately: the identity sample then cancels to
    # exactly 0 per site even when input points repeat
    pos = np.zeros(int(group[-1]) + 1, dtype=np.float64)
    neg = np.zeros_like(pos)
    np.add.at(pos, group, np.where(dm > 0.0, dm, 0.0))
    np.add.at(neg, group, np.where(dm < 0.0, dm, 0.0))
    return U[new, 0], U[new, 1], pos + neg


def exact_error(X, sample) -> float:
    """Largest |sample weight - X fraction| over all halfplanes.

    Exact by exhaustion of the combinatorial family (boundaries through
    point pairs with all endpoint in/out variants); quadratic sweeps keep
    it tractable but the guard still refuses oversized inputs.
    """
    X = _as_points(X, "points")
    if X.shape[0] > EXACT_LIMIT:
        raise TooLarge(
            f"exact oracle capped at {EXACT_LIMIT} points, got {X.shape[0]}")
    ux, uy, dm = _signed_universe(X, sample)
    hi, lo = kernels.sweep_discrepancy(ux, uy, dm)
    return max(hi, -lo)


def approx_error(X, sample, budget: int, seed=None) -> float:
    """exact_error restricted to boundaries spanned by a budget-sized
    subsample of the merged universe.

    Never exceeds the exact value; for a fixed seed the subsamples nest,
    so more budget never reports less. budget at or beyond the universe
    size reproduces exact_error bit for bit.
    """
    X = _as_points(X, "points")
    if budget < 1:
        raise GeometryError(f"budget must be >= 1, got {budget}")
    ux, uy, dm = _signed_universe(X, sample)
    rng = as_rng(seed)
    m = ux.shape[0]
    active = np.zeros(m, dtype=bool)
    active[rng.permutation(m)[:min(budget, m)]] = True
    hi, lo = kernels.sweep_discrepancy(ux, uy, dm, active)
    return max(hi, -lo)


# ---------------------------------------------------------------------------
# planted anomalies


@dataclass
class LabeledPoints:
    """Points with measured/baseline membership flags and the planted
    halfplane the disparity was injected into.

    measured and baseline are independent Bernoulli memberships, so a
    point can be in both sets or neither. region is the planted
    halfplane as an arrangement cell; inside is its membership mask.
    """

    points: np.ndarray
    measured: np.ndarray
    baseline: np.ndarray
    line: Line
    side: str
    region: object
    inside: np.ndarray

    @property
    def n(self) -> int:
        return self.points.shape[0]


def _halfplane_cell(line: Line, side: str, tol: Tolerance):
    tree = ArrangementTree(POLY_UNCAPPED, tol=tol)
    up, down = tree.split_leaf(tree.leaves()[0], line)
    return up if side == "above" else down


def plant_anomaly(X, region_fraction: float = 0.02, p_in: float = 0.7,
                  q_in: float = 0.3, p_out: float = 0.5, q_out: float = 0.5,
                  seed=None, tol: Tolerance = DEFAULT_TOL) -> LabeledPoints:
    """Label points measured/baseline with elevated measured probability
    inside a halfplane holding region_fraction of the points.

    The halfplane is a quantile threshold along a random direction, so
    its boundary is a data-independent random line; inside it points are
    measured with probability p_in and baseline q_in, outside p_out and
    q_out.
    """
    X = _as_points(X, "points")
    for name, v in (("region_fraction", region_fraction),
                    ("p_in", p_in), ("q_in", q_in),
                    ("p_out", p_out), ("q_out", q_out)):
        if not 0.0 <= v <= 1.0:
            raise GeometryError(f"{name} must lie in [0, 1], got {v}")
    rng = as_rng(seed)
    n = X.shape[0]
    theta = rng.uniform(0.0, 2.0 * math.pi)
    u = np.array([math.cos(theta), math.sin(theta)])
    if u[1] == 0.0:
        u[1] = 1e-12
    proj = X @ u
    k_in = int(round(region_fraction * n))
    if k_in <= 0:
        c = float(proj.max()) + 1.0
    else:
        c = float(np.partition(proj, n - k_in)[n - k_in])
    inside = proj >= c
    # u . p >= c in y = ax + b form; the inside is above iff u_y > 0.
    a = -u[0] / u[1]
    b = c / u[1]
    side = "above" if u[1] > 0 else "below"
    line = Line(float(a), float(b))
    p = np.where(inside, p_in, p_out)
    q = np.where(inside, q_in, q_out)
    measured = rng.random(n) < p
    baseline = rng.random(n) < q
    return LabeledPoints(X, measured, baseline, line, side,
                         _halfplane_cell(line, side, tol), inside)


# ---------------------------------------------------------------------------
# scan statistic


@dataclass
class ScanResult:
    """Outcome of a discrepancy scan.

    line/side name the best halfplane found; phi is its discrepancy
    |m - b| recomputed exactly on the labeled points (phi_estimate is
    the sample-weighted value the scan actually maximized), and
    discrepancy_error compares phi against the planted halfplane's.
    """

    line: Line
    side: str
    phi: float
    phi_estimate: float
    phi_planted: float
    discrepancy_error: float


def _phi_exact(L: LabeledPoints, line: Line, side: str) -> float:
    above = L.points[:, 1] >= line.a * L.points[:, 0] + line.b
    inside = above if side == "above" else ~above
    nm = int(L.measured.sum())
    nb = int(L.baseline.sum())
    m = float(np.sum(inside & L.measured)) / nm if nm else 0.0
    b = float(np.sum(inside & L.baseline)) / nb if nb else 0.0
    return abs(m - b)


def scan_discrepancy(L: LabeledPoints, sample, net_size: int = 400,
                     seed=None) -> ScanResult:
    """Find the net-pair halfplane with maximal sample-estimated
    discrepancy and compare it against the planted one.

    The net is a uniform subsample of the labeled points; candidate
    boundaries run through net point pairs. Each candidate's measures
    come from the weighted sample (points carry their source labels), and
    the winner is then re-scored exactly on the full labeled set.
    """
    if net_size < 2:
        raise GeometryError(f"net_size must be >= 2, got {net_size}")
    rng = as_rng(seed)
    net_idx = rng.choice(L.n, size=min(net_size, L.n), replace=False)
    net = L.points[net_idx]
    ids = np.asarray(sample.ids, dtype=np.int64)
    w = np.asarray(sample.weights, dtype=np.float64)
    wm = w * L.measured[ids]
    wb = w * L.baseline[ids]
    tm, tb = wm.sum(), wb.sum()
    if tm > 0.0:
        wm = wm / tm
    if tb > 0.0:
        wb = wb / tb
    S = np.asarray(sample.points, dtype=np.float64)
    phi_hat, i, j, up = kernels.scan_phi(net[:, 0], net[:, 1],
                                         S[:, 0], S[:, 1], wm, wb)
    if i < 0:
        raise DegenerateLine("no net pair spans a usable boundary line")
    a = (net[j, 1] - net[i, 1]) / (net[j, 0] - net[i, 0])
    line = Line(float(a), float(net[i, 1] - a * net[i, 0]))
    side = "above" if up else "below"
    phi = _phi_exact(L, line, side)
    phi_planted = _phi_exact(L, L.line, L.side)
    return ScanResult(line, side, phi, float(phi_hat), phi_planted,
                      abs(phi - phi_planted))
