"""Weighted ε-sample construction from partitions, plus the random
baseline.

The pipeline: build a partition with cell-count target k, then keep one
uniformly random point per cell, weighted by the cell's share of the
input. Cutting-based partitions hit the target closely; the ham trees
overshoot it somewhat (their cell count is the effective k). A size law
converts a desired halfplane error ε into the k this construction needs
in the plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geom import DEFAULT_TOL, GeometryError, Tolerance, as_rng
from .hamtree import DEFAULT_HAM_T, double_ham_tree, ham_tree
from .partition import (
    ChanParams,
    MatParams,
    Partition,
    partition_chan,
    partition_mat,
)

METHODS = ("random", "mat", "chan", "chan_simple", "ham", "double_ham")


class InvalidK(GeometryError):
    """Sample size outside 2 <= k <= n."""


class EmptyCell(GeometryError):
    """A partition cell with no points reached the sampler."""


@dataclass
class WeightedSample:
    """k points with normalized weights standing in for a larger set.

    ids give each point's index in the source array (or -1 when the
    source is unknown); weights sum to 1.
    """

    points: np.ndarray
    weights: np.ndarray
    ids: np.ndarray
    method: str
    stats: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return self.points.shape[0]

    def __len__(self) -> int:
        return self.k

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "k": self.k,
            "points": [[float(x), float(y)] for x, y in self.points],
            "weights": [float(w) for w in self.weights],
            "ids": [int(i) for i in self.ids],
        }


def sample_size_for_epsilon(eps: float, c: float = 1.0) -> int:
    """k needed for halfplane error eps in the plane: the d=2 law
    ceil(c * eps^(-4/3) * ln(1/eps)^(2/3))."""
    if not 0.0 < eps < 1.0:
        raise GeometryError(f"eps must lie in (0, 1), got {eps}")
    if c <= 0.0:
        raise GeometryError(f"c must be positive, got {c}")
    return math.ceil(c * eps ** (-4.0 / 3.0)
                     * math.log(1.0 / eps) ** (2.0 / 3.0))


def partition_sample(part: Partition, seed=None) -> WeightedSample:
    """One uniform point per cell, weighted by the cell's point share."""
    if len(part.cells) == 0:
        raise EmptyCell("partition has no cells")
    if part.points is None:
        raise GeometryError("partition carries no source point array")
    rng = as_rng(seed)
    ids = np.empty(len(part.cells), dtype=np.int64)
    weights = np.empty(len(part.cells), dtype=np.float64)
    for c, (_, cell_ids) in enumerate(part.cells):
        if cell_ids.shape[0] == 0:
            raise EmptyCell(f"cell {c} holds no points")
        ids[c] = cell_ids[rng.integers(cell_ids.shape[0])]
        weights[c] = cell_ids.shape[0] / part.n
    return WeightedSample(part.points[ids], weights, ids, part.method,
                          {"t": part.t})


def epsilon_sample(X, k: int, method: str = "ham", params=None, seed=None,
                   presample: bool | None = None,
                   tol: Tolerance = DEFAULT_TOL) -> WeightedSample:
    """Weighted sample of about k points approximating X on halfplanes.

    Partition methods build their partition with cell target k and keep
    one point per cell (the ham trees may return somewhat more cells
    than k); "random" draws k points without replacement at equal
    weight. params passes through to the partition build: MatParams,
    ChanParams, or the candidate count t for the ham trees.

    presample=None (the default) first reduces very large inputs
    (n > 10 k^2) to a uniform subset of size ~k^2/ln k and partitions
    that instead; True/False forces the choice.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != 2:
        raise GeometryError("points must be an (n, 2) array")
    n = X.shape[0]
    if not 2 <= k <= n:
        raise InvalidK(f"need 2 <= k <= n, got k={k}, n={n}")
    if method not in METHODS:
        raise GeometryError(f"unknown method {method!r}")
    rng = as_rng(seed)

    if method == "random":
        idx = rng.choice(n, size=k, replace=False)
        return WeightedSample(X[idx], np.full(k, 1.0 / k), idx, "random",
                              {"presampled": False})

    if presample is None:
        presample = n > 10 * k * k
    if presample:
        s = min(n, max(k, math.ceil(k * k / math.log(k))))
        src = rng.choice(n, size=s, replace=False)
    else:
        src = np.arange(n, dtype=np.int64)
    Y = X[src]

    if method == "mat":
        part = partition_mat(Y, k, params or MatParams(), seed=rng, tol=tol)
    elif method == "chan":
        part = partition_chan(Y, k, params or ChanParams(), seed=rng, tol=tol)
    elif method == "chan_simple":
        part = partition_chan(Y, k, params or ChanParams(simple=True),
                              seed=rng, tol=tol)
    else:
        ham_t = params if params is not None else DEFAULT_HAM_T
        leaf = math.ceil(Y.shape[0] / k)
        builder = ham_tree if method == "ham" else double_ham_tree
        part = builder(Y, leaf, t=ham_t, seed=rng, tol=tol)

    sample = partition_sample(part, rng)
    sample.ids = src[sample.ids]
    sample.method = method
    sample.stats.update({
        "presampled": bool(presample) and src.shape[0] < n,
        "build_seconds": part.stats.get("seconds"),
        "k_effective": len(part),
    })
    return sample
