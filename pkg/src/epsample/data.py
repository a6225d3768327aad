"""Point inputs: synthetic generators and CSV ingestion.

Generators draw in (or near) the unit square and are deterministic per
seed. CSV ingestion applies the global degeneracy rotation once, so
downstream constructions can assume distinct x-coordinates; generator
output is continuous and left unrotated.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .cutting import WeightedLine
from .geom import GeometryError, Line, as_rng, rotate_points, rotation_angle

GENERATOR_KINDS = ("uniform", "gaussian_clusters", "annulus")

# fraction of malformed rows tolerated before ingestion aborts
BAD_ROW_LIMIT = 0.01


class DataError(Exception):
    """Base for ingestion failures."""


class SchemaError(DataError):
    """File shape does not match the requested columns."""


class TooManyBadRows(DataError):
    """Malformed rows exceed the tolerated fraction."""


def generate(kind: str, n: int, seed=None, clusters: int = 20,
             sigma: float = 0.02) -> np.ndarray:
    """n points from a named synthetic distribution.

    uniform fills the unit square; gaussian_clusters spreads n over
    `clusters` Gaussian blobs of spread sigma around uniform centers;
    annulus is area-uniform on a ring centered in the square.
    """
    if n < 1:
        raise GeometryError(f"need n >= 1, got {n}")
    rng = as_rng(seed)
    if kind == "uniform":
        return rng.random((n, 2))
    if kind in ("gaussian_clusters", "clusters"):
        if clusters < 1:
            raise GeometryError(f"need clusters >= 1, got {clusters}")
        means = rng.random((clusters, 2))
        which = rng.integers(clusters, size=n)
        return means[which] + rng.normal(0.0, sigma, size=(n, 2))
    if kind == "annulus":
        r_in, r_out = 0.25, 0.45
        theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
        r = np.sqrt(rng.uniform(r_in * r_in, r_out * r_out, size=n))
        return 0.5 + np.column_stack((r * np.cos(theta), r * np.sin(theta)))
    raise GeometryError(f"unknown generator {kind!r}")


def generate_lines(n: int, seed=None, slope_scale: float = 1.0,
                   offset_scale: float = 1.0) -> list[WeightedLine]:
    """n unit-weight lines with normal slopes and offsets."""
    if n < 1:
        raise GeometryError(f"need n >= 1, got {n}")
    rng = as_rng(seed)
    return [WeightedLine(Line(rng.normal() * slope_scale,
                              rng.normal() * offset_scale))
            for _ in range(n)]


@dataclass
class IngestResult:
    """Parsed CSV: rotated points, optional flag columns, row accounting."""

    points: np.ndarray
    labels: dict[str, np.ndarray] = field(default_factory=dict)
    n_rows: int = 0
    n_bad: int = 0


def _resolve(col, header, what):
    if isinstance(col, int):
        return col
    if header is None or col not in header:
        raise SchemaError(f"{what} column {col!r} not found in header")
    return header.index(col)


def ingest_csv(path, x_col="x", y_col="y", flag_cols=None) -> IngestResult:
    """Points (and optional 0/1 flag columns) from a CSV file.

    Column selectors are header names or 0-based indices; a header row
    is expected only when a name is used. Rows that fail to parse are
    counted and skipped, but more than 1% bad rows aborts the whole
    ingestion. Points come back already rotated.
    """
    flag_cols = list(flag_cols or [])
    by_name = any(isinstance(c, str) for c in [x_col, y_col] + flag_cols)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header = None
    if by_name:
        if not rows:
            raise SchemaError(f"{path}: empty file, no header")
        header = [h.strip() for h in rows[0]]
        rows = rows[1:]
    xi = _resolve(x_col, header, "x")
    yi = _resolve(y_col, header, "y")
    fi = [_resolve(c, header, "flag") for c in flag_cols]
    if not rows:
        raise SchemaError(f"{path}: no data rows")

    pts, flags, n_bad = [], [], 0
    for row in rows:
        try:
            x = float(row[xi])
            y = float(row[yi])
            fv = [int(float(row[i])) != 0 for i in fi]
        except (IndexError, ValueError):
            n_bad += 1
            continue
        if not (np.isfinite(x) and np.isfinite(y)):
            n_bad += 1
            continue
        pts.append((x, y))
        flags.append(fv)
    if n_bad > BAD_ROW_LIMIT * len(rows):
        raise TooManyBadRows(
            f"{path}: {n_bad} of {len(rows)} rows malformed")
    if not pts:
        raise SchemaError(f"{path}: no parseable rows")

    P = rotate_points(np.array(pts, dtype=np.float64), rotation_angle(0))
    fl = np.array(flags, dtype=bool).reshape(len(pts), len(fi))
    labels = {str(c): fl[:, k] for k, c in enumerate(flag_cols)}
    return IngestResult(P, labels, n_rows=len(rows), n_bad=n_bad)
