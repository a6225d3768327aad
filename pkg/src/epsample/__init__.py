"""Planar halfplane range spaces: cuttings, partitions, and small samples."""

from epsample.arrangement import POLY4, POLY8, TRAPEZOID, ArrangementTree
from epsample.cutting import Cutting, WeightedLine, create_cutting
from epsample.data import generate, generate_lines, ingest_csv
from epsample.discrepancy import (
    approx_error,
    exact_error,
    plant_anomaly,
    scan_discrepancy,
)
from epsample.geom import DEFAULT_TOL, GeometryError, Line, Point, Tolerance
from epsample.hamtree import approx_ham_sandwich, double_ham_tree, ham_tree
from epsample.kernels import BACKEND, HAS_NUMBA
from epsample.partition import (
    ChanParams,
    MatParams,
    Partition,
    partition_chan,
    partition_mat,
)
from epsample.render import render_svg
from epsample.sampling import (
    WeightedSample,
    epsilon_sample,
    partition_sample,
    sample_size_for_epsilon,
)

__all__ = [
    "ArrangementTree", "BACKEND", "ChanParams", "Cutting", "DEFAULT_TOL",
    "GeometryError", "HAS_NUMBA", "Line", "MatParams", "POLY4", "POLY8",
    "Partition", "Point", "TRAPEZOID", "Tolerance", "WeightedLine",
    "WeightedSample", "approx_error", "approx_ham_sandwich",
    "create_cutting", "double_ham_tree", "epsilon_sample", "exact_error",
    "generate", "generate_lines", "ham_tree", "ingest_csv",
    "partition_chan", "partition_mat", "partition_sample",
    "plant_anomaly", "render_svg", "sample_size_for_epsilon",
    "scan_discrepancy",
]

__version__ = "0.1.0"
