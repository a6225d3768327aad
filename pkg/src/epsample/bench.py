"""Experiment grids: timed sample builds over a swept axis.

One record per (axis value, method, trial), in that fixed order. Data is
regenerated per (value, trial) so methods compare on identical inputs.
Wall time covers the construction call only; the error metric is
evaluated afterward, exactly when the input is small enough for the
exact oracle and with the budgeted approximation otherwise.
"""

from __future__ import annotations

import json
import resource
import time
from dataclasses import dataclass, field

import numpy as np

from .data import GENERATOR_KINDS, generate
from .discrepancy import EXACT_LIMIT, approx_error, exact_error
from .geom import GeometryError
from .sampling import METHODS, epsilon_sample

SCHEMA_VERSION = 1

AXES = ("branching", "input_size", "output_size", "ham_t")

# branching only exists for the emission/level builds
BRANCHING_METHODS = ("mat", "chan", "chan_simple")
HAM_METHODS = ("ham", "double_ham")

CSV_COLUMNS = (
    "schema_version", "axis", "value", "method", "trial", "n", "k",
    "seconds", "max_rss_kb", "error", "evaluator", "k_effective",
    "cells", "max_crossing", "leaves_per_r2", "imbalance",
    "discrepancy_error", "fail", "config",
)


@dataclass
class RunConfig:
    """Validated knobs for one command, echoed into every record."""

    command: str
    method: str | None = None
    n: int = 100_000
    k: int = 1000
    t: int | None = None
    b: int | None = None
    r: int | None = None
    ham_t: int | None = None
    seed: int = 0
    trials: int = 1
    generator: str = "uniform"
    input: str | None = None
    out: str | None = None
    svg: str | None = None

    def validate(self):
        if self.n < 1:
            raise GeometryError(f"need n >= 1, got {self.n}")
        if self.k < 2:
            raise GeometryError(f"need k >= 2, got {self.k}")
        if self.trials < 1:
            raise GeometryError(f"need trials >= 1, got {self.trials}")
        if self.method is not None and self.method not in METHODS:
            raise GeometryError(f"unknown method {self.method!r}")
        if self.input is None and self.generator not in GENERATOR_KINDS:
            raise GeometryError(f"unknown generator {self.generator!r}")
        return self

    def to_json(self) -> dict:
        return {k: v for k, v in vars(self).items() if v is not None}


@dataclass
class BenchRecord:
    """One trial's outcome: config echo, wall time, metric block."""

    config: dict
    axis: str
    value: object
    method: str
    trial: int
    seconds: float | None = None
    max_rss_kb: int | None = None
    metrics: dict = field(default_factory=dict)
    fail: str | None = None
    schema_version: int = SCHEMA_VERSION

    def to_json(self, timing: bool = False) -> dict:
        d = {
            "schema_version": self.schema_version,
            "config": self.config,
            "axis": self.axis,
            "value": self.value,
            "method": self.method,
            "trial": self.trial,
            "metrics": self.metrics,
            "fail": self.fail,
        }
        if timing:
            d["seconds"] = self.seconds
            d["max_rss_kb"] = self.max_rss_kb
        return d


def evaluate_error(X, sample, budget: int = 200, seed: int = 0):
    """(error, evaluator name): exact when the guard allows, else the
    budgeted approximation."""
    if X.shape[0] <= EXACT_LIMIT:
        return exact_error(X, sample), "exact"
    return approx_error(X, sample, budget, seed=seed), "approx"


def _params_for(method, axis, value, ham_t):
    from .partition import ChanParams, MatParams

    if axis == "branching":
        if method == "mat":
            return MatParams(b=int(value))
        if method == "chan":
            return ChanParams(b=int(value))
        return ChanParams(b=int(value), simple=True)
    if axis == "ham_t" and method in HAM_METHODS:
        return int(value)
    if method in HAM_METHODS and ham_t is not None:
        return int(ham_t)
    return None


def run_experiment(axis: str, values, methods, *, n: int = 100_000,
                   k: int = 1000, trials: int = 3, seed: int = 0,
                   generator: str = "uniform", budget: int = 200,
                   ham_t: int | None = None) -> list[BenchRecord]:
    """Records for every (value, method, trial) cell of the grid.

    A failing cell is recorded with its error message and the grid moves
    on. Branching sweeps accept only the builds that have a branching
    factor.
    """
    if axis not in AXES:
        raise GeometryError(f"unknown axis {axis!r}; pick from {AXES}")
    methods = list(methods)
    for m in methods:
        if m not in METHODS:
            raise GeometryError(f"unknown method {m!r}")
        if axis == "branching" and m not in BRANCHING_METHODS:
            raise GeometryError(
                f"branching sweep supports {BRANCHING_METHODS}, got {m!r}")
    values = list(values)
    if not values or not methods:
        raise GeometryError("need at least one axis value and one method")

    cfg = RunConfig(command="bench", n=n, k=k, seed=seed, trials=trials,
                    generator=generator, ham_t=ham_t).validate()
    base = cfg.to_json()
    base.update({"axis": axis, "values": values, "methods": methods,
                 "budget": budget})

    keyed = []
    for vi, value in enumerate(values):
        n_eff = int(value) if axis == "input_size" else n
        k_eff = int(value) if axis == "output_size" else k
        for trial in range(trials):
            X = generate(generator, n_eff,
                         np.random.SeedSequence([seed, vi, trial]))
            for mi, method in enumerate(methods):
                rec = BenchRecord(config=base, axis=axis, value=value,
                                  method=method, trial=trial)
                try:
                    params = _params_for(method, axis, value, ham_t)
                    m_seed = np.random.default_rng(
                        np.random.SeedSequence([seed, vi, trial, 1]))
                    t0 = time.perf_counter()
                    s = epsilon_sample(X, k_eff, method=method,
                                       params=params, seed=m_seed)
                    rec.seconds = time.perf_counter() - t0
                    err, how = evaluate_error(X, s, budget=budget)
                    rec.metrics = {
                        "n": n_eff,
                        "k": k_eff,
                        "k_effective": s.stats.get("k_effective", s.k),
                        "error": err,
                        "evaluator": how,
                    }
                except GeometryError as e:
                    rec.fail = f"{type(e).__name__}: {e}"
                rec.max_rss_kb = int(
                    resource.getrusage(resource.RUSAGE_SELF).ru_maxrss)
                keyed.append(((vi, mi, trial), rec))
    # grid cell first, trial last: data generation shares trials across
    # methods, so build order differs from record order
    keyed.sort(key=lambda kv: kv[0])
    return [rec for _, rec in keyed]


def write_csv(records, path):
    """Long-format CSV, one row per record, fixed column set."""
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for r in records:
            m = r.metrics
            w.writerow([
                r.schema_version, r.axis, r.value, r.method, r.trial,
                m.get("n", ""), m.get("k", ""),
                "" if r.seconds is None else f"{r.seconds:.6f}",
                r.max_rss_kb if r.max_rss_kb is not None else "",
                m.get("error", ""), m.get("evaluator", ""),
                m.get("k_effective", ""), m.get("cells", ""),
                m.get("max_crossing", ""), m.get("leaves_per_r2", ""),
                m.get("imbalance", ""), m.get("discrepancy_error", ""),
                r.fail or "",
                json.dumps(r.config, sort_keys=True),
            ])


def records_json(records) -> str:
    """Deterministic JSON for a record list: timing fields left out."""
    return json.dumps([r.to_json(timing=False) for r in records],
                      sort_keys=True, indent=2) + "\n"
