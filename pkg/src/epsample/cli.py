"""Command line surface: build structures, run sweeps, emit JSON/SVG.

Every subcommand prints a deterministic JSON payload (timing and memory
stay out of it; the bench CSV carries those). Exit codes: 0 success,
2 bad configuration, 3 bad input data, 4 violated internal invariant.
"""

from __future__ import annotations

import functools
import json
import math
import sys

import click
import numpy as np

from .arrangement import POLY4, POLY8, TRAPEZOID
from .bench import RunConfig, evaluate_error, records_json, run_experiment, write_csv
from .cutting import create_cutting
from .data import SchemaError, TooManyBadRows, generate, generate_lines, ingest_csv
from .discrepancy import plant_anomaly, scan_discrepancy
from .geom import GeometryError, InvariantViolation
from .hamtree import DEFAULT_HAM_T, double_ham_tree, ham_tree
from .partition import ChanParams, MatParams, partition_chan, partition_mat
from .render import render_svg
from .sampling import METHODS, epsilon_sample

CELL_KINDS = {"poly4": POLY4, "poly8": POLY8, "trapezoid": TRAPEZOID}


def guarded(fn):
    @functools.wraps(fn)
    def wrap(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (SchemaError, TooManyBadRows, OSError) as e:
            click.echo(f"data error: {e}", err=True)
            sys.exit(3)
        except InvariantViolation as e:
            click.echo(f"invariant violation: {e}", err=True)
            sys.exit(4)
        except GeometryError as e:
            click.echo(f"config error: {e}", err=True)
            sys.exit(2)
    return wrap


def emit(payload, out=None):
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    click.echo(text, nl=False)


def load_points(cfg: RunConfig) -> np.ndarray:
    """Points per config: CSV rows (at most n) or generated."""
    if cfg.input:
        X = ingest_csv(cfg.input).points
        return X[:cfg.n] if cfg.n < X.shape[0] else X
    return generate(cfg.generator, cfg.n, cfg.seed)


def build_partition(X, method, t, b, ham_t, seed):
    if method == "mat":
        return partition_mat(X, t, MatParams(b=b) if b else MatParams(),
                             seed=seed)
    if method in ("chan", "chan_simple"):
        simple = method == "chan_simple"
        p = ChanParams(b=b, simple=simple) if b else ChanParams(simple=simple)
        return partition_chan(X, t, p, seed=seed)
    if method in ("ham", "double_ham"):
        leaf = max(1, math.ceil(X.shape[0] / t))
        builder = ham_tree if method == "ham" else double_ham_tree
        return builder(X, leaf, t=ham_t or DEFAULT_HAM_T, seed=seed)
    raise GeometryError(f"method {method!r} does not build a partition")


def probe_max_crossing(part, n_probes, seed):
    """Worst cell-boundary crossing count over random probe lines."""
    if n_probes < 1:
        return None
    rng = np.random.default_rng(np.random.SeedSequence([seed, 99]))
    worst = 0
    for _ in range(n_probes):
        a, b = rng.normal(), rng.normal()
        hits = sum(1 for region, _ in part.cells
                   if region is not None and region.crossed_by(a, b))
        worst = max(worst, hits)
    return worst


def sample_params(method, b, ham_t):
    if method == "mat" and b:
        return MatParams(b=b)
    if method == "chan" and b:
        return ChanParams(b=b)
    if method == "chan_simple" and b:
        return ChanParams(b=b, simple=True)
    if method in ("ham", "double_ham") and ham_t:
        return ham_t
    return None


@click.group()
def main():
    """Cuttings, low-crossing partitions, and halfplane samples."""


def data_options(fn):
    for opt in (
        click.option("--generator", default="uniform",
                     show_default=True,
                     help="uniform | gaussian_clusters | annulus"),
        click.option("--input", "input_", default=None,
                     help="CSV of points (overrides --generator)"),
        click.option("--seed", default=0, show_default=True, type=int),
        click.option("--out", default=None, help="also write JSON here"),
    ):
        fn = opt(fn)
    return fn


@main.command()
@click.option("--n", default=500, show_default=True, type=int,
              help="number of random lines")
@click.option("--r", default=8, show_default=True, type=int)
@click.option("--cell", default="poly8", show_default=True,
              type=click.Choice(sorted(CELL_KINDS)))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", default=None)
@click.option("--svg", default=None, help="write an SVG drawing here")
@guarded
def cutting(n, r, cell, seed, out, svg):
    """Build a 1/r-cutting of random lines."""
    cfg = RunConfig(command="cutting", n=n, k=2, r=r, seed=seed,
                    out=out, svg=svg).validate()
    H = generate_lines(n, seed)
    cut = create_cutting(H, r, CELL_KINDS[cell], seed=seed)
    if svg:
        render_svg(cut, svg, lines=H)
    emit({"command": "cutting", "config": cfg.to_json(),
          "metrics": cut.metrics()}, out)


@main.command()
@click.option("--method", default="ham", show_default=True,
              type=click.Choice([m for m in METHODS if m != "random"]))
@click.option("--n", default=10_000, show_default=True, type=int)
@click.option("--t", default=64, show_default=True, type=int,
              help="cell count target")
@click.option("--b", default=None, type=int, help="branching override")
@click.option("--ham-t", default=None, type=int,
              help="ham cut candidate count")
@click.option("--test-set", default="dual", show_default=True,
              type=click.Choice(["lines", "points", "dual"]))
@click.option("--probes", default=200, show_default=True, type=int,
              help="probe lines for the crossing metric (0 skips)")
@click.option("--svg", default=None)
@data_options
@guarded
def partition(method, n, t, b, ham_t, test_set, probes, svg, generator,
              input_, seed, out):
    """Partition points into ~t cells of near-equal size."""
    cfg = RunConfig(command="partition", method=method, n=n, k=2, t=t,
                    b=b, ham_t=ham_t, seed=seed, generator=generator,
                    input=input_, out=out, svg=svg).validate()
    X = load_points(cfg)
    if method == "mat":
        params = MatParams(b=b, test_set_method=test_set) if b \
            else MatParams(test_set_method=test_set)
        part = partition_mat(X, t, params, seed=seed)
    else:
        part = build_partition(X, method, t, b, ham_t, seed)
    sizes = [len(ids) for _, ids in part.cells]
    stats = {k: v for k, v in part.stats.items() if k != "seconds"}
    metrics = {
        "n": int(X.shape[0]),
        "t": t,
        "cells": len(part),
        "max_cell": max(sizes),
        "cell_bound": math.ceil(2 * X.shape[0] / t),
        "max_crossing": probe_max_crossing(part, probes, seed),
        "stats": stats,
    }
    if svg:
        render_svg(part, svg)
    emit({"command": "partition", "config": cfg.to_json(),
          "metrics": metrics}, out)


@main.command()
@click.option("--method", default="ham", show_default=True,
              type=click.Choice(METHODS))
@click.option("--n", default=100_000, show_default=True, type=int)
@click.option("--k", default=1000, show_default=True, type=int)
@click.option("--b", default=None, type=int)
@click.option("--ham-t", default=None, type=int)
@data_options
@guarded
def sample(method, n, k, b, ham_t, generator, input_, seed, out):
    """Draw a weighted epsilon-sample of about k points."""
    cfg = RunConfig(command="sample", method=method, n=n, k=k, b=b,
                    ham_t=ham_t, seed=seed, generator=generator,
                    input=input_, out=out).validate()
    X = load_points(cfg)
    s = epsilon_sample(X, k, method=method,
                       params=sample_params(method, b, ham_t), seed=seed)
    body = s.to_json()
    body["stats"] = {k2: v for k2, v in s.stats.items()
                     if k2 != "build_seconds"}
    emit({"command": "sample", "config": cfg.to_json(), "sample": body},
         out)


@main.command()
@click.option("--method", default="ham", show_default=True,
              type=click.Choice(METHODS))
@click.option("--n", default=10_000, show_default=True, type=int)
@click.option("--k", default=1000, show_default=True, type=int)
@click.option("--b", default=None, type=int)
@click.option("--ham-t", default=None, type=int)
@click.option("--budget", default=200, show_default=True, type=int,
              help="evaluation budget when n exceeds the exact cap")
@data_options
@guarded
def evaluate(method, n, k, b, ham_t, budget, generator, input_, seed, out):
    """Build a sample and measure its halfplane error."""
    cfg = RunConfig(command="evaluate", method=method, n=n, k=k, b=b,
                    ham_t=ham_t, seed=seed, generator=generator,
                    input=input_, out=out).validate()
    X = load_points(cfg)
    s = epsilon_sample(X, k, method=method,
                       params=sample_params(method, b, ham_t), seed=seed)
    err, how = evaluate_error(X, s, budget=budget, seed=seed)
    emit({"command": "evaluate", "config": cfg.to_json(),
          "metrics": {"error": err, "evaluator": how, "k": k,
                      "k_effective": s.stats.get("k_effective", s.k)}},
         out)


@main.command()
@click.option("--method", default="ham", show_default=True,
              type=click.Choice(METHODS))
@click.option("--n", default=100_000, show_default=True, type=int)
@click.option("--k", default=2000, show_default=True, type=int)
@click.option("--ham-t", default=None, type=int)
@click.option("--net", default=400, show_default=True, type=int,
              help="scan net size")
@click.option("--region-fraction", default=0.02, show_default=True,
              type=float)
@data_options
@guarded
def anomaly(method, n, k, ham_t, net, region_fraction, generator, input_,
            seed, out):
    """Plant a measured/baseline disparity and scan for it."""
    cfg = RunConfig(command="anomaly", method=method, n=n, k=k,
                    ham_t=ham_t, seed=seed, generator=generator,
                    input=input_, out=out).validate()
    X = load_points(cfg)
    L = plant_anomaly(X, region_fraction=region_fraction, seed=seed)
    s = epsilon_sample(X, k, method=method,
                       params=sample_params(method, None, ham_t),
                       seed=seed)
    res = scan_discrepancy(L, s, net_size=net, seed=seed)
    emit({"command": "anomaly", "config": cfg.to_json(),
          "metrics": {
              "phi": res.phi,
              "phi_estimate": res.phi_estimate,
              "phi_planted": res.phi_planted,
              "discrepancy_error": res.discrepancy_error,
              "found_line": {"a": res.line.a, "b": res.line.b},
              "found_side": res.side,
              "planted_line": {"a": L.line.a, "b": L.line.b},
              "planted_side": L.side,
          }}, out)


@main.command()
@click.option("--axis", required=True,
              type=click.Choice(["branching", "input_size", "output_size",
                                 "ham_t"]))
@click.option("--values", required=True,
              help="comma-separated axis values")
@click.option("--methods", default="random,ham", show_default=True,
              help="comma-separated method names")
@click.option("--n", default=100_000, show_default=True, type=int)
@click.option("--k", default=1000, show_default=True, type=int)
@click.option("--trials", default=3, show_default=True, type=int)
@click.option("--ham-t", default=None, type=int)
@click.option("--budget", default=200, show_default=True, type=int)
@click.option("--generator", default="uniform", show_default=True)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", default=None, help="write the CSV here")
@guarded
def bench(axis, values, methods, n, k, trials, ham_t, budget, generator,
          seed, out):
    """Sweep one axis and record per-trial build metrics."""
    try:
        vals = [int(v) for v in values.split(",") if v.strip()]
    except ValueError:
        raise GeometryError(f"--values must be integers, got {values!r}")
    meths = [m.strip() for m in methods.split(",") if m.strip()]
    records = run_experiment(axis, vals, meths, n=n, k=k, trials=trials,
                             seed=seed, generator=generator,
                             budget=budget, ham_t=ham_t)
    if out:
        write_csv(records, out)
    click.echo(records_json(records), nl=False)


@main.command()
@click.option("--r", default=None, type=int,
              help="draw a cutting at this r (otherwise a partition)")
@click.option("--cell", default="poly8", show_default=True,
              type=click.Choice(sorted(CELL_KINDS)))
@click.option("--method", default="ham", show_default=True,
              type=click.Choice([m for m in METHODS if m != "random"]))
@click.option("--n", default=2000, show_default=True, type=int)
@click.option("--t", default=32, show_default=True, type=int)
@click.option("--b", default=None, type=int)
@click.option("--ham-t", default=None, type=int)
@click.option("--svg", required=True)
@data_options
@guarded
def render(r, cell, method, n, t, b, ham_t, svg, generator, input_, seed,
           out):
    """Render a cutting or partition to SVG."""
    cfg = RunConfig(command="render", method=method, n=n, k=2, t=t, b=b,
                    r=r, ham_t=ham_t, seed=seed, generator=generator,
                    input=input_, svg=svg, out=out).validate()
    if r is not None:
        H = generate_lines(n, seed)
        structure = create_cutting(H, r, CELL_KINDS[cell], seed=seed)
        render_svg(structure, svg, lines=H)
        cells = structure.leaves
    else:
        X = load_points(cfg)
        structure = build_partition(X, method, t, b, ham_t, seed)
        render_svg(structure, svg)
        cells = len(structure)
    emit({"command": "render", "config": cfg.to_json(),
          "metrics": {"cells": cells, "svg": svg}}, out)


if __name__ == "__main__":
    main()
