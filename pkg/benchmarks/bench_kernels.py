"""Compare the compiled and pure-numpy kernel backends.

Runs itself twice as a subprocess, once normally and once with
EPSAMPLE_NO_NUMBA=1, so each child imports the package with a single
backend active. Workloads cover every kernel family plus two end-to-end
builds that exercise the tree kernels. Timings are best-of-N after one
warmup call, so JIT compilation is not charged to the compiled side.

Usage: python3 benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import json
import math
import os
import subprocess
import sys
import time

import numpy as np


def workloads():
    from epsample.arrangement import POLY8
    from epsample.cutting import WeightedLine, create_cutting
    from epsample.geom import Line
    from epsample.kernels import (
        clip_intervals,
        halfplane_sums,
        scan_phi,
        sweep_discrepancy,
        sweep_extremes,
    )
    from epsample.partition import partition_mat

    rng = np.random.default_rng(7)

    la = rng.normal(size=300)
    lb = rng.normal(size=300)
    px = rng.random(150_000)
    py = rng.random(150_000)
    w = np.full(px.shape, 1.0 / px.shape[0])

    ca = rng.normal(size=2_000)
    cb = rng.normal(size=2_000)
    lo0 = np.full(ca.shape, -np.inf)
    hi0 = np.full(ca.shape, np.inf)
    ea = rng.normal(size=8)
    eb = rng.normal(size=8)
    eup = np.arange(8) % 2 == 0

    sx = rng.random(3_000)
    sy = rng.random(3_000)
    dm = np.where(np.arange(3_000) % 2 == 0, 1.0, -1.0) / 3_000

    ux = rng.random(100_000)
    uy = rng.random(100_000)
    um = np.where(np.arange(100_000) % 2 == 0, 1.0, -1.0) / 100_000
    active = np.zeros(100_000, dtype=bool)
    active[rng.permutation(100_000)[:300]] = True

    nx = rng.random(400)
    ny = rng.random(400)
    gx = rng.random(5_000)
    gy = rng.random(5_000)
    wm = np.full(5_000, 1.0 / 5_000)
    wb = rng.random(5_000)
    wb /= wb.sum()

    H = [WeightedLine(Line(a, b))
         for a, b in rng.normal(size=(300, 2))]
    X = rng.random((20_000, 2))

    def clip_many():
        for _ in range(100):
            clip_intervals(ca, cb, lo0, hi0, ea, eb, eup, -np.inf, np.inf)

    return [
        ("halfplane_sums", lambda: halfplane_sums(la, lb, px, py, w)),
        ("clip_intervals x100", clip_many),
        ("sweep_extremes n=3k", lambda: sweep_extremes(sx, sy, dm)),
        ("sweep_discrepancy n=100k",
         lambda: sweep_discrepancy(ux, uy, um, active)),
        ("scan_phi 400x5k", lambda: scan_phi(nx, ny, gx, gy, wm, wb)),
        ("create_cutting 300 r=8",
         lambda: create_cutting(H, 8, POLY8, seed=0)),
        ("partition_mat n=20k t=64",
         lambda: partition_mat(X, 64, seed=0)),
    ]


def run_child(repeat):
    from epsample.kernels import BACKEND

    timings = {}
    for name, fn in workloads():
        fn()
        best = math.inf
        for _ in range(repeat):
            t0 = time.perf_counter()
            fn()
            best = min(best, time.perf_counter() - t0)
        timings[name] = best
    json.dump({"backend": BACKEND, "timings": timings}, sys.stdout)


def spawn(no_numba, repeat):
    env = dict(os.environ)
    env.pop("EPSAMPLE_NO_NUMBA", None)
    if no_numba:
        env["EPSAMPLE_NO_NUMBA"] = "1"
    out = subprocess.run(
        [sys.executable, __file__, "--child", "--repeat", str(repeat)],
        env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.child:
        run_child(args.repeat)
        return

    fast = spawn(False, args.repeat)
    slow = spawn(True, args.repeat)
    if fast["backend"] == slow["backend"]:
        sys.exit(f"both children ran the {fast['backend']} backend; "
                 "is numba installed?")

    width = max(len(k) for k in fast["timings"])
    print(f"{'workload':<{width}}  {fast['backend']:>10}  "
          f"{slow['backend']:>10}  speedup")
    for name, tf in fast["timings"].items():
        ts = slow["timings"][name]
        print(f"{name:<{width}}  {tf:>9.4f}s  {ts:>9.4f}s  "
              f"{ts / tf:>6.1f}x")


if __name__ == "__main__":
    main()
