"""Benchmark: compiled vs pure-Python geodesic development kernel.

Builds a dodecahedral cap complex and times a fixed battery of shots
through both kernels, verifying that they agree on every trace.

Run:  python benchmarks/bench_trace.py [--shots N]
"""

import argparse
import math
import time

import numpy as np

from hyperpoly.polyhedron import Combinatorics
from hyperpoly.angles import uniform_weights
from hyperpoly.conemetric import build_cap_complex
from hyperpoly.tracing import tables_for
from hyperpoly import _trace_py

try:
    from hyperpoly import _trace_cy
except ImportError:
    _trace_cy = None


def shot_battery(tables, shots, seed=0):
    rng = np.random.default_rng(seed)
    T = len(tables.sides)
    out = []
    for _ in range(shots):
        t = int(rng.integers(T))
        s = int(rng.integers(3))
        pos = float(rng.uniform(0.05, 0.95)) * tables.sides[t][s]
        ang = float(rng.uniform(0.05, 0.95)) * math.pi
        out.append((0, t, s, pos, ang, 2.0 * math.pi + 1e-3, 4096,
                    1e-9, 1e-7, 1e-7, False))
    return out


def run_py(tables, battery):
    results = []
    for args in battery:
        results.append(_trace_py.run_trace(
            tables.sides, tables.angles, tables.glue_tri, tables.glue_side,
            tables.corner_class, tables.class_kind, *args)[:2])
    return results


def run_cy(tables, battery):
    results = []
    for args in battery:
        results.append(_trace_cy.run_trace(
            tables.sides_arr, tables.angles_arr, tables.glue_tri_arr,
            tables.glue_side_arr, tables.corner_class_arr,
            tables.class_kind_arr, *args)[:2])
    return results


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--shots", type=int, default=2000)
    args = ap.parse_args()

    g = uniform_weights(Combinatorics.dodecahedron(), 0.8 * math.pi)
    metric = build_cap_complex(g)
    tables = tables_for(metric)
    battery = shot_battery(tables, args.shots)

    t0 = time.perf_counter()
    res_py = run_py(tables, battery)
    t_py = time.perf_counter() - t0
    print(f"python kernel:   {args.shots} shots in {t_py:.3f}s "
          f"({args.shots / t_py:.0f}/s)")

    if _trace_cy is None:
        print("compiled kernel: not built")
        return

    t0 = time.perf_counter()
    res_cy = run_cy(tables, battery)
    t_cy = time.perf_counter() - t0
    print(f"compiled kernel: {args.shots} shots in {t_cy:.3f}s "
          f"({args.shots / t_cy:.0f}/s)")
    print(f"speedup: {t_py / t_cy:.1f}x")

    worst = 0.0
    for (ca, la), (cb, lb) in zip(res_py, res_cy):
        assert ca == cb, "kernels disagree on a termination code"
        worst = max(worst, abs(la - lb))
    print(f"agreement: codes identical, max |length delta| = {worst:.2e}")


if __name__ == "__main__":
    main()
