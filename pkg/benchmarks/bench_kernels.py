#!/usr/bin/env python3
"""Benchmark the numba-compiled kernels against the pure-Python fallback.

Each mode runs in a fresh subprocess so the GEOSEG_NO_NUMBA flag takes
effect at import time. Usage:

    python3 benchmarks/bench_kernels.py [--quick]
"""

import argparse
import json
import os
import subprocess
import sys

_WORKER = r"""
import json, math, sys, time
import numpy as np
import geoseg._kernels as K
from geoseg.eikonal import lifted_spatial_offsets

quick = bool(int(sys.argv[1]))

def offsets(radius=2):
    offs = []
    for dx in range(-radius, radius + 1):
        for dy in range(-radius, radius + 1):
            if (dx, dy) != (0, 0) and math.gcd(abs(dx), abs(dy)) == 1:
                offs.append((dx, dy))
    offs.sort(key=lambda e: math.atan2(e[1], e[0]))
    return np.array(offs, dtype=np.int64)

results = {"numba": K.NUMBA_ENABLED}
rng = np.random.default_rng(0)

# 2D solve
n = 64 if quick and not K.NUMBA_ENABLED else 128
speed = 0.5 + rng.random(n * n)
dummy = np.zeros(1)
wgt = np.ones(n * n)
offs = offsets()
src = np.array([(n // 2) * n + n // 2], dtype=np.int64)
blocked = np.zeros(n * n, dtype=np.uint8)
stop = np.zeros(n * n, dtype=np.uint8)
args = (n, n, 0, speed, dummy, dummy, dummy, dummy, dummy, wgt, offs, src,
        0, float(n // 2), float(n // 2), blocked, 0, stop, 0, -1.0)
K.solve_2d(*args)  # warm-up / JIT
t0 = time.perf_counter()
K.solve_2d(*args)
results["solve_2d"] = {"grid": f"{n}x{n}", "seconds": time.perf_counter() - t0}

# lifted solve
h = w = 24 if quick and not K.NUMBA_ENABLED else 48
kk = 16 if quick and not K.NUMBA_ENABLED else 32
pot = 0.2 + rng.random(h * w * kk)
wgt2 = np.ones(h * w)
e1, e2 = lifted_spatial_offsets(kk)
src2 = np.array([((h // 2) * w + w // 2) * kk], dtype=np.int64)
blocked2 = np.zeros(h * w, dtype=np.uint8)
stop2 = np.zeros(h * w, dtype=np.uint8)
args2 = (h, w, kk, pot, wgt2, 2.0, 0, 2 * math.pi / kk, e1, e2, src2,
         0, float(w // 2), float(h // 2), blocked2, 0, stop2, 0, -1.0)
K.solve_lifted(*args2)
t0 = time.perf_counter()
K.solve_lifted(*args2)
results["solve_lifted"] = {"grid": f"{w}x{h}x{kk}",
                           "seconds": time.perf_counter() - t0}

# exact EDT
m = 128 if quick and not K.NUMBA_ENABLED else 512
sites = (rng.random((m, m)) < 0.01).astype(np.uint8)
sites[0, 0] = 1
K.edt_sq(sites)
t0 = time.perf_counter()
K.edt_sq(sites)
results["edt_sq"] = {"grid": f"{m}x{m}", "seconds": time.perf_counter() - t0}

print(json.dumps(results))
"""


def run_mode(no_numba: bool, quick: bool) -> dict:
    env = dict(os.environ)
    if no_numba:
        env["GEOSEG_NO_NUMBA"] = "1"
    else:
        env.pop("GEOSEG_NO_NUMBA", None)
    out = subprocess.run([sys.executable, "-c", _WORKER, str(int(quick))],
                         capture_output=True, text=True, env=env, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true",
                    help="smaller problems for the pure-Python pass")
    args = ap.parse_args()

    print("benchmarking numba path ...")
    jit = run_mode(False, args.quick)
    print("benchmarking pure-Python fallback (GEOSEG_NO_NUMBA=1) ...")
    py = run_mode(True, args.quick)

    print()
    print(f"{'kernel':<14} {'numba grid':<12} {'numba s':>10} "
          f"{'python grid':<12} {'python s':>10} {'speedup*':>9}")
    for name in ("solve_2d", "solve_lifted", "edt_sq"):
        a, b = jit[name], py[name]
        ratio = b["seconds"] / max(a["seconds"], 1e-9)
        note = "" if a["grid"] == b["grid"] else " (different sizes)"
        print(f"{name:<14} {a['grid']:<12} {a['seconds']:>10.4f} "
              f"{b['grid']:<12} {b['seconds']:>10.4f} {ratio:>8.1f}x{note}")
    print("\n* same-size ratio only where grids match; with --quick the "
          "fallback runs reduced sizes.")


if __name__ == "__main__":
    main()
