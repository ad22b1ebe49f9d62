"""Theta lattice sums: numba kernels against the pure-numpy fallback.

    python3 benchmarks/bench_theta.py [--repeat 5] [--json out.json]

Both back ends run through ``theta_many`` on identical inputs; the numpy run
swaps the kernel entry points for the fallback pair.  Prints the best wall time
per case, the speedup and the largest relative difference between the two.
"""

import argparse
import json
import time
from contextlib import contextmanager

import numpy as np

from trisecant import _kernels
from trisecant._accel import HAVE_NUMBA
from trisecant.theta import SiegelMatrix, theta_many

CASES = [
    # (label, B, points, order, directions)
    ("g1 values", [[0.2 + 1.1j]], 400, 0, []),
    ("g2 order-2 jets", [[0.2 + 1.1j, 0.3 + 0.1j], [0.3 + 0.1j, -0.1 + 0.9j]], 200, 2, [[1, 0.4], [0.2, -0.3]]),
    ("g3 order-4 jets", [[0.1 + 1.0j, 0.2 + 0.3j, -0.1 + 0.1j], [0.2 + 0.3j, -0.2 + 1.2j, 0.15 + 0.2j],
                         [-0.1 + 0.1j, 0.15 + 0.2j, 0.3 + 0.9j]], 40, 4, [[1, 0.5, 0.2], [0.1, -0.3, 1]]),
]


@contextmanager
def numpy_kernels():
    saved = _kernels.lattice_shifts, _kernels.chunk_sums
    _kernels.lattice_shifts, _kernels.chunk_sums = _kernels.numpy_lattice_shifts, _kernels.numpy_chunk_sums
    try:
        yield
    finally:
        _kernels.lattice_shifts, _kernels.chunk_sums = saved


def best_time(fn, repeat):
    fn()  # warm-up (and numba compilation)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def run(repeat):
    rng = np.random.default_rng(0)
    rows = []
    for label, B, npts, order, dirs in CASES:
        S = SiegelMatrix(B)
        zs = (rng.standard_normal((npts, S.g)) + 1j * rng.standard_normal((npts, S.g))) * 0.4

        def call():
            return theta_many(zs, S, order, dirs)[0]

        with numpy_kernels():
            t_np, v_np = best_time(call, repeat)
        row = {"case": label, "points": npts, "numpy_s": t_np}
        if HAVE_NUMBA:
            t_nb, v_nb = best_time(call, repeat)
            scale = np.maximum(np.abs(v_np), 1e-300)
            row.update(numba_s=t_nb, speedup=t_np / t_nb, max_rel_diff=float(np.max(np.abs(v_nb - v_np) / scale)))
        rows.append(row)
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", help="write the rows as JSON")
    args = ap.parse_args()
    rows = run(args.repeat)
    print(f"{'case':18s} {'numpy [ms]':>11s} {'numba [ms]':>11s} {'speedup':>8s} {'max rel diff':>13s}")
    for r in rows:
        if "numba_s" in r:
            print(f"{r['case']:18s} {1e3 * r['numpy_s']:11.2f} {1e3 * r['numba_s']:11.2f} "
                  f"{r['speedup']:8.1f} {r['max_rel_diff']:13.1e}")
        else:
            print(f"{r['case']:18s} {1e3 * r['numpy_s']:11.2f} {'n/a':>11s}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
