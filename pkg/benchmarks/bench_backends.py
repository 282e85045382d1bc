"""Time the compiled and pure-Python kernels on the reference trajectories.

    python benchmarks/bench_backends.py --repeat 3
"""

import argparse
import time

import numpy as np

from sqdmnp import DriveSpec, SystemParams, couplings_for, gold_table, integrate
from sqdmnp.kernels import available_backends


def best_time(params, c, backend, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        traj = integrate(params, c, backend=backend)
        times.append(time.perf_counter() - start)
    return min(times), traj


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3, help="runs per case; the best is reported")
    args = parser.parse_args(argv)

    table = gold_table()
    cases = {
        "cw 150 ps": SystemParams(drive=DriveSpec(E0=0.41e6)),
        "sech 60 ps": SystemParams(drive=DriveSpec(E0=0.41e6, mode="sech")),
    }
    backends = available_backends()
    print(f"{'case':12s} {'backend':9s} {'steps':>7s} {'time [s]':>9s} {'max EoF':>10s}")
    for label, params in cases.items():
        c = couplings_for(params, table)
        results = {}
        for name in backends:
            elapsed, traj = best_time(params, c, name, args.repeat)
            results[name] = (elapsed, traj)
            print(f"{label:12s} {name:9s} {traj.n_steps:7d} {elapsed:9.4f} {traj.eof.max():10.6f}")
        if len(results) == 2:
            (tp, a), (tc, b) = results["python"], results["compiled"]
            diff = np.max(np.abs(a.states - b.states))
            print(f"{'':12s} speedup {tp / tc:.1f}x, max state difference {diff:.1e}")


if __name__ == "__main__":
    main()
