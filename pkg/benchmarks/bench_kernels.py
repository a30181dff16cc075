"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--rows 1000000] [--repeat 5]
"""

import argparse
import time

import numpy as np

from ecomode import kernels


def _rows_case(m, n, rng):
    P = rng.uniform(0, 5000, (m, n))
    Q = rng.integers(60, 10000, (m, n)).astype(float)
    offered = rng.random((m, n)) < 0.6
    clicked = rng.integers(0, n, m).astype(np.intp)
    offered[np.arange(m), clicked] = True
    P[~offered] = np.nan
    Q[~offered] = np.nan
    return P, Q, offered, Q[np.arange(m), clicked].copy(), clicked


def _enum_case(m, k, rng):
    return [np.sort(rng.uniform(0, 100, k)) for _ in range(m)]


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--rows", type=int, default=1_000_000)
    ap.add_argument("--cols", type=int, default=8)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    impls = kernels.available()
    rng = np.random.default_rng(0)
    rows = _rows_case(args.rows, args.cols, rng)
    enum = _enum_case(7, 10, rng)  # 1e7 joint assignments, the oracle guard

    print(f"implementations: {', '.join(sorted(impls))} (active: {kernels.IMPLEMENTATION})")
    results = {}
    for name, mod in sorted(impls.items()):
        t_rows, chosen = _best(lambda: mod.solve_rows(*rows, 1.0, 1.0), args.repeat)
        t_enum, best = _best(lambda: mod.enumerate_min(enum), max(1, args.repeat // 2))
        results[name] = (chosen, best)
        print(f"{name:>7}  solve_rows {args.rows}x{args.cols}: {t_rows * 1e3:9.1f} ms   "
              f"enumerate_min 10^7: {t_enum * 1e3:9.1f} ms")
    if len(results) > 1:
        outs = list(results.values())
        same = all(np.array_equal(outs[0][0], o[0]) and outs[0][1][0] == o[1][0] for o in outs[1:])
        print("outputs identical:", same)


if __name__ == "__main__":
    main()
