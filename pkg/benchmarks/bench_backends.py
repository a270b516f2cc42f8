"""Compare the compiled and pure-numpy bitset backends on the greedy workload.

Usage:
    python benchmarks/bench_backends.py [--n-tests N] [--universe U]
                                        [--ids-per-test K] [--repeat R]

Builds a random suite, then times signature packing, row popcounts, and the
full additional-coverage ordering under each backend. The orders produced by
the two backends are checked to be identical.
"""

import argparse
import time

import numpy as np

from ginirank import _kernels
from ginirank.coverage import CoverageSignature
from ginirank.prioritize import cam, pack_signatures


def build_suite(rng, n_tests, universe, ids_per_test):
    sigs = []
    for _ in range(n_tests):
        ids = np.unique(rng.integers(0, universe, ids_per_test)).astype(np.uint32)
        sigs.append(CoverageSignature(universe, ids))
    return sigs


def best_of(repeat, fn):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-tests", type=int, default=10_000)
    ap.add_argument("--universe", type=int, default=100_000)
    ap.add_argument("--ids-per-test", type=int, default=1000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()

    backends = ["python"]
    try:
        _kernels.get_backend("cython")
        backends.append("cython")
    except ImportError:
        print("compiled backend not built; timing the pure backend only")

    rng = np.random.default_rng(args.seed)
    sigs = build_suite(rng, args.n_tests, args.universe, args.ids_per_test)
    print(f"suite: {args.n_tests} tests, universe {args.universe}, "
          f"~{args.ids_per_test} ids/test")

    t_pack, bits = best_of(args.repeat, lambda: pack_signatures(sigs))
    print(f"pack_signatures          {t_pack * 1e3:10.1f} ms  "
          f"({bits.nbytes / 1e6:.0f} MB packed)")

    times = {}
    orders = {}
    for name in backends:
        kern = _kernels.get_backend(name)
        t_pop, _ = best_of(args.repeat, lambda k=kern: k.popcount_rows(bits))
        t_cam, out = best_of(args.repeat, lambda n=name: cam(sigs, backend=n))
        times[name] = (t_pop, t_cam)
        orders[name] = out.order.order
        print(f"[{name:>6}] popcount_rows {t_pop * 1e3:10.1f} ms   "
              f"cam {t_cam:8.3f} s   (saturation {out.saturation_index})")

    if len(backends) == 2:
        assert np.array_equal(orders["python"], orders["cython"]), "backends disagree"
        p_pop, p_cam = times["python"]
        c_pop, c_cam = times["cython"]
        print(f"speedup (python/cython): popcount {p_pop / c_pop:.2f}x, "
              f"cam {p_cam / c_cam:.2f}x")


if __name__ == "__main__":
    main()
