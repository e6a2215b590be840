"""Compiled vs pure-Python kernels on workloads sized like the solver and simulator calls.

    python benchmarks/bench_kernels.py [--repeat 5] [--n 10]
"""
import argparse
import timeit

import numpy as np

from uwz import _kernels
from uwz.binary import binary_problem, wz_binary_optimizer
from uwz.geometry import expected_cost_per_function
from uwz.sim.code import CodeConfig, SharedRandomness, encode


def workloads(n: int):
    E, D = 0.3, 0.2
    problem = binary_problem(E)
    v = wz_binary_optimizer(E, D).test_channel(problem.fa)
    config = CodeConfig(problem, v, n, 0.1)
    shared = SharedRandomness.draw(config, 1)
    rng = np.random.default_rng(0)
    x = rng.integers(0, 2, size=n).astype(np.int64)
    y = x.copy()
    codes = np.arange(config.base**n, dtype=np.uint64)
    w = np.array([[0.7, 0.3], [0.3, 0.7]])
    dbar = np.ascontiguousarray(expected_cost_per_function(w, problem.d, problem.fa))
    px = np.array([0.5, 0.5])
    allowed = np.ones(dbar.shape, dtype=np.uint8)
    msg = encode(x, config, shared).message
    fa_, fb_, fm_ = shared.f.params
    ga_, gb_, gm_ = shared.g.params
    s = shared.labels[msg.attempt]

    def make(k):
        return {
            "hash_bins": lambda: k.hash_bins(codes, fa_, fb_, fm_),
            "enumerate_support": lambda: k.enumerate_support(x, config.v_active, config.base),
            "decode_scan": lambda: k.decode_scan(y, config.base, 2, fa_, fb_, fm_, s, ga_, gb_, gm_, msg.index),
            "ba_wz_iterate": lambda: k.ba_wz_iterate(px, w, dbar, allowed, 3.0, np.full(dbar.shape, 0.25), 2000, 0.0),
        }

    return make


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--n", type=int, default=10, help="blocklength for the sequence kernels")
    args = ap.parse_args(argv)
    if _kernels.compiled is None:
        raise SystemExit("compiled extension not available; build with pip install -e . --no-build-isolation")
    make = workloads(args.n)
    fast, slow = make(_kernels.compiled), make(_kernels.python)
    print(f"{'kernel':<20}{'cython [ms]':>14}{'python [ms]':>14}{'speedup':>10}")
    for name in fast:
        tc = min(timeit.repeat(fast[name], number=1, repeat=args.repeat)) * 1e3
        tp = min(timeit.repeat(slow[name], number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<20}{tc:>14.3f}{tp:>14.3f}{tp / tc:>10.1f}")


if __name__ == "__main__":
    main()
