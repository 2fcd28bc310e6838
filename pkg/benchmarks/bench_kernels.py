"""Time the compiled kernels against the pure-Python twins.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import time

import numpy as np

from paretolqr import _pykernels, problems
from paretolqr.pareto import brute_force_front, scalar_gain_grid

try:
    from paretolqr import _ckernels
except ImportError:
    _ckernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(mod, rng):
    losses = rng.random((3000, 2))
    net = mod.composition_grid(3, 120) / 120.0
    w = rng.dirichlet(np.ones(3), size=50)
    gains = np.linspace(-1.89, 0.09, 200_000)
    q, r = np.array([1.0, 1.0]), np.array([1.0, 10.0])
    return {
        "dominance_mask 3000x2": lambda: mod.dominance_mask(losses, 0.0),
        f"nearest_index {len(net)} pts x50": lambda: [mod.nearest_index(net, x) for x in w],
        "composition_grid m=4 k=60": lambda: mod.composition_grid(4, 60),
        "scalar_losses 2e5 gains": lambda: mod.scalar_losses(0.9, 1.0, gains, q, r),
        "scalar_dare x2000": lambda: [mod.scalar_dare(0.999, 0.01, 1.0, 10.0, 1e-14, 100_000) for _ in range(2000)],
    }


def bench_brute_force(repeat):
    sys2 = problems.sys2()
    grid = scalar_gain_grid(sys2.dynamics, 0.0005)
    return best_of(lambda: brute_force_front(sys2, grid), repeat)


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if _ckernels is None:
        print("compiled extension not built; only the Python backend is available")
    py = cases(_pykernels, np.random.default_rng(0))
    c = cases(_ckernels, np.random.default_rng(0)) if _ckernels else {}
    print(f"{'kernel':36s} {'python [s]':>12s} {'cython [s]':>12s} {'speedup':>9s}")
    for name, fn in py.items():
        tp = best_of(fn, args.repeat)
        if name in c:
            tc = best_of(c[name], args.repeat)
            print(f"{name:36s} {tp:12.5f} {tc:12.5f} {tp / tc:8.1f}x")
        else:
            print(f"{name:36s} {tp:12.5f} {'-':>12s}")
    print(f"{'brute_force_front SYS-2 step 5e-4':36s} {bench_brute_force(args.repeat):12.5f} (active backend)")


if __name__ == "__main__":
    main()
