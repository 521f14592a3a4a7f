"""Compare the compiled and numpy kernels on the Monte Carlo hot loop.

    python benchmarks/bench_kernel.py [--iterations 200000] [--n 5 46 200 1000]
"""
import argparse
import time

import numpy as np

from bsppcc import kernels
from bsppcc.montecarlo import SimConfig, _plot_quantiles, simulate_null_r


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--iterations", type=int, default=200_000)
    ap.add_argument("--n", type=int, nargs="+", default=[5, 46, 200, 1000])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = sorted(kernels.BACKENDS)
    print(f"default backend: {kernels.BACKEND}; I={args.iterations}")
    print(f"{'n':>6} {'stage':>10} " + " ".join(f"{b:>10}" for b in backends) + "   speedup")
    for n in args.n:
        z = np.random.default_rng(0).standard_normal((max(1, (1 << 20) // n), n))
        q = _plot_quantiles(n)
        kern = {b: best_of(lambda: kernels.BACKENDS[b](z.copy(), 1.0, q), args.repeat)
                for b in backends}
        cfg = SimConfig(n, args.iterations, 1)
        full = {b: best_of(lambda: simulate_null_r(cfg, backend=b), 1) for b in backends}
        for stage, res in (("kernel", kern), ("end2end", full)):
            cells = " ".join(f"{res[b]:9.3f}s" for b in backends)
            speed = (f"{res['python'] / res['compiled']:8.2f}x"
                     if "compiled" in res else "       -")
            print(f"{n:>6} {stage:>10} {cells} {speed}")


if __name__ == "__main__":
    main()
