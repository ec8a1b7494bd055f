"""Benchmark the compiled pivot kernel against the pure-NumPy fallback.

Two workloads:
  * batches of random dense LPs at increasing sizes (isolates the kernel), and
  * a full exact-solver enumeration of an unpruned 10-period unit-commitment
    instance (1024 pattern LPs, the realistic hot path).

Usage: python benchmarks/bench_simplex.py [--repeats N]
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from helpers import make_instance, make_unit  # noqa: E402
from ucdispatch.instance import StartupCostCurve  # noqa: E402
from ucdispatch.model import build_model  # noqa: E402
from ucdispatch.simplex import available_kernels, solve_dense_lp, use_kernel  # noqa: E402
from ucdispatch.solve import solve_exact  # noqa: E402
from ucdispatch.thinning import thin_all  # noqa: E402


def random_lp_batch(rng, count, rows, cols):
    batch = []
    for _ in range(count):
        A = rng.normal(size=(rows, cols))
        b = rng.uniform(1.0, 30.0, size=rows)
        c = rng.uniform(0.1, 10.0, size=cols)
        senses = [str(rng.choice(["<=", ">=", "="], p=[0.6, 0.25, 0.15]))
                  for _ in range(rows)]
        batch.append((c, A, senses, b))
    return batch


def time_lp_batch(kernel, batch, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        for c, A, senses, b in batch:
            solve_dense_lp(c, A, senses, b, kernel=kernel)
        best = min(best, time.perf_counter() - start)
    return best


def enumeration_instance():
    T = 10
    return make_instance(
        [make_unit(1, shutdown_cost=40.0)],
        demand=tuple(90.0 + 12.0 * k for k in range(T)),
        reserve=(5.0,) * T,
        curves={1: StartupCostCurve(1, {t: 150.0 + 40.0 * t
                                        for t in range(1, 7)})})


def time_enumeration(kernel_name, model, repeats):
    best = float("inf")
    with use_kernel(kernel_name):
        for _ in range(repeats):
            start = time.perf_counter()
            solution = solve_exact(model)
            best = min(best, time.perf_counter() - start)
            assert solution.status == "optimal"
    return best


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args(argv)

    kernels = list(available_kernels())
    if len(kernels) < 2:
        print("note: compiled kernel not available, timing the fallback only")

    rng = np.random.default_rng(1)
    print(f"{'workload':<34}" + "".join(f"{k:>12}" for k in kernels)
          + (f"{'speedup':>10}" if len(kernels) > 1 else ""))

    for rows, cols, count in [(20, 30, 60), (50, 70, 30), (100, 140, 12)]:
        batch = random_lp_batch(rng, count, rows, cols)
        times = {k: time_lp_batch(k, batch, args.repeats) for k in kernels}
        label = f"{count} random LPs {rows}x{cols}"
        line = f"{label:<34}" + "".join(f"{times[k]:>11.3f}s" for k in kernels)
        if len(kernels) > 1:
            line += f"{times['python'] / times['cython']:>9.1f}x"
        print(line)

    instance = enumeration_instance()
    model = build_model(instance, thin_all(instance))
    times = {k: time_enumeration(k, model, args.repeats) for k in kernels}
    label = "exact solve, 1024 patterns"
    line = f"{label:<34}" + "".join(f"{times[k]:>11.3f}s" for k in kernels)
    if len(kernels) > 1:
        line += f"{times['python'] / times['cython']:>9.1f}x"
    print(line)


if __name__ == "__main__":
    main()
