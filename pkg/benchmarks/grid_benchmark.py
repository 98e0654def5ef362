"""Benchmark the compiled grid kernel against the NumPy fallback.

Both kernels implement the identical classification contract, so the
results are checked for exact agreement while timing.  Run directly:

    python benchmarks/grid_benchmark.py [--sizes 128,256,512] [--horizon 40]
"""

import argparse
import time

from tractlab import gridkernel
from tractlab.gridkernel import Window
from tractlab.models import EntireMapSpec

MAPS = {
    "exp_plus_kappa": EntireMapSpec.exp_plus_kappa(1.0038 + 2.8999j),
    "sinh": EntireMapSpec.sinh(0.575),
    "lambda_expm1": EntireMapSpec.lambda_expm1(0.5),
}
WIN = Window(-4.0, 4.0, -4.0, 4.0)


def _time(backend, spec, size, horizon, repeats=3):
    best = float("inf")
    grid = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        grid = gridkernel.classify_window(
            spec, WIN, (size, size), 50.0, horizon, backend=backend
        )
        best = min(best, time.perf_counter() - t0)
    return best, grid


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="128,256,512")
    parser.add_argument("--horizon", type=int, default=40)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    if gridkernel.BACKEND != "compiled":
        print("compiled kernel unavailable; timing the NumPy kernel only")
        for name, spec in MAPS.items():
            for size in sizes:
                t, _ = _time("numpy", spec, size, args.horizon)
                print(f"{name:16s} {size}x{size}  numpy {t * 1e3:8.2f} ms")
        return

    print(f"{'map':16s} {'size':>9s} {'compiled':>10s} {'numpy':>10s} {'speedup':>8s}")
    for name, spec in MAPS.items():
        for size in sizes:
            tc, gc = _time("compiled", spec, size, args.horizon)
            tn, gn = _time("numpy", spec, size, args.horizon)
            assert (gc == gn).all(), f"backends disagree for {name} at {size}"
            print(
                f"{name:16s} {size:5d}x{size:<4d} {tc * 1e3:8.2f} ms "
                f"{tn * 1e3:8.2f} ms {tn / tc:7.2f}x"
            )


if __name__ == "__main__":
    main()
