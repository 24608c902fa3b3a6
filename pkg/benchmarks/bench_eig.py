#!/usr/bin/env python
"""Benchmark the compiled Jacobi kernel against the pure-python fallback.

Also times numpy.linalg.eigh as an external reference point and a typical
end-to-end workload (an hbar sweep of the 16-node grid family).
"""
import argparse
import time

import numpy as np

from asmlab import asm, quantization
from asmlab._kernels import available_backends, hermitian_eigh


def time_call(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_eig(dims, repeats, rng):
    backends = available_backends()
    print(f"{'dim':>4}  " + "".join(f"{name:>14}" for name in backends)
          + f"{'numpy eigh':>14}{'speedup':>10}")
    for n in dims:
        m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        h = (m + m.conj().T) / 2
        times = {}
        for name, kern in backends.items():
            times[name] = time_call(
                lambda: hermitian_eigh(h, 1e-13, 100, kernel=kern), repeats
            )
        t_np = time_call(lambda: np.linalg.eigh(h), repeats)
        row = f"{n:>4}  " + "".join(f"{times[name]*1e6:>12.1f}us" for name in backends)
        row += f"{t_np*1e6:>12.1f}us"
        if "cython" in times:
            row += f"{times['python']/times['cython']:>9.1f}x"
        print(row)


def bench_sweep(repeats):
    grid = quantization.GridSpace(0.0, 1.0, 16)
    fam = quantization.make_grid_family(grid)
    net = asm.HbarNet.geometric(count=20)

    def run():
        asm.check_asm(fam, net)

    t = time_call(run, repeats)
    print(f"\ngrid-family sweep (N=16, 20 net points): {t*1e3:.1f} ms "
          f"[{list(available_backends())[-1]} kernel active]")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dims", type=int, nargs="+",
                        default=[2, 4, 8, 16, 32, 64])
    parser.add_argument("--repeats", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    names = list(available_backends())
    print(f"available kernels: {names}")
    if "cython" not in names:
        print("note: compiled extension not built; timing the fallback only")
    bench_eig(args.dims, args.repeats, rng)
    bench_sweep(max(3, args.repeats // 5))


if __name__ == "__main__":
    main()
