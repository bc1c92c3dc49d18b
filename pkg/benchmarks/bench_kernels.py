"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--sizes 18 22 24] [--repeat 3]

Each row is the best of ``--repeat`` runs.  Outputs of the two backends are
checked for equality before timing.
"""
import argparse
import time

import numpy as np

from polyspace import kernels
from polyspace.stochastic import draw_swaps


def best_of(repeat, func, *args):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        func(*args)
        times.append(time.perf_counter() - start)
    return min(times)


def cases(sizes, rng):
    for n in sizes:
        ints = rng.integers(1, 10**6, n).astype(np.int64)
        full = 1 << (n - 1)
        yield f"profile_exact n={n}", "profile_exact", (ints, n - 1, 0, full)
        floats = rng.random(n)
        total = float(np.cumsum(floats)[-1])
        yield f"profile_float n={n}", "profile_float", (floats, n - 1, 0, full, 1e-12 * total, 1e-9 * total)
    rows = rng.random((100_000, 100))
    yield "tau_rows 1e5 x 100", "tau_rows", (rows,)
    lengths = rng.random(100)
    swaps = draw_swaps(rng, 100_000, 99)
    yield "tau_perm 1e5 x 100", "tau_perm", (lengths, swaps)


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[18, 22, 24])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    found = kernels.backends()
    names = sorted(found)
    rng = np.random.default_rng(0)
    print(f"{'kernel':<24}" + "".join(f"{name:>12}" for name in names) + ("     speedup" if len(names) > 1 else ""))
    for label, fname, fargs in cases(args.sizes, rng):
        outputs = [getattr(found[name], fname)(*fargs) for name in names]
        if not all(same(outputs[0], o) for o in outputs[1:]):
            raise SystemExit(f"backends disagree on {label}")
        times = [best_of(args.repeat, getattr(found[name], fname), *fargs) for name in names]
        line = f"{label:<24}" + "".join(f"{t:>11.4f}s" for t in times)
        if len(names) > 1:
            line += f"{times[names.index('python')] / times[names.index('compiled')]:>11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
