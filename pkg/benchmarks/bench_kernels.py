"""Compare the numba and numpy tally kernels on synthetic event arrays.

    python benchmarks/bench_kernels.py [--events N] [--profiles P] [--repeat R]

Both implementations are run on the same input and their outputs are checked
for equality before timings are reported.
"""

import argparse
import time

import numpy as np

from trustfilter import _kernels


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--events", type=int, default=1_000_000)
    parser.add_argument("--profiles", type=int, default=2_000)
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    n = args.profiles
    src = rng.integers(0, n, args.events)
    dst = (src + rng.integers(1, n, args.events)) % n
    flag = rng.random(args.events) < 0.7
    keys = _kernels._pair_keys(src, dst, n)

    kernels = {
        "tally_pairs": (_kernels.tally_pairs_numpy, _kernels.tally_pairs_numba),
        "accepted_before_block": (_kernels.accepted_before_block_numpy, _kernels.accepted_before_block_numba),
    }
    print(f"{args.events} events, {n} profiles, best of {args.repeat}")
    print(f"{'kernel':<24}{'numpy s':>10}{'numba s':>10}{'speedup':>9}")
    for name, (np_impl, nb_impl) in kernels.items():
        expected = np_impl(keys, flag)
        got = nb_impl(keys, flag)  # also triggers compilation
        if not all(np.array_equal(a, b) for a, b in zip(expected, got)):
            raise SystemExit(f"{name}: numba and numpy outputs differ")
        t_np = best_of(lambda: np_impl(keys, flag), args.repeat)
        t_nb = best_of(lambda: nb_impl(keys, flag), args.repeat)
        print(f"{name:<24}{t_np:>10.4f}{t_nb:>10.4f}{t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
