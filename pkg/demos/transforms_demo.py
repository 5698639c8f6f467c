"""Fast versus matrix transforms, and the flop count of the recursion."""

import time

import numpy as np

from sparsedct import TransformKind, dct2_fast, dct3_fast, flop_counter, transform


def main():
    rng = np.random.default_rng(0)
    print(f"{'n':>6} {'max |fast - naive|':>20} {'flops':>10} {'flops / (n log2 n)':>20}")
    for t in (4, 6, 8, 10):
        n = 2**t
        x = rng.standard_normal(n)
        err = max(np.abs(transform(x, k, fast=True) - transform(x, k, fast=False)).max() for k in TransformKind)
        with flop_counter() as fc:
            dct2_fast(x)
        print(f"{n:>6} {err:>20.2e} {fc.count:>10} {fc.count / (n * t):>20.2f}")

    x = rng.standard_normal(2**20)
    t0 = time.perf_counter()
    y = dct2_fast(x)
    t1 = time.perf_counter()
    back = dct3_fast(y)
    t2 = time.perf_counter()
    print(f"\nn = 2^20: forward {1e3 * (t1 - t0):.1f} ms, inverse {1e3 * (t2 - t1):.1f} ms, "
          f"roundtrip error {np.abs(back - x).max():.1e}")


if __name__ == "__main__":
    main()
