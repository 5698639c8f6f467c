"""Sparse recovery time against support length, next to a dense inverse at N = 2^20."""

import time

import numpy as np

from sparsedct import RecoveryConfig, SignalSpec, SpectrumSource, dct2_fast, dct3_fast, generate_signal, sparse_idct, trial_rng


def main(trials=20):
    J = 20
    N = 2**J
    dense = []
    print(f"{'m':>6} {'sparse ms':>10} {'samples read':>13}")
    for m in (10, 100, 1000, 10000):
        times, reads = [], []
        for t in range(trials):
            xh = dct2_fast(generate_signal(SignalSpec(J, m, epsilon_floor=1e-4), trial_rng(5, t)))
            src = SpectrumSource(xh)
            t0 = time.perf_counter()
            sparse_idct(src, N, RecoveryConfig(3 * m, 1e-4))
            times.append(time.perf_counter() - t0)
            reads.append(src.distinct_reads)
            if m == 100:
                t0 = time.perf_counter()
                dct3_fast(xh)
                dense.append(time.perf_counter() - t0)
        print(f"{m:>6} {1e3 * np.mean(times):>10.2f} {np.mean(reads):>13.0f}")
    print(f"dense DCT-III: {1e3 * np.mean(dense):.1f} ms")


if __name__ == "__main__":
    main()
