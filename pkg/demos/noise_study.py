"""Support recovery rate and error against SNR for m = 100 at N = 2^16."""

from sparsedct.experiments import run_noise_study


def main():
    snrs = [0, 10, 20, 30, 40, 50]
    for rule in ("3m", "exact"):
        _, aggs = run_noise_study(2**16, 100, rule, snrs, trials=100, seed=1)
        print(f"bound rule {rule}")
        print(f"  {'SNR dB':>6} {'eps':>6} {'support ok':>11} {'mean ||x - x_rec|| / N':>24}")
        for a in aggs:
            print(f"  {a.snr_db:>6g} {a.epsilon:>6g} {100 * a.support_correct:>10.1f}% {a.error_l2_over_N:>24.3e}")


if __name__ == "__main__":
    main()
