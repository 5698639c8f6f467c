"""Randomised recovery trials, runtime benchmarks and noise studies.

Every trial draws its signal (and noise) from ``trial_rng(seed, trial)``, so
a row is reproducible from ``(seed, trial)`` and the run parameters alone.
"""

import csv
import json
import math
import platform
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import Dict, List, Optional

import numpy as np

from .recovery import RecoveryConfig, Variant, sparse_idct
from .sampling import RNG_ALGORITHM, NoiseSpec, SignalSpec, SpectrumSource, add_noise, generate_signal, trial_rng
from .transforms import dct2_fast, dct3_fast

__all__ = [
    "BOUND_RULES",
    "DEFAULT_EPSILON_TABLES",
    "MissingThresholdError",
    "TrialRecord",
    "AggregateRow",
    "RunManifest",
    "bound_for",
    "run_trial",
    "run_bench",
    "run_noise_study",
    "aggregate",
    "write_csv",
]

#: ``exact`` runs the exact-length variant with ``M = m``; ``3m`` the bounded one with ``M = 3m``.
BOUND_RULES = ("exact", "3m")

#: Thresholds per SNR (dB) used in the noise study, keyed by support length.
DEFAULT_EPSILON_TABLES = {
    100: {0: 2.50, 10: 2.00, 20: 1.00, 30: 0.40, 40: 0.15, 50: 0.05},
    1000: {0: 2.50, 10: 2.10, 20: 1.50, 30: 0.85, 40: 0.20, 50: 0.10},
}

TRIAL_FIELDS = [
    "row_type",
    "N",
    "m",
    "M",
    "variant",
    "snr_db",
    "epsilon",
    "seed",
    "trial",
    "error_l2_over_N",
    "samples_distinct",
    "elapsed_seconds",
    "baseline_seconds",
    "baseline_error_l2_over_N",
    "support_correct",
    "support_within_3m",
    "collision_branch_count",
    "count",
]

#: Columns that depend on wall-clock time.
TIMING_FIELDS = ("elapsed_seconds", "baseline_seconds")


class MissingThresholdError(ValueError):
    """No threshold is configured for a requested SNR."""


def bound_for(m, rule):
    """Support bound and variant for a bound rule."""
    if rule == "exact":
        return m, Variant.EXACT_LENGTH
    if rule == "3m":
        return 3 * m, Variant.BOUNDED
    raise ValueError(f"unknown bound rule {rule!r}; expected one of {BOUND_RULES}")


@dataclass
class TrialRecord:
    N: int
    m: int
    M: int
    snr_db: float
    epsilon: float
    error_l2_over_N: float
    samples_distinct: int
    elapsed_seconds: float
    support_correct: bool
    support_within_3m: bool
    collision_branch_count: int
    seed: int
    trial: int = 0
    variant: str = Variant.BOUNDED.value
    baseline_seconds: Optional[float] = None
    baseline_error_l2_over_N: Optional[float] = None

    def as_row(self):
        row = asdict(self)
        row["row_type"] = "trial"
        row["count"] = 1
        return row


@dataclass
class AggregateRow:
    """Means over the trials of one (N, m, M, SNR) configuration."""

    N: int
    m: int
    M: int
    variant: str
    snr_db: float
    epsilon: float
    seed: int
    count: int
    error_l2_over_N: float
    elapsed_seconds: float
    baseline_seconds: Optional[float]
    baseline_error_l2_over_N: Optional[float]
    samples_distinct: float
    support_correct: float
    support_within_3m: float
    collision_branch_count: float

    def as_row(self):
        row = asdict(self)
        row["row_type"] = "mean"
        row["trial"] = None
        return row


@dataclass
class RunManifest:
    command: str
    parameters: Dict
    seeds: List[int]
    rng_algorithm: str = RNG_ALGORITHM
    tool_version: str = ""
    numpy_version: str = np.__version__
    python_version: str = platform.python_version()
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    def __post_init__(self):
        if not self.tool_version:
            from . import __version__

            self.tool_version = __version__

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True, default=str)

    def write(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_json() + "\n")


def _support_checks(x, stats, m):
    true_idx = np.flatnonzero(x)
    sup = stats.support
    if sup is None:
        return true_idx.size == 0, true_idx.size == 0
    contained = true_idx.size == 0 or (sup.mu <= true_idx[0] and true_idx[-1] <= sup.nu)
    return bool(contained), bool(contained and sup.length <= 3 * m)


def run_trial(N, m, bound_rule="3m", snr_db=math.inf, epsilon=1e-4, seed=0, trial=0, baseline=False):
    """Draw one signal, recover it from its (noisy) spectrum and score the result.

    The signal endpoints are drawn above `epsilon`.  With ``baseline=True``
    the full-length ``dct3_fast`` of the same spectrum is timed as well.
    """
    J = int(N).bit_length() - 1
    if N < 1 or 2**J != N:
        raise ValueError(f"N must be a power of two, got {N}")
    M, variant = bound_for(m, bound_rule)
    rng = trial_rng(seed, trial)
    x = generate_signal(SignalSpec(J, m, epsilon_floor=epsilon), rng)
    spectrum = dct2_fast(x)
    if not math.isinf(snr_db):
        spectrum = add_noise(spectrum, NoiseSpec(snr_db, seed), rng)

    source = SpectrumSource(spectrum)
    t0 = time.perf_counter()
    x_rec, stats = sparse_idct(source, N, RecoveryConfig(M, epsilon, variant))
    elapsed = time.perf_counter() - t0

    base_t = base_err = None
    if baseline:
        t0 = time.perf_counter()
        x_dense = dct3_fast(spectrum)
        base_t = time.perf_counter() - t0
        base_err = float(np.linalg.norm(x_dense - x) / N)

    correct, within = _support_checks(x, stats, m)
    return TrialRecord(
        N=N,
        m=m,
        M=M,
        snr_db=snr_db,
        epsilon=epsilon,
        error_l2_over_N=float(np.linalg.norm(x_rec - x) / N),
        samples_distinct=stats.samples_distinct,
        elapsed_seconds=elapsed,
        support_correct=correct,
        support_within_3m=within,
        collision_branch_count=stats.collision_count,
        seed=seed,
        trial=trial,
        variant=variant.value,
        baseline_seconds=base_t,
        baseline_error_l2_over_N=base_err,
    )


def _mean(values):
    values = [v for v in values if v is not None]
    return float(np.mean(values)) if values else None


def aggregate(records):
    """One :class:`AggregateRow` over `records` (all from one configuration)."""
    if not records:
        raise ValueError("nothing to aggregate")
    r0 = records[0]
    return AggregateRow(
        N=r0.N,
        m=r0.m,
        M=r0.M,
        variant=r0.variant,
        snr_db=r0.snr_db,
        epsilon=r0.epsilon,
        seed=r0.seed,
        count=len(records),
        error_l2_over_N=_mean([r.error_l2_over_N for r in records]),
        elapsed_seconds=_mean([r.elapsed_seconds for r in records]),
        baseline_seconds=_mean([r.baseline_seconds for r in records]),
        baseline_error_l2_over_N=_mean([r.baseline_error_l2_over_N for r in records]),
        samples_distinct=_mean([r.samples_distinct for r in records]),
        support_correct=_mean([float(r.support_correct) for r in records]),
        support_within_3m=_mean([float(r.support_within_3m) for r in records]),
        collision_branch_count=_mean([r.collision_branch_count for r in records]),
    )


def run_bench(N, m_list, bound_rule="3m", trials=10, seed=0, epsilon=1e-4, baseline=True):
    """Exact-data runtime/error benchmark over several support lengths.

    Support lengths with ``3m > N`` are skipped.

    Returns
    -------
    records : list of TrialRecord
    aggregates : list of AggregateRow
        One per support length that ran at least one trial.
    """
    records, aggregates = [], []
    for m in m_list:
        if 3 * m > N:
            continue
        rows = [
            run_trial(N, m, bound_rule, math.inf, epsilon, seed, t, baseline=baseline) for t in range(trials)
        ]
        records.extend(rows)
        if rows:
            aggregates.append(aggregate(rows))
    return records, aggregates


def epsilon_table_for(m):
    if m not in DEFAULT_EPSILON_TABLES:
        raise MissingThresholdError(f"no default threshold table for m={m}; pass one explicitly")
    return DEFAULT_EPSILON_TABLES[m]


def run_noise_study(N, m, bound_rule="3m", snr_list=(0, 10, 20, 30, 40, 50), epsilon_table=None, trials=100, seed=0):
    """Recovery from noisy spectra at each SNR in `snr_list`.

    The threshold for each SNR comes from `epsilon_table` (defaults depend
    on `m`); an infinite SNR without an entry uses ``1e-4``.

    Returns
    -------
    records : list of TrialRecord
    aggregates : list of AggregateRow
        One per SNR, in the order given.
    """
    if epsilon_table is None:
        epsilon_table = epsilon_table_for(m) if m in DEFAULT_EPSILON_TABLES else {}
    table = {float(k): float(v) for k, v in epsilon_table.items()}
    eps_for = {}
    for snr in snr_list:
        snr = float(snr)
        if snr in table:
            eps_for[snr] = table[snr]
        elif math.isinf(snr):
            eps_for[snr] = 1e-4
        else:
            raise MissingThresholdError(f"no threshold configured for SNR {snr:g} dB")

    records, aggregates = [], []
    for snr, eps in eps_for.items():
        rows = [run_trial(N, m, bound_rule, snr, eps, seed, t) for t in range(trials)]
        records.extend(rows)
        if rows:
            aggregates.append(aggregate(rows))
    return records, aggregates


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path_or_file, records, aggregates=()):
    """Write trial rows followed by aggregate rows with the fixed column set."""
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        writer = csv.DictWriter(fh, fieldnames=TRIAL_FIELDS)
        writer.writeheader()
        for row in [r.as_row() for r in records] + [a.as_row() for a in aggregates]:
            writer.writerow({k: _fmt(row.get(k)) for k in TRIAL_FIELDS})
    finally:
        if own:
            fh.close()
