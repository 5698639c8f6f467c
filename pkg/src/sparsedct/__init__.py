"""Sparse inverse DCT-II for vectors with short support, plus fast DCTs."""

from .periodization import (
    PeriodizedSignal,
    SupportInfo,
    detect_support,
    periodize_to_level,
    reflect_periodize,
    subsample_indices,
    subsample_spectrum,
)
from .recovery import (
    IterationState,
    RecoveryConfig,
    RecoveryInvariantError,
    RecoveryStats,
    Variant,
    collision_step,
    find_nonzero_odd_entry,
    no_collision_step,
    sparse_idct,
    sparse_idct_exact,
)
from .sampling import (
    NoiseSpec,
    SignalSpec,
    SpectrumSource,
    add_noise,
    counting_source,
    generate_signal,
    measured_snr,
    trial_rng,
)
from .transforms import (
    InvalidSignalError,
    TransformKind,
    dct2_fast,
    dct2_naive,
    dct3_fast,
    dct3_naive,
    dct4_fast,
    dct4_naive,
    dst4_naive,
    flop_counter,
    odd_vandermonde_det,
    transform,
)

__version__ = "0.1.0"
