"""Spectrum access with read accounting, noise injection and test signals."""

import math
import threading
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .transforms import InvalidSignalError, as_signal

__all__ = [
    "RNG_ALGORITHM",
    "SpectrumSource",
    "counting_source",
    "NoiseSpec",
    "add_noise",
    "measured_snr",
    "SignalSpec",
    "generate_signal",
    "trial_rng",
]

#: Bit generator used for every random draw in the package.
RNG_ALGORITHM = "numpy.random.PCG64 via SeedSequence"


class SpectrumSource:
    """Read-only access to the entries of a DCT-II spectrum.

    Every call to :meth:`read` is recorded.  ``total_reads`` counts each
    requested index, ``distinct_reads`` counts each index once no matter
    how often it was requested.

    Parameters
    ----------
    backing : array_like or callable
        Either the full spectrum, or a function mapping an integer index
        array to the corresponding values.
    length : int, optional
        Spectrum length; required when `backing` is callable.
    """

    def __init__(self, backing, length=None):
        if callable(backing):
            if length is None:
                raise ValueError("length is required for a callable backing")
            self._values = None
            self._fetch = backing
            self.length = int(length)
        else:
            self._values = as_signal(backing, "spectrum")
            if self._values.ndim != 1:
                raise InvalidSignalError("spectrum must be one-dimensional")
            self._fetch = None
            self.length = self._values.shape[0]
        self._chunks = []
        self._total = 0
        self._lock = threading.Lock()

    def __len__(self):
        return self.length

    def read(self, indices):
        """Return the spectrum entries at `indices` (int or int array)."""
        idx = np.asarray(indices, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= self.length):
            raise IndexError(
                f"spectrum index out of range [0, {self.length}): "
                f"{int(idx.min())}..{int(idx.max())}"
            )
        if self._values is not None:
            out = self._values[idx]
        else:
            out = np.asarray(self._fetch(idx), dtype=np.float64)
        with self._lock:
            self._chunks.append(idx.ravel())
            self._total += idx.size
        return out

    @property
    def total_reads(self):
        return self._total

    def distinct_indices(self):
        """Sorted array of every index read so far."""
        with self._lock:
            if not self._chunks:
                return np.empty(0, dtype=np.int64)
            merged = np.unique(np.concatenate(self._chunks))
            self._chunks = [merged]
        return merged

    @property
    def distinct_reads(self):
        return int(self.distinct_indices().size)

    def reset(self):
        with self._lock:
            self._chunks = []
            self._total = 0


def counting_source(spectrum):
    """Wrap a spectrum array in a :class:`SpectrumSource`."""
    return SpectrumSource(spectrum)


@dataclass(frozen=True)
class NoiseSpec:
    """Additive uniform noise at a prescribed SNR in dB (``inf`` = no noise)."""

    snr_db: float
    seed: int = 0

    def __post_init__(self):
        if math.isnan(self.snr_db) or self.snr_db == -math.inf:
            raise ValueError(f"invalid SNR: {self.snr_db}")


def measured_snr(clean, noisy):
    """``20 log10(||clean|| / ||noisy - clean||)`` in dB."""
    clean = np.asarray(clean, dtype=np.float64)
    eta = np.asarray(noisy, dtype=np.float64) - clean
    eta_norm = np.linalg.norm(eta)
    if eta_norm == 0:
        return math.inf
    return 20.0 * math.log10(np.linalg.norm(clean) / eta_norm)


def add_noise(spectrum, noise, rng=None):
    """Return ``spectrum + eta`` with ``eta`` uniform noise at ``noise.snr_db``.

    The noise entries are drawn i.i.d. from U[-1, 1] and rescaled so the
    realised SNR equals the requested one.  `rng` overrides the generator
    seeded from ``noise.seed``.
    """
    x = as_signal(spectrum, "spectrum")
    if math.isinf(noise.snr_db):
        return x.copy()
    norm_x = np.linalg.norm(x)
    if norm_x == 0:
        raise InvalidSignalError("cannot set a finite SNR for a zero spectrum")
    if rng is None:
        rng = np.random.default_rng(noise.seed)
    eta = rng.uniform(-1.0, 1.0, size=x.shape)
    eta *= norm_x / (np.linalg.norm(eta) * 10.0 ** (noise.snr_db / 20.0))
    return x + eta


@dataclass(frozen=True)
class SignalSpec:
    """Parameters of a random short-support test vector of length 2^J."""

    J: int
    m: int
    mu: Optional[int] = None
    epsilon_floor: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if self.J < 0:
            raise ValueError("J must be nonnegative")
        if not 1 <= self.m <= 2**self.J:
            raise ValueError(f"support length m={self.m} not in [1, 2^J={2**self.J}]")
        if self.mu is not None and not 0 <= self.mu <= 2**self.J - self.m:
            raise ValueError(f"first support index mu={self.mu} out of range")
        if not 0 <= self.epsilon_floor < 10:
            raise ValueError("epsilon_floor must lie in [0, 10)")


def _uniform_left_open(rng, low, high, size=None):
    # samples from (low, high]
    return high - rng.uniform(0.0, high - low, size=size)


def generate_signal(spec, rng=None):
    """Draw a nonnegative vector with one-block support of length ``spec.m``.

    The first and last support entries are uniform on ``(epsilon_floor, 10]``,
    the interior uniform on ``(0, 10]``, and a random subset of at most
    ``(m - 2) // 2`` interior entries is set to zero.

    Returns
    -------
    x : ndarray of length ``2**spec.J``
    """
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    n = 2**spec.J
    m = spec.m
    mu = spec.mu if spec.mu is not None else int(rng.integers(0, n - m + 1))
    x = np.zeros(n)
    block = _uniform_left_open(rng, 0.0, 10.0, size=m)
    block[0] = _uniform_left_open(rng, spec.epsilon_floor, 10.0)
    block[-1] = _uniform_left_open(rng, spec.epsilon_floor, 10.0)
    if m > 2:
        n_zero = int(rng.integers(0, (m - 2) // 2 + 1))
        if n_zero:
            block[1 + rng.choice(m - 2, size=n_zero, replace=False)] = 0.0
    x[mu : mu + m] = block
    return x


def trial_rng(seed, trial):
    """Independent generator for trial number `trial` of a run seeded by `seed`."""
    return np.random.default_rng([int(seed), int(trial)])
