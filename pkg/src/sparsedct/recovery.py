"""Sparse fast inverse DCT-II for vectors with one-block support.

Given read access to the DCT-II spectrum of ``x`` (length ``N = 2^J``) and a
bound ``M`` on the support length of ``x``, :func:`sparse_idct` rebuilds
``x`` level by level from its reflected periodizations.  It starts with a
dense DCT-III of length ``2^L`` (``L = ceil(log2 M) + 1``) and then doubles
the length ``J - L`` times.  Each doubling is one of two steps:

* :func:`no_collision_step` - the support of the current level is not in its
  last ``M`` entries, so the next level is either ``(x; 0)`` or
  ``(0; reverse(x))``.  One odd spectrum entry decides which.
* :func:`collision_step` - the support sits in the last ``M`` entries and
  entries from both halves of the next level may have been summed.  They
  are separated with one short DCT-IV.  For exact data this happens at
  most once per run.

Iteration states store only the support block, so a full run costs
``O(M log M + m log(N/M))`` operations apart from building the output.
"""

import enum
import math
import time
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional

import numpy as np

from .periodization import SupportInfo, detect_support, subsample_spectrum
from .sampling import SpectrumSource
from .transforms import InvalidSignalError, dct3_fast, dct4_fast

__all__ = [
    "RecoveryInvariantError",
    "Variant",
    "RecoveryConfig",
    "IterationState",
    "RecoveryStats",
    "start_level",
    "find_nonzero_odd_entry",
    "no_collision_step",
    "collision_step",
    "initial_state",
    "sparse_idct",
    "sparse_idct_exact",
]


_SQRT2 = math.sqrt(2.0)


class RecoveryInvariantError(RuntimeError):
    """An internal invariant of the recovery iteration was violated."""


class Variant(enum.Enum):
    BOUNDED = "bounded"
    EXACT_LENGTH = "exact"


def _ceil_log2(n):
    return (int(n) - 1).bit_length()


def start_level(bound):
    """``L = ceil(log2 M) + 1``."""
    return _ceil_log2(bound) + 1


@dataclass(frozen=True)
class RecoveryConfig:
    """Support bound ``M`` (or the exact length ``m``), threshold and variant."""

    support_bound: int
    epsilon: float = 1e-4
    variant: Variant = Variant.BOUNDED

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if int(self.support_bound) != self.support_bound or self.support_bound < 1:
            raise ValueError(f"support bound must be a positive integer, got {self.support_bound}")
        if not np.isfinite(self.epsilon) or self.epsilon <= 0:
            raise ValueError(f"epsilon must be finite and positive, got {self.epsilon}")

    @property
    def start_level(self):
        return start_level(self.support_bound)


@dataclass
class IterationState:
    """Level-`level` periodization, stored as its support block.

    ``block`` holds the entries ``mu .. mu + len(block) - 1``; everything
    else is zero.  An empty block means no entry survived thresholding.
    """

    level: int
    mu: int
    block: np.ndarray

    @property
    def support(self) -> Optional[SupportInfo]:
        if self.block.size == 0:
            return None
        return SupportInfo(mu=self.mu, length=self.block.size, level=self.level)

    @property
    def length(self):
        return self.block.size

    @property
    def nu(self):
        return self.mu + self.block.size - 1

    def dense(self):
        out = np.zeros(2**self.level)
        out[self.mu : self.mu + self.block.size] = self.block
        return out


@dataclass
class RecoveryStats:
    samples_distinct: int = 0
    samples_total: int = 0
    start_level: int = 0
    branches: List[str] = field(default_factory=list)
    collision_count: int = 0
    collision_window: Optional[int] = None
    support: Optional[SupportInfo] = None
    empty_support: bool = False
    fallback_dense: bool = False
    elapsed_seconds: float = 0.0
    warnings: List[str] = field(default_factory=list)
    trace: List[IterationState] = field(default_factory=list)

    def as_record(self):
        """JSON-serialisable summary (the trace is omitted)."""
        sup = self.support
        return {
            "samples_distinct": self.samples_distinct,
            "samples_total": self.samples_total,
            "start_level": self.start_level,
            "branches": list(self.branches),
            "collision_count": self.collision_count,
            "collision_window": self.collision_window,
            "support_mu": None if sup is None else sup.mu,
            "support_length": None if sup is None else sup.length,
            "empty_support": self.empty_support,
            "fallback_dense": self.fallback_dense,
            "elapsed_seconds": self.elapsed_seconds,
            "warnings": list(self.warnings),
        }


def _spectrum_level(spectrum):
    n = len(spectrum)
    if n < 1 or n & (n - 1):
        raise InvalidSignalError(f"spectrum length must be a power of two, got {n}")
    return n.bit_length() - 1


def _read(spectrum, idx):
    if hasattr(spectrum, "read"):
        return spectrum.read(idx)
    return np.asarray(spectrum, dtype=np.float64)[idx]


@lru_cache(maxsize=256)
def _odd(m):
    # 1, 3, 5, ..., 2m - 1
    out = 2 * np.arange(m, dtype=np.int64) + 1
    out.setflags(write=False)
    return out


def _odd_samples(spectrum, J, j, m_j):
    shift = J - j - 1
    vals = _read(spectrum, _odd(min(m_j, 2**j)) << shift)
    k0 = int(np.argmax(np.abs(vals)))
    return k0, float(vals[k0]) * _SQRT2**shift


def find_nonzero_odd_entry(spectrum, J, j, m_j):
    """Largest of the first `m_j` odd entries of the level-(j+1) spectrum.

    Reads ``sqrt(2)^(J-j-1) * spectrum[2^(J-j-1) (2k+1)]`` for ``k < m_j``
    and returns ``(k0, alpha)`` with ``k0`` the (smallest) index of largest
    magnitude and ``alpha`` the corresponding scaled value.
    """
    if m_j < 1:
        raise ValueError("m_j must be at least 1")
    if not 0 <= j < J:
        raise ValueError(f"level {j} out of range [0, {J})")
    return _odd_samples(spectrum, J, j, m_j)


def no_collision_step(state, spectrum):
    """Extend `state` by one level when the next level is a pure shift/reflection.

    The next level is either ``u0 = (x; 0)`` or ``u1 = (0; J x)``.  Their odd
    DCT-II entries differ only in sign, so one entry of ``u0``'s spectrum
    computed in ``O(m)`` from the block is compared with the measured value.
    """
    if state.block.size == 0:
        raise ValueError("cannot extend an empty support")
    return _no_collision(state, spectrum, _spectrum_level(spectrum))[0]


def _no_collision(state, spectrum, J):
    j = state.level
    m_j = state.block.size
    k0, alpha = _odd_samples(spectrum, J, j, m_j)
    # cos(pi p / 2^(j+2)) has period 2^(j+3) in the integer p
    phase = ((2 * k0 + 1) * (2 * state.mu + _odd(m_j))) & (2 ** (j + 3) - 1)
    cosines = np.cos(phase * (np.pi / 2 ** (j + 2)))
    u0_hat = float(cosines @ state.block) / _SQRT2**j
    if abs(u0_hat - alpha) < abs(u0_hat + alpha):
        return IterationState(level=j + 1, mu=state.mu, block=state.block), "u0"
    nxt = IterationState(level=j + 1, mu=2 ** (j + 1) - m_j - state.mu, block=state.block[::-1].copy())
    return nxt, "u1"


def _best_window(values, length):
    # start of the length-`length` slice with the largest energy
    energy = np.concatenate([[0.0], np.cumsum(values * values)])
    sums = energy[length:] - energy[:-length]
    return int(np.argmax(sums))


def collision_step(state, spectrum, epsilon, exact_length=None, max_window_level=None):
    """Extend `state` by one level when its support lies in the last ``M`` entries.

    With ``mt = 2^j - mu`` and ``w = 2^(ceil(log2 mt))`` the new level is
    nonzero only on ``[2^j - w, 2^j + w)``.  Its left half is

        z0 = ( s * J diag(1/c) D C4 J (b0 - b1) + z ) / 2,

    where ``z`` is the last ``w`` entries of the current level, ``b0, b1``
    are ``2w`` odd spectrum samples of the next level, ``c_k =
    cos((2k+1) pi / 2^(j+2))`` and ``s = +-sqrt(2^(j - K))``.  The right half
    follows from ``z = z0 + J z1``.

    Parameters
    ----------
    exact_length : int, optional
        When the support length ``m`` is known exactly, the new support is
        searched only in ``[2^j - mt, 2^j + mt)`` and trimmed to at most
        ``m`` entries.
    max_window_level : int, optional
        Upper limit for ``K``.  Only noisy data can exceed it; the window is
        then shortened with a :class:`RuntimeWarning`.

    Returns
    -------
    state : IterationState
        Level ``j + 1``; empty block when nothing survives thresholding.
    K : int
        Window exponent actually used.
    """
    J = _spectrum_level(spectrum)
    j = state.level
    if state.block.size == 0:
        raise RecoveryInvariantError("collision step needs a nonempty support")
    m_t = 2**j - state.mu
    K = _ceil_log2(m_t) + 1
    if max_window_level is not None and K > max_window_level:
        msg = (
            f"collision window at level {j} needs 2^{K - 1} entries; "
            f"clamped to 2^{max_window_level - 1}, leading support entries dropped"
        )
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        K = max_window_level
        m_t = min(m_t, 2 ** (K - 1))
    if K > j:
        raise RecoveryInvariantError(f"collision window 2^{K - 1} exceeds half of level {j}")
    w = 2 ** (K - 1)
    start = 2**j - w

    z = np.zeros(w)
    skip = max(start - state.mu, 0)
    z[state.mu + skip - start : state.mu - start + state.block.size] = state.block[skip:]

    shift = J - j - 1
    centers = (2 * np.arange(w, dtype=np.int64) + 1) << (J - K)
    scale = np.sqrt(2.0) ** shift
    b0 = scale * _read(spectrum, centers + (1 << shift))
    b1 = scale * _read(spectrum, centers - (1 << shift))

    t = dct4_fast((b0 - b1)[::-1])
    t[1::2] *= -1.0
    t /= np.cos((2 * np.arange(w) + 1) * np.pi / (4.0 * 2**j))
    sign = -1.0 if j == K else 1.0
    z0 = 0.5 * (sign * np.sqrt(2.0 ** (j - K)) * t[::-1] + z)
    z0[np.abs(z0) <= epsilon] = 0.0
    z1 = (z - z0)[::-1]
    window = np.concatenate([z0, z1])

    lo = 0
    if exact_length is not None:
        lo = w - m_t
        window = window[lo : 2 * w - lo]
    found = detect_support(window, epsilon, offset=start + lo, level=j + 1)
    if found is None:
        return IterationState(level=j + 1, mu=0, block=np.empty(0)), K
    a = found.mu - start - lo
    block = window[a : a + found.length].copy()
    mu = found.mu
    if exact_length is not None and block.size > exact_length:
        shift_by = _best_window(block, exact_length)
        block = block[shift_by : shift_by + exact_length].copy()
        mu += shift_by
    return IterationState(level=j + 1, mu=mu, block=block), K


def initial_state(spectrum, L, epsilon, exact_length=None):
    """Dense DCT-III of the level-`L` spectrum, reduced to its support block."""
    J = _spectrum_level(spectrum)
    xL = dct3_fast(subsample_spectrum(spectrum, J, L))
    found = detect_support(xL, epsilon)
    if found is None:
        return IterationState(level=L, mu=0, block=np.empty(0))
    block = xL[found.mu : found.nu + 1].copy()
    mu = found.mu
    if exact_length is not None and block.size > exact_length:
        shift_by = _best_window(block, exact_length)
        block = block[shift_by : shift_by + exact_length].copy()
        mu += shift_by
    return IterationState(level=L, mu=mu, block=block)


def _as_source(spectrum):
    if isinstance(spectrum, SpectrumSource) or hasattr(spectrum, "read"):
        return spectrum
    return SpectrumSource(spectrum)


def sparse_idct(spectrum, N, config, trace=False):
    """Recover a vector with short support from its DCT-II.

    Parameters
    ----------
    spectrum : SpectrumSource or array_like
        The (possibly noisy) DCT-II of the unknown vector.  Arrays are
        wrapped in a fresh :class:`SpectrumSource`.
    N : int
        Vector length, a power of two equal to ``len(spectrum)``.
    config : RecoveryConfig
    trace : bool
        Keep every intermediate :class:`IterationState` in ``stats.trace``.

    Returns
    -------
    x : ndarray of length N
    stats : RecoveryStats
    """
    t0 = time.perf_counter()
    source = _as_source(spectrum)
    J = _spectrum_level(source)
    if len(source) != N:
        raise InvalidSignalError(f"spectrum length {len(source)} does not match N={N}")
    if config.support_bound > N:
        raise ValueError(f"support bound {config.support_bound} exceeds N={N}")
    exact = config.variant is Variant.EXACT_LENGTH
    M = config.support_bound
    eps = config.epsilon
    L = start_level(M)
    stats = RecoveryStats(start_level=L)
    before_distinct = source.distinct_reads
    before_total = source.total_reads

    if L >= J:
        x = dct3_fast(source.read(np.arange(N)))
        stats.fallback_dense = True
        stats.branches.append("dense")
        stats.support = detect_support(x, eps)
        stats.empty_support = stats.support is None
        return x, _finish(stats, source, before_distinct, before_total, t0)

    state = initial_state(source, L, eps, exact_length=M if exact else None)
    stats.branches.append("init")
    if trace:
        stats.trace.append(state)

    for j in range(L, J):
        if state.block.size == 0:
            break
        in_tail = state.mu >= 2**j - M
        if exact:
            in_tail = in_tail and (state.block.size < M or state.nu == 2**j - 1)
        if in_tail:
            if stats.collision_count:
                msg = f"collision branch entered again at level {j}"
                stats.warnings.append(msg)
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                state, K = collision_step(
                    state, source, eps, exact_length=M if exact else None, max_window_level=L
                )
            for item in caught:
                stats.warnings.append(str(item.message))
            stats.collision_count += 1
            stats.collision_window = 2 ** (K - 1)
            stats.branches.append("collision")
        else:
            state, branch = _no_collision(state, source, J)
            stats.branches.append(branch)
        if trace:
            stats.trace.append(state)

    x = np.zeros(N)
    if state.block.size == 0:
        stats.empty_support = True
    else:
        if state.level != J:
            raise RecoveryInvariantError(f"iteration stopped at level {state.level} < {J}")
        x[state.mu : state.mu + state.block.size] = state.block
        stats.support = state.support
    return x, _finish(stats, source, before_distinct, before_total, t0)


def _finish(stats, source, before_distinct, before_total, t0):
    stats.samples_total = source.total_reads - before_total
    stats.samples_distinct = source.distinct_reads - before_distinct
    stats.elapsed_seconds = time.perf_counter() - t0
    return stats


def sparse_idct_exact(spectrum, N, m, epsilon=1e-4, trace=False):
    """:func:`sparse_idct` for an exactly known support length `m`."""
    return sparse_idct(spectrum, N, RecoveryConfig(m, epsilon, Variant.EXACT_LENGTH), trace=trace)
