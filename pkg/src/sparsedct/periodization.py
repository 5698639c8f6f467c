"""Reflected periodizations and their support bookkeeping.

The reflected periodization of a vector of length ``2n`` is the length-n
vector ``x[:n] + x[n:][::-1]``.  Starting from ``x`` of length ``2^J`` and
folding repeatedly gives one vector per level ``j <= J``; the DCT-II of each
of them is a scaled, strided subsample of the DCT-II of ``x``.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .transforms import InvalidSignalError, as_signal

__all__ = [
    "SupportInfo",
    "PeriodizedSignal",
    "reflect_periodize",
    "periodize_to_level",
    "subsample_indices",
    "subsample_spectrum",
    "detect_support",
]


@dataclass(frozen=True)
class SupportInfo:
    """Support interval ``[mu, nu]`` of a vector of length ``2^level``.

    Entries inside the interval may be zero; everything outside is.
    """

    mu: int
    length: int
    level: int
    nu: int = field(default=None)

    def __post_init__(self):
        nu = self.mu + self.length - 1
        if self.nu is None:
            object.__setattr__(self, "nu", nu)
        elif self.nu != nu:
            raise ValueError(f"inconsistent support: mu={self.mu}, length={self.length}, nu={self.nu}")
        n = 2**self.level
        if not 1 <= self.length <= n:
            raise ValueError(f"support length {self.length} not in [1, {n}]")
        if not 0 <= self.mu <= n - self.length:
            raise ValueError(f"first support index {self.mu} out of range for length {n}")

    def indices(self):
        return np.arange(self.mu, self.nu + 1)

    def contains(self, other):
        """True if `other`'s interval lies inside this one (same level)."""
        return self.mu <= other.mu and other.nu <= self.nu


@dataclass
class PeriodizedSignal:
    level: int
    values: np.ndarray
    support: Optional[SupportInfo] = None


def reflect_periodize(x):
    """Fold `x` once: ``x[:n] + reverse(x[n:])`` for ``len(x) == 2n``."""
    x = as_signal(x)
    n2 = x.shape[-1]
    if n2 < 2:
        raise InvalidSignalError("cannot periodize a vector of length 1")
    h = n2 // 2
    return x[..., :h] + x[..., : h - 1 : -1]


def periodize_to_level(x, j):
    """Fold `x` (length ``2^J``) down to length ``2^j``."""
    x = as_signal(x)
    J = x.shape[-1].bit_length() - 1
    if not 0 <= j <= J:
        raise ValueError(f"level {j} out of range [0, {J}]")
    out = x.copy()
    for _ in range(J - j):
        out = reflect_periodize(out)
    return out


def subsample_indices(J, j):
    """Spectrum indices whose scaled values give the DCT-II of level `j`."""
    if not 0 <= j <= J:
        raise ValueError(f"level {j} out of range [0, {J}]")
    return np.arange(2**j, dtype=np.int64) << (J - j)


def _read(spectrum, idx):
    if hasattr(spectrum, "read"):
        return spectrum.read(idx)
    return np.asarray(spectrum, dtype=np.float64)[idx]


def subsample_spectrum(spectrum, J, j):
    """DCT-II of the level-`j` periodization, read off the full spectrum.

    Returns ``sqrt(2)^(J-j) * spectrum[2^(J-j) * k]`` for ``k < 2^j``.
    `spectrum` is a :class:`~sparsedct.sampling.SpectrumSource` or an array;
    exactly ``2^j`` entries are read.
    """
    return np.sqrt(2.0) ** (J - j) * _read(spectrum, subsample_indices(J, j))


def detect_support(x, epsilon, offset=0, level=None):
    """Smallest interval holding every entry with ``|x_k| > epsilon``.

    Parameters
    ----------
    x : array_like
        Vector (or a window of one) to scan.
    epsilon : float
        Threshold, ``>= 0``.
    offset : int
        Index of ``x[0]`` in the full level-`level` vector.
    level : int, optional
        Level of the full vector; defaults to ``log2(len(x))``.

    Returns
    -------
    SupportInfo or None
        None when no entry exceeds the threshold.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    x = np.asarray(x, dtype=np.float64)
    if level is None:
        level = x.shape[0].bit_length() - 1
    big = np.flatnonzero(np.abs(x) > epsilon)
    if big.size == 0:
        return None
    first, last = int(big[0]), int(big[-1])
    return SupportInfo(mu=offset + first, length=last - first + 1, level=level)
