"""Orthonormal cosine and sine transforms of dyadic length.

Every transform comes in two flavours: a dense ``*_naive`` variant that
multiplies by the explicit matrix (O(n^2), used as an oracle) and a
``*_fast`` variant that runs in O(n log n) using only real arithmetic.

The fast DCT-II uses the even/odd split

    C2_n = P_n^T  diag(C2_{n/2}, C4_{n/2})  T_n,

and the DCT-IV is reduced to two half-length DCT-IIs by a Givens rotation
stage on the pairs ``(x_l, x_{n-1-l})`` followed by an add/subtract stage.
Both reductions are orthogonal, so the transposed recursion gives the
DCT-III (and a second, independent DCT-IV path since ``C4 = C4^T``).

All recursions are evaluated breadth-first: at every level the pending
DCT-II and DCT-IV subproblems are stacked into 2-D arrays, so the number of
Python-level steps is ``log2 n`` regardless of the transform length.
"""

import enum
import threading
from contextlib import contextmanager
from functools import lru_cache

import numpy as np

__all__ = [
    "InvalidSignalError",
    "TransformKind",
    "as_signal",
    "epsilon_weight",
    "dct2_matrix",
    "dct4_matrix",
    "dst4_matrix",
    "dct2_naive",
    "dct3_naive",
    "dct4_naive",
    "dst4_naive",
    "dct2_fast",
    "dct3_fast",
    "dct4_fast",
    "dct4_fast_transposed",
    "transform",
    "even_odd_permutation",
    "even_odd_matrix",
    "butterfly",
    "butterfly_matrix",
    "counter_identity",
    "sign_diagonal",
    "odd_vandermonde_det",
    "flop_counter",
]

SQRT1_2 = np.sqrt(0.5)

# below this length the recursion hands over to a dense product
_LEAF = 16


class InvalidSignalError(ValueError):
    """Raised for inputs that are not finite real vectors of length 2^j."""


class TransformKind(enum.Enum):
    DCT2 = "dct2"
    DCT3 = "dct3"
    DCT4 = "dct4"
    DST4 = "dst4"


def _is_power_of_two(n):
    return n >= 1 and (n & (n - 1)) == 0


def as_signal(x, name="x"):
    """Return `x` as a float64 array whose last axis is a valid signal.

    Raises
    ------
    InvalidSignalError
        If the last axis is not a power of two or any entry is NaN/Inf.
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 0:
        raise InvalidSignalError(f"{name} must be a vector, got a scalar")
    n = arr.shape[-1]
    if not _is_power_of_two(n):
        raise InvalidSignalError(f"length of {name} must be a power of two, got {n}")
    if not np.all(np.isfinite(arr)):
        raise InvalidSignalError(f"{name} contains NaN or Inf")
    return arr


def epsilon_weight(k, n):
    """Normalisation weight: 1/sqrt(2) if ``k % n == 0`` else 1."""
    return SQRT1_2 if k % n == 0 else 1.0


# -- flop accounting ---------------------------------------------------------

_tally = threading.local()


class FlopCount:
    def __init__(self):
        self.count = 0


@contextmanager
def flop_counter():
    """Count floating-point operations done by the fast transforms.

    Only the butterfly/rotation stages are instrumented; slicing and
    reversal are free.  Counting is per thread.

    >>> with flop_counter() as fc:
    ...     _ = dct2_fast(np.ones(8))
    >>> fc.count > 0
    True
    """
    fc = FlopCount()
    previous = getattr(_tally, "active", None)
    _tally.active = fc
    try:
        yield fc
    finally:
        _tally.active = previous


def _add_flops(k):
    fc = getattr(_tally, "active", None)
    if fc is not None:
        fc.count += int(k)


# -- dense oracles -----------------------------------------------------------


def _readonly(a):
    a.setflags(write=False)
    return a


@lru_cache(maxsize=32)
def dct2_matrix(n):
    """The orthonormal DCT-II matrix of size n (cached, read-only)."""
    k = np.arange(n)[:, None]
    l = np.arange(n)[None, :]
    c = np.sqrt(2.0 / n) * np.cos(k * (2 * l + 1) * np.pi / (2 * n))
    c[0, :] *= SQRT1_2
    return _readonly(c)


@lru_cache(maxsize=32)
def dct4_matrix(n):
    """The orthonormal (symmetric) DCT-IV matrix of size n."""
    k = np.arange(n)[:, None]
    l = np.arange(n)[None, :]
    return _readonly(np.sqrt(2.0 / n) * np.cos((2 * k + 1) * (2 * l + 1) * np.pi / (4 * n)))


@lru_cache(maxsize=32)
def dst4_matrix(n):
    """The orthonormal DST-IV matrix of size n."""
    k = np.arange(n)[:, None]
    l = np.arange(n)[None, :]
    return _readonly(np.sqrt(2.0 / n) * np.sin((2 * k + 1) * (2 * l + 1) * np.pi / (4 * n)))


def dct2_naive(x):
    """DCT-II by direct matrix-vector product."""
    x = as_signal(x)
    return x @ dct2_matrix(x.shape[-1]).T


def dct3_naive(x):
    """DCT-III (inverse DCT-II) by direct product with ``C2^T``."""
    x = as_signal(x)
    return x @ dct2_matrix(x.shape[-1])


def dct4_naive(x):
    x = as_signal(x)
    return x @ dct4_matrix(x.shape[-1])


def dst4_naive(x):
    x = as_signal(x)
    return x @ dst4_matrix(x.shape[-1]).T


# -- structural building blocks ---------------------------------------------


def even_odd_permutation(x):
    """``P_n x``: even-indexed entries followed by odd-indexed ones."""
    x = np.asarray(x, dtype=np.float64)
    return np.concatenate([x[..., 0::2], x[..., 1::2]], axis=-1)


def even_odd_matrix(n):
    return np.eye(n)[np.r_[0:n:2, 1:n:2]]


def butterfly(x):
    """``T_n x = (x0 + J x1, x0 - J x1) / sqrt(2)`` for the halves x0, x1."""
    x = np.asarray(x, dtype=np.float64)
    h = x.shape[-1] // 2
    x0 = x[..., :h]
    x1r = x[..., : h - 1 : -1] if h > 0 else x[..., :0]
    return np.concatenate([x0 + x1r, x0 - x1r], axis=-1) * SQRT1_2


def butterfly_matrix(n):
    h = n // 2
    eye = np.eye(h)
    rev = eye[::-1]
    return SQRT1_2 * np.block([[eye, rev], [eye, -rev]])


def counter_identity(x):
    """``J_n x``: reversal."""
    return np.asarray(x, dtype=np.float64)[..., ::-1].copy()


def sign_diagonal(x):
    """``D_n x`` with ``D_n = diag((-1)^k)``."""
    x = np.array(x, dtype=np.float64)
    x[..., 1::2] *= -1.0
    return x


# -- fast transforms ---------------------------------------------------------


@lru_cache(maxsize=64)
def _rotation(n):
    # cos/sin((2l+1) pi / (4n)) for l < n/2, alternating signs
    h = n // 2
    theta = (2 * np.arange(h) + 1) * np.pi / (4 * n)
    signs = np.ones(h)
    signs[1::2] = -1.0
    return _readonly(np.cos(theta)), _readonly(np.sin(theta)), _readonly(signs)


def _forward(a, b):
    """Return ``(a @ C2^T, b @ C4)`` for row batches `a` and `b`."""
    n = a.shape[1]
    if n == 1:
        return a.copy(), b.copy()
    if n <= _LEAF:
        _add_flops((a.shape[0] + b.shape[0]) * (2 * n * n - n))
        return a @ dct2_matrix(n).T, b @ dct4_matrix(n)
    h = n // 2
    p, q = a.shape[0], b.shape[0]

    # T_n on the DCT-II rows
    a0 = a[:, :h]
    a1r = a[:, : h - 1 : -1]
    even_in = (a0 + a1r) * SQRT1_2
    odd_in = (a0 - a1r) * SQRT1_2

    # rotation of (b_l, b_{n-1-l}) for the DCT-IV rows
    c, s, signs = _rotation(n)
    b0 = b[:, :h]
    b1r = b[:, : h - 1 : -1]
    u = b0 * c + b1r * s
    w = (b1r * c - b0 * s) * signs
    _add_flops(2 * p * n + 7 * q * h)

    y2, y4 = _forward(np.vstack([even_in, u, w]), odd_in)

    out_a = np.empty((p, n))
    out_a[:, 0::2] = y2[:p]
    out_a[:, 1::2] = y4

    uh = y2[p : p + q]
    wh = y2[p + q :]
    out_b = np.empty((q, n))
    out_b[:, 0] = uh[:, 0]
    out_b[:, n - 1] = -wh[:, 0]
    if h > 1:
        out_b[:, 2::2] = (uh[:, 1:] + wh[:, h - 1 : 0 : -1]) * SQRT1_2
        out_b[:, n - 3 :: -2] = (uh[:, h - 1 : 0 : -1] - wh[:, 1:]) * SQRT1_2
    _add_flops(4 * q * (h - 1) + q)
    return out_a, out_b


def _transposed(a, b):
    """Return ``(a @ C2, b @ C4)``, i.e. DCT-III rows and DCT-IV rows."""
    n = a.shape[1]
    if n == 1:
        return a.copy(), b.copy()
    if n <= _LEAF:
        _add_flops((a.shape[0] + b.shape[0]) * (2 * n * n - n))
        return a @ dct2_matrix(n), b @ dct4_matrix(n)
    h = n // 2
    p, q = a.shape[0], b.shape[0]

    a_even = a[:, 0::2]
    a_odd = a[:, 1::2]

    # transpose of the DCT-IV output stage
    e = b[:, 0::2]
    o = b[:, n - 1 :: -2]
    uh = np.empty((q, h))
    wh = np.empty((q, h))
    uh[:, 0] = e[:, 0]
    wh[:, 0] = -o[:, 0]
    if h > 1:
        uh[:, 1:] = (e[:, 1:] + o[:, h - 1 : 0 : -1]) * SQRT1_2
        wh[:, 1:] = (e[:, h - 1 : 0 : -1] - o[:, 1:]) * SQRT1_2
    _add_flops(4 * q * (h - 1) + q)

    y3, y4 = _transposed(np.vstack([a_even, uh, wh]), a_odd)

    e3 = y3[:p]
    out_a = np.empty((p, n))
    out_a[:, :h] = (e3 + y4) * SQRT1_2
    out_a[:, h:] = ((e3 - y4) * SQRT1_2)[:, ::-1]

    c, s, signs = _rotation(n)
    u = y3[p : p + q]
    v = y3[p + q :] * signs
    out_b = np.empty((q, n))
    out_b[:, :h] = u * c - v * s
    out_b[:, h:] = (u * s + v * c)[:, ::-1]
    _add_flops(2 * p * n + 7 * q * h)
    return out_a, out_b


def _rows(x):
    x = as_signal(x)
    return x.reshape(-1, x.shape[-1]), x.shape


def dct2_fast(x):
    """DCT-II in O(n log n) real operations.

    Operates along the last axis; leading axes are treated as a batch.
    """
    rows, shape = _rows(x)
    out, _ = _forward(rows, np.empty((0, shape[-1])))
    return out.reshape(shape)


def dct3_fast(x):
    """DCT-III (the inverse of :func:`dct2_fast`) via the transposed recursion."""
    rows, shape = _rows(x)
    out, _ = _transposed(rows, np.empty((0, shape[-1])))
    return out.reshape(shape)


def dct4_fast(x):
    """DCT-IV in O(n log n) real operations (self-inverse)."""
    rows, shape = _rows(x)
    _, out = _forward(np.empty((0, shape[-1])), rows)
    return out.reshape(shape)


def dct4_fast_transposed(x):
    """DCT-IV through the transposed recursion; agrees with :func:`dct4_fast`."""
    rows, shape = _rows(x)
    _, out = _transposed(np.empty((0, shape[-1])), rows)
    return out.reshape(shape)


_NAIVE = {
    TransformKind.DCT2: dct2_naive,
    TransformKind.DCT3: dct3_naive,
    TransformKind.DCT4: dct4_naive,
    TransformKind.DST4: dst4_naive,
}


def _dst4_fast(x):
    # S4 = J C4 D
    return dct4_fast(sign_diagonal(as_signal(x)))[..., ::-1].copy()


_FAST = {
    TransformKind.DCT2: dct2_fast,
    TransformKind.DCT3: dct3_fast,
    TransformKind.DCT4: dct4_fast,
    TransformKind.DST4: _dst4_fast,
}


def transform(x, kind, fast=True):
    """Apply the transform named by `kind` (a :class:`TransformKind` or its value)."""
    kind = TransformKind(kind)
    return (_FAST if fast else _NAIVE)[kind](x)


# -- odd Vandermonde determinant --------------------------------------------


def odd_vandermonde_det(nodes):
    """Closed-form determinant of ``(x_k^(2l+1))_{k,l}``.

    Equals ``prod(x_k) * prod_{k<l} (x_l^2 - x_k^2)``.

    Raises
    ------
    ValueError
        If a node is zero or two nodes share the same absolute value, in
        which case the matrix is singular.
    """
    x = np.asarray(nodes, dtype=np.float64).ravel()
    if x.size == 0:
        raise ValueError("need at least one node")
    if np.any(x == 0):
        raise ValueError("odd Vandermonde matrix is singular: zero node")
    sq = x * x
    diff = sq[None, :] - sq[:, None]
    upper = diff[np.triu_indices(x.size, k=1)]
    if np.any(upper == 0):
        raise ValueError("odd Vandermonde matrix is singular: repeated |node|")
    return float(np.prod(x) * np.prod(upper))
