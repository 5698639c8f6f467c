import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sparsedct.transforms import (
    InvalidSignalError,
    TransformKind,
    butterfly,
    butterfly_matrix,
    counter_identity,
    dct2_fast,
    dct2_matrix,
    dct2_naive,
    dct3_fast,
    dct3_naive,
    dct4_fast,
    dct4_fast_transposed,
    dct4_naive,
    dst4_naive,
    epsilon_weight,
    even_odd_matrix,
    even_odd_permutation,
    flop_counter,
    odd_vandermonde_det,
    sign_diagonal,
    transform,
)

SIZES = [2**t for t in range(11)]


def dct2_by_definition(x):
    # independent scalar loop, no cached matrices
    n = len(x)
    out = np.zeros(n)
    for k in range(n):
        eps = np.sqrt(0.5) if k == 0 else 1.0
        out[k] = np.sqrt(2.0 / n) * eps * sum(x[l] * np.cos(k * (2 * l + 1) * np.pi / (2 * n)) for l in range(n))
    return out


def test_dct2_zero_vector():
    np.testing.assert_array_equal(dct2_naive(np.zeros(8)), np.zeros(8))


def test_dct2_constant_vector():
    y = dct2_naive(np.ones(8))
    np.testing.assert_allclose(y, [np.sqrt(8)] + [0] * 7, atol=1e-14)


def test_dct2_length_two():
    np.testing.assert_allclose(dct2_naive([1.0, 0.0]), [np.sqrt(0.5), np.cos(np.pi / 4)], rtol=1e-15)


def test_dct2_matrix_matches_definition():
    rng = np.random.default_rng(0)
    for n in (1, 2, 4, 8, 16):
        x = rng.standard_normal(n)
        np.testing.assert_allclose(dct2_naive(x), dct2_by_definition(x), atol=1e-13)


def test_dct3_inverts_constant():
    np.testing.assert_allclose(dct3_naive([np.sqrt(8)] + [0] * 7), np.ones(8), atol=1e-14)


def test_dct3_is_transpose():
    rng = np.random.default_rng(1)
    x = rng.standard_normal(64)
    M = np.array([dct2_by_definition(e) for e in np.eye(64)]).T
    np.testing.assert_allclose(dct3_naive(x), M.T @ x, atol=1e-12)


@pytest.mark.parametrize("n", SIZES)
def test_naive_orthogonality(n):
    x = np.random.default_rng(n).standard_normal(n)
    err = np.abs(dct3_naive(dct2_naive(x)) - x).max()
    assert err <= 1e-12 * np.abs(x).max()


def test_dct4_length_one_is_identity():
    np.testing.assert_allclose(dct4_naive([3.5]), [3.5], rtol=1e-15)
    np.testing.assert_allclose(dct4_fast([3.5]), [3.5], rtol=1e-15)


@pytest.mark.parametrize("n", SIZES)
def test_dct4_involution(n):
    x = np.random.default_rng(n + 1).standard_normal(n)
    assert np.abs(dct4_naive(dct4_naive(x)) - x).max() < 1e-12
    assert np.abs(dct4_fast(dct4_fast(x)) - x).max() < 1e-10


@pytest.mark.parametrize("n", SIZES)
def test_dst4_from_dct4(n):
    x = np.random.default_rng(n + 2).standard_normal(n)
    expected = counter_identity(dct4_naive(sign_diagonal(x)))
    assert np.abs(dst4_naive(x) - expected).max() <= 1e-12


def test_dct2_fast_length_one():
    np.testing.assert_array_equal(dct2_fast([2.5]), [2.5])


def test_dct2_fast_constant_1024():
    y = dct2_fast(np.ones(1024))
    assert abs(y[0] - 32.0) < 1e-12
    assert np.abs(y[1:]).max() < 1e-12


@pytest.mark.parametrize("kind", list(TransformKind))
@pytest.mark.parametrize("n", SIZES)
def test_fast_matches_naive(kind, n):
    x = np.random.default_rng(7 * n).standard_normal((5, n))
    fast = transform(x, kind, fast=True)
    naive = transform(x, kind, fast=False)
    assert np.abs(fast - naive).max() <= 1e-10 * np.abs(naive).max()


def test_fast_random_256_and_512():
    rng = np.random.default_rng(3)
    x = rng.standard_normal(256)
    assert np.abs(dct2_fast(x) - dct2_naive(x)).max() < 1e-10
    y = rng.standard_normal(512)
    assert np.abs(dct4_fast(y) - dct4_naive(y)).max() < 1e-10


def test_dct4_transposed_recursion_agrees():
    x = np.random.default_rng(4).standard_normal((3, 128))
    np.testing.assert_allclose(dct4_fast_transposed(x), dct4_fast(x), atol=1e-12)


def test_fast_inverse_pair_1024():
    x = np.random.default_rng(5).standard_normal(1024)
    assert np.abs(dct3_fast(dct2_fast(x)) - x).max() < 1e-10
    assert np.abs(dct2_fast(dct3_fast(x)) - x).max() < 1e-10


def test_batch_rows_are_independent():
    x = np.random.default_rng(6).standard_normal((4, 32))
    batched = dct2_fast(x)
    for row, out in zip(x, batched):
        np.testing.assert_allclose(dct2_fast(row), out, atol=1e-14)


@settings(max_examples=60, deadline=None)
@given(t=st.integers(0, 9), data=st.data())
def test_parseval_property(t, data):
    n = 2**t
    x = data.draw(arrays(np.float64, n, elements=st.floats(-1e6, 1e6, allow_nan=False)))
    nx = np.linalg.norm(x)
    assert abs(np.linalg.norm(dct2_fast(x)) - nx) <= 1e-10 * max(nx, 1e-300)
    assert np.abs(dct3_fast(dct2_fast(x)) - x).max() <= 1e-10 * max(np.abs(x).max(), 1e-300)


def test_epsilon_weight():
    assert epsilon_weight(0, 8) == pytest.approx(np.sqrt(0.5))
    assert epsilon_weight(8, 8) == pytest.approx(np.sqrt(0.5))
    assert epsilon_weight(3, 8) == 1.0


def test_building_block_matrices():
    n = 16
    x = np.random.default_rng(8).standard_normal(n)
    np.testing.assert_allclose(even_odd_permutation(x), even_odd_matrix(n) @ x)
    np.testing.assert_allclose(butterfly(x), butterfly_matrix(n) @ x, atol=1e-15)
    np.testing.assert_array_equal(counter_identity(x), x[::-1])
    np.testing.assert_array_equal(sign_diagonal(x), x * (-1.0) ** np.arange(n))


def test_factorization_of_dct2():
    # C2_n = P_n^T diag(C2_{n/2}, C4_{n/2}) T_n
    n = 32
    h = n // 2
    C4 = np.array([dct4_naive(e) for e in np.eye(h)]).T
    block = np.zeros((n, n))
    block[:h, :h] = dct2_matrix(h)
    block[h:, h:] = C4
    rebuilt = even_odd_matrix(n).T @ block @ butterfly_matrix(n)
    np.testing.assert_allclose(rebuilt, dct2_matrix(n), atol=1e-13)


def test_flop_count_n_log_n():
    for t in range(1, 16):
        n = 2**t
        with flop_counter() as fc:
            dct2_fast(np.ones(n))
        assert fc.count <= 8 * n * t


def test_flop_counter_off_outside_context():
    with flop_counter() as fc:
        pass
    dct2_fast(np.ones(64))
    assert fc.count == 0


@pytest.mark.parametrize("bad", [np.ones(3), np.ones(0), np.ones(12)])
def test_rejects_non_dyadic(bad):
    for fn in (dct2_naive, dct2_fast, dct3_fast, dct4_fast):
        with pytest.raises(InvalidSignalError):
            fn(bad)


def test_rejects_nonfinite():
    with pytest.raises(InvalidSignalError):
        dct2_fast([1.0, np.nan])
    with pytest.raises(InvalidSignalError):
        dct2_naive([np.inf, 0.0])


def test_transform_accepts_string_kind():
    x = np.arange(8.0)
    np.testing.assert_allclose(transform(x, "dct3"), dct3_naive(x), atol=1e-12)


def test_odd_vandermonde_small_cases():
    assert odd_vandermonde_det([2.0]) == pytest.approx(2.0)
    assert odd_vandermonde_det([1.0, 2.0]) == pytest.approx(6.0)
    assert np.linalg.det(np.array([[1.0, 1.0], [2.0, 8.0]])) == pytest.approx(6.0)


def test_odd_vandermonde_random_five():
    rng = np.random.default_rng(9)
    nodes = rng.uniform(0, 1, 5)
    V = nodes[:, None] ** (2 * np.arange(5) + 1)
    expected = np.linalg.det(V)
    assert abs(odd_vandermonde_det(nodes) - expected) <= 1e-8 * abs(expected)


@pytest.mark.parametrize("nodes", [[1.0, -1.0], [0.0, 2.0], [0.3, 0.5, 0.3]])
def test_odd_vandermonde_singular(nodes):
    with pytest.raises(ValueError):
        odd_vandermonde_det(nodes)


@pytest.mark.parametrize("leaf", [1, 2, 4])
def test_recursion_without_dense_leaf(monkeypatch, leaf):
    import sparsedct.transforms as tr

    monkeypatch.setattr(tr, "_LEAF", leaf)
    x = np.random.default_rng(leaf).standard_normal((3, 64))
    for kind in TransformKind:
        fast = transform(x, kind, fast=True)
        naive = transform(x, kind, fast=False)
        assert np.abs(fast - naive).max() < 1e-12
