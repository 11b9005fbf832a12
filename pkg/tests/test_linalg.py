import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xana.linalg import PreconditionError, noise_dominance, numeric_rank, span_contained

from conftest import crandn


def random_unitary(rng, n):
    Q, R = np.linalg.qr(crandn(rng, n, n))
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def test_rank_identity_and_zero():
    assert numeric_rank(np.eye(3)) == 3
    assert numeric_rank(np.zeros((4, 2))) == 0


def test_rank_outer_product(rng):
    u, v = crandn(rng, 5), crandn(rng, 4)
    A = np.outer(u, v.conj())
    # oracle: exactly one singular value stands clear of round-off
    s = np.linalg.svd(A, compute_uv=False)
    assert s[1] / s[0] < 1e-14
    assert numeric_rank(A) == 1


def test_rank_empty_rejected():
    with pytest.raises(ValueError):
        numeric_rank(np.zeros((0, 3)))


def test_rank_unitary_invariance(rng):
    for _ in range(100):
        n = int(rng.integers(2, 8))
        r = int(rng.integers(1, n + 1))
        A = crandn(rng, n, r) @ crandn(rng, r, n)
        U = random_unitary(rng, n)
        assert numeric_rank(U @ A) == numeric_rank(A) == r


def test_span_self_and_product(rng):
    A = crandn(rng, 6, 3)
    ok, res = span_contained(A, A)
    assert ok and res < 1e-14
    ok, res = span_contained(A @ crandn(rng, 3, 5), A)
    assert ok and res < 1e-12


def test_span_random_not_contained(rng):
    for _ in range(100):
        A = crandn(rng, 6, 3)
        ok, res = span_contained(crandn(rng, 6, 2), A)
        assert not ok and res > 0.1


def test_span_row_mismatch(rng):
    with pytest.raises(ValueError):
        span_contained(crandn(rng, 4, 1), crandn(rng, 5, 2))


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), rows=st.integers(3, 9), data=st.data())
def test_span_union_property(seed, rows, data):
    rng = np.random.default_rng(seed)
    cols = data.draw(st.integers(1, rows - 1))
    A = crandn(rng, rows, cols)
    B = A @ crandn(rng, cols, data.draw(st.integers(1, 4)))
    C = A @ crandn(rng, cols, data.draw(st.integers(1, 4)))
    assert span_contained(B, A)[0] and span_contained(C, A)[0]
    assert span_contained(np.hstack([B, C]), A)[0]


def test_noise_dominance_examples(rng):
    assert noise_dominance(np.eye(2), [np.eye(2)[:, :1]], [5.0])
    u = crandn(rng, 2)
    A = np.outer(u, [1.0, 0.0])
    assert numeric_rank(A @ A.conj().T) == 1
    assert noise_dominance(A, [0.3 * u[:, None]], [2.0])


def test_noise_dominance_precondition(rng):
    A = crandn(rng, 5, 2)
    with pytest.raises(PreconditionError, match=r"B\[1\]"):
        noise_dominance(A, [A[:, :1], crandn(rng, 5, 1)], [1.0, 1.0])
    with pytest.raises(PreconditionError):
        noise_dominance(A, [A[:, :1]], [-1.0])


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), rows=st.integers(2, 8), data=st.data())
def test_noise_dominance_property(seed, rows, data):
    rng = np.random.default_rng(seed)
    cols = data.draw(st.integers(1, rows))
    rank = data.draw(st.integers(1, cols))
    A = crandn(rng, rows, rank) @ crandn(rng, rank, cols)
    count = data.draw(st.integers(1, 3))
    Bs = [A @ crandn(rng, cols, int(rng.integers(1, cols + 1))) for _ in range(count)]
    lambdas = rng.uniform(0, 10, count).tolist()
    assert noise_dominance(A, Bs, lambdas)
