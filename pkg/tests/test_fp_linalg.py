import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ladder.errors import DimensionMismatch, ZeroToNegativePower
from ladder.fp_linalg import Fp, fp_pow, in_span, kernel_basis, matmul, rank, rref

from oracles import minor_rank


def test_fp_pow_examples():
    assert fp_pow(1, -5, 7) == 1
    assert fp_pow(3, 6, 7) == 1
    assert fp_pow(2, -1, 691) == 346
    assert 2 * 346 % 691 == 1


def test_fp_pow_zero_negative():
    with pytest.raises(ZeroToNegativePower):
        fp_pow(0, -1, 7)
    with pytest.raises(ZeroToNegativePower):
        Fp(0, 11).inverse()


def test_fp_scalar():
    a = Fp(5, 7)
    assert a + 4 == 2
    assert a * a == Fp(4, 7)
    assert a / a == 1
    assert (a ** -1) * a == 1
    with pytest.raises(DimensionMismatch):
        a + Fp(1, 11)


def test_rref_identity_and_zero():
    red, piv = rref(np.eye(4, dtype=int), 7)
    assert (red == np.eye(4)).all() and piv == [0, 1, 2, 3]
    red, piv = rref(np.zeros((3, 4), dtype=int), 7)
    assert not red.any() and piv == []


def test_rank_matches_minor_oracle():
    rng = np.random.default_rng(5)
    for _ in range(30):
        m = rng.integers(0, 5, size=(5, 5))
        # make rank deficiency common
        if rng.random() < 0.5:
            m[4] = (m[0] + 2 * m[1]) % 5
        assert rank(m, 5) == minor_rank(m.tolist(), 5)


def test_kernel_identity_and_zero():
    assert kernel_basis(np.eye(3, dtype=int), 5) == []
    basis = kernel_basis(np.zeros((2, 3), dtype=int), 5)
    assert [list(v) for v in basis] == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]


def test_kernel_exhaustive_f5():
    m = np.array([[1, 1, 0], [0, 1, 1]])
    basis = kernel_basis(m, 5)
    assert len(basis) == 1
    solutions = {v for v in itertools.product(range(5), repeat=3)
                 if not (m @ np.array(v) % 5).any()}
    spanned = {tuple(int(x) for x in c * basis[0] % 5) for c in range(5)}
    assert solutions == spanned
    assert list(basis[0]) == [1, 4, 1]


def test_in_span_examples():
    e1 = [1, 0]
    assert in_span([e1], [0, 0], 7) == [0]
    assert in_span([e1], [3, 0], 7) == [3]
    assert in_span([e1], [0, 1], 7) is None
    c = in_span([[1, 2], [0, 1]], [2, 0], 7)
    assert c == [2, 3]
    assert ((2 * np.array([1, 2]) + 3 * np.array([0, 1])) % 7 == [2, 0]).all()
    with pytest.raises(DimensionMismatch):
        in_span([[1, 0, 0]], [1, 0], 7)


def test_matmul_chunks_large_modulus():
    p = 2_147_483_629  # prime just below 2^31
    rng = np.random.default_rng(1)
    a = rng.integers(0, p, size=(3, 9))
    b = rng.integers(0, p, size=(9, 2))
    expect = [[sum(int(a[i, t]) * int(b[t, j]) for t in range(9)) % p for j in range(2)] for i in range(3)]
    assert matmul(a, b, p).tolist() == expect


small_primes = st.sampled_from([2, 3, 5, 7, 11, 13])


@st.composite
def matrices(draw):
    p = draw(small_primes)
    r = draw(st.integers(0, 6))
    c = draw(st.integers(1, 6))
    data = draw(st.lists(st.integers(0, p - 1), min_size=r * c, max_size=r * c))
    return np.array(data, dtype=np.int64).reshape(r, c), p


@settings(max_examples=80, deadline=None)
@given(matrices())
def test_kernel_properties(mp):
    m, p = mp
    basis = kernel_basis(m, p, cols=m.shape[1])
    for x in basis:
        assert not (m @ x % p).any()
    assert rank(m, p) + len(basis) == m.shape[1] if m.size else len(basis) == m.shape[1]


@settings(max_examples=80, deadline=None)
@given(matrices())
def test_rref_idempotent(mp):
    m, p = mp
    if not m.size:
        return
    red, piv = rref(m, p)
    red2, piv2 = rref(red, p)
    assert (red == red2).all() and piv == piv2
    assert piv == sorted(set(piv))


@settings(max_examples=80, deadline=None)
@given(matrices(), st.data())
def test_in_span_substitution(mp, data):
    m, p = mp
    if not m.size:
        return
    v = np.array(data.draw(st.lists(st.integers(0, p - 1), min_size=m.shape[1], max_size=m.shape[1])))
    coeffs = in_span(list(m), v, p)
    if coeffs is not None:
        total = sum(c * row for c, row in zip(coeffs, m)) % p
        assert (total == v % p).all()
    else:
        assert rank(np.vstack([m, v]), p) == rank(m, p) + 1
