import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from thhmay.fp import (Echelon, FpMatrix, InconsistentDifferential, PrimeField,
                       kernel_basis, rank, rref, sparse_kernel, sparse_rank,
                       subquotient_basis)


def matrices(p, max_rows=5, max_cols=5):
    return st.integers(1, max_rows).flatmap(lambda r: st.integers(1, max_cols).flatmap(
        lambda c: st.lists(st.lists(st.integers(0, p - 1), min_size=c, max_size=c),
                           min_size=r, max_size=r)))


def brute_kernel_size(a, p):
    rows, cols = a.shape
    return sum(1 for v in itertools.product(range(p), repeat=cols)
               if not ((a @ np.array(v)) % p).any())


def test_prime_field_rejects_non_primes():
    for bad in (2, 4, 9, 1, 0, -3):
        with pytest.raises(ValueError):
            PrimeField(bad)
    assert PrimeField(5).inv(2) == 3


def test_rref_pivots_leftmost():
    m = FpMatrix(3, [[0, 2, 1], [0, 1, 2], [1, 0, 0]])
    red, piv = rref(m)
    assert piv == [0, 1]
    assert red.tolist()[:2] == [[1, 0, 0], [0, 1, 2]]


@settings(max_examples=60, deadline=None)
@given(matrices(3, 3, 4))
def test_kernel_matches_brute_force(rows):
    a = np.array(rows)
    m = FpMatrix(3, a)
    ker = kernel_basis(m)
    for v in ker:
        assert not (m @ v).any()
    assert 3 ** len(ker) == brute_kernel_size(a, 3)
    assert rank(m) + len(ker) == a.shape[1]


@settings(max_examples=60, deadline=None)
@given(matrices(5, 4, 5))
def test_sparse_kernel_agrees_with_dense(rows):
    a = np.array(rows)
    images = [{i: int(a[i, j]) for i in range(a.shape[0]) if a[i, j]} for j in range(a.shape[1])]
    ker = sparse_kernel(images, 5)
    assert len(ker) == len(kernel_basis(FpMatrix(5, a)))
    for k in ker:
        v = np.zeros(a.shape[1], dtype=np.int64)
        for j, c in k.items():
            v[j] = c
        assert not ((a @ v) % 5).any()
    assert sparse_rank([dict(x) for x in images], 5) == rank(FpMatrix(5, a))


def test_echelon_expresses_vectors_in_inserted_ones():
    e = Echelon(3)
    assert e.add({0: 1, 1: 1}, "a")
    assert e.add({1: 1, 2: 2}, "b")
    assert not e.add({0: 1, 1: 2, 2: 2})
    rem, combo = e.reduce({0: 2, 1: 1, 2: 1})
    assert rem == {}
    # 2a + 2b = (2, 4, 4) = (2, 1, 1) mod 3
    assert combo == {"a": 2, "b": 2}


def test_subquotient_and_inconsistency():
    reps = subquotient_basis(3, [[1, 0, 0], [0, 1, 0]], [[1, 0, 0]], 3)
    assert len(reps) == 1
    with pytest.raises(InconsistentDifferential):
        subquotient_basis(3, [[1, 0, 0]], [[0, 0, 1]], 3)


def test_matrix_is_immutable_and_hashable():
    m = FpMatrix(3, [[1, 4]])
    assert m.tolist() == [[1, 1]]
    with pytest.raises(ValueError):
        m.entries[0, 0] = 2
    assert hash(m) == hash(FpMatrix(3, [[1, 1]]))
