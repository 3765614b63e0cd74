"""Exact rational linear algebra, including the multimodular solver."""

import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from bosonic import linalg
from bosonic.linalg import (
    ExactSolver,
    SingularMatrixError,
    determinant,
    is_positive_definite,
    nullspace,
    rational_reconstruct,
    rref,
    solve_batched,
    solve_exact,
    solve_particular,
)

entries = st.integers(min_value=-9, max_value=9)


def matrices(nrows, ncols):
    return st.lists(
        st.lists(entries, min_size=ncols, max_size=ncols),
        min_size=nrows,
        max_size=nrows,
    )


@given(matrices(4, 6))
@settings(max_examples=50, deadline=None)
def test_rref_and_nullspace(A):
    red, pivots = rref(A)
    # pivot columns carry identity structure
    for r, pc in enumerate(pivots):
        assert red[r][pc] == 1
        for i in range(len(red)):
            if i != r:
                assert red[i][pc] == 0
    null = nullspace(A)
    assert len(null) == 6 - len(pivots)
    for vec in null:
        for row in A:
            assert sum(mpq(a) * v for a, v in zip(row, vec)) == 0


@given(matrices(4, 4), matrices(4, 2))
@settings(max_examples=50, deadline=None)
def test_solve_exact_or_singular(A, B):
    try:
        X = solve_exact(A, B)
    except SingularMatrixError:
        assert determinant(A) == 0
        return
    for i in range(4):
        for j in range(2):
            assert sum(mpq(A[i][t]) * X[t][j] for t in range(4)) == mpq(B[i][j])


@given(matrices(5, 3), matrices(3, 1))
@settings(max_examples=50, deadline=None)
def test_solve_particular_consistent(A, Xtrue):
    # build a consistent system by construction
    B = [
        [sum(mpq(A[i][t]) * Xtrue[t][j] for t in range(3)) for j in range(1)]
        for i in range(5)
    ]
    X = solve_particular(A, B)
    for i in range(5):
        assert sum(mpq(A[i][t]) * X[t][0] for t in range(3)) == B[i][0]


def test_solve_particular_inconsistent():
    A = [[1, 0], [1, 0]]
    B = [[1], [2]]
    with pytest.raises(SingularMatrixError):
        solve_particular(A, B)


def test_solve_particular_underdetermined_sets_free_vars_to_zero():
    A = [[1, 1, 0]]
    X = solve_particular(A, [[5]])
    assert X == [[mpq(5)], [mpq(0)], [mpq(0)]]


@given(matrices(3, 3))
@settings(max_examples=50, deadline=None)
def test_determinant_multiplicative(A):
    B = [[1, 2, 0], [0, 1, 3], [1, 0, 1]]
    AB = [
        [sum(mpq(A[i][t]) * B[t][j] for t in range(3)) for j in range(3)]
        for i in range(3)
    ]
    assert determinant(AB) == determinant(A) * determinant(B)


def test_positive_definite():
    assert is_positive_definite([[2, 1], [1, 2]])
    assert not is_positive_definite([[1, 2], [2, 1]])
    assert not is_positive_definite([[0, 0], [0, 1]])


def test_rational_reconstruct_round_trip():
    M = 1
    for p in [(1 << 31) - 1, (1 << 31) - 19, (1 << 31) - 61]:
        M *= p
    for n, d in [(3, 7), (-123456, 789), (0, 1), (10**8 + 7, 10**8 + 9)]:
        q = mpq(n, d)
        r = (int(q.numerator) * pow(int(q.denominator), -1, M)) % M
        assert rational_reconstruct(r, M) == q


def test_multimodular_matches_direct_on_large_system():
    # force the multimodular route (n > DENSE_EXACT_LIMIT) and verify
    # the exact defining equations of the returned solution
    n = linalg.DENSE_EXACT_LIMIT + 10
    rng = random.Random(7)
    A = [[mpq(rng.randint(-2, 2)) for _ in range(n)] for _ in range(n)]
    for i in range(n):
        A[i][i] += 5  # diagonal dominance keeps it nonsingular
    B = [[mpq(rng.randint(-3, 3), rng.randint(1, 3))] for _ in range(n)]
    X = solve_batched(A, B)
    for i in range(n):
        assert sum(A[i][t] * X[t][0] for t in range(n)) == B[i][0]


def test_exact_solver_caches_inverse():
    A = [[2, 1], [1, 3]]
    s = ExactSolver(A)
    x = s.solve([1, 0])
    assert [sum(mpq(A[i][j]) * x[j] for j in range(2)) for i in range(2)] == [
        mpq(1),
        mpq(0),
    ]
    X = s.solve_many([[1, 0], [0, 1]])
    assert X[0][0] * mpq(2) + X[1][0] * mpq(1) == 1
