import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from unihom.exactla import (NoSolution, NotInSpan, QMatrix, coordinates_in_span, inverse,
                            is_invertible, kernel_basis, left_inverse, rank, rref, solve)


def det(rows):
    """Leibniz determinant; independent of the elimination code."""
    n = len(rows)
    total = Fraction(0)
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for a, b in itertools.combinations(perm, 2) if a > b)
        term = Fraction(-1 if inv % 2 else 1)
        for i, j in enumerate(perm):
            term *= rows[i][j]
            if term == 0:
                break
        total += term
    return total


def minor_rank(rows):
    """Largest k with a nonzero k x k minor."""
    m, n = len(rows), len(rows[0]) if rows else 0
    for k in range(min(m, n), 0, -1):
        for r in itertools.combinations(range(m), k):
            for c in itertools.combinations(range(n), k):
                if det([[rows[i][j] for j in c] for i in r]) != 0:
                    return k
    return 0


def random_matrix(rng, m, n, rank_hint=None):
    vals = [0, 0, 1, -1, 2, Fraction(1, 2), Fraction(-3, 4)]
    rows = [[Fraction(rng.choice(vals)) for _ in range(n)] for _ in range(m)]
    if rank_hint is not None:
        # force dependencies: later rows are combinations of the first rank_hint rows
        for i in range(rank_hint, m):
            a, b = rng.choice(vals), rng.choice(vals)
            rows[i] = [a * rows[0][j] + b * rows[min(1, rank_hint - 1)][j] for j in range(n)]
    return rows


rationals = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@st.composite
def matrices(draw, max_rows=6, max_cols=6):
    m = draw(st.integers(0, max_rows))
    n = draw(st.integers(0, max_cols))
    rows = [[draw(st.one_of(st.just(Fraction(0)), rationals)) for _ in range(n)] for _ in range(m)]
    return QMatrix.from_dense(rows, ncols=n) if m else QMatrix(0, n)


def test_rref_identity():
    R, piv = rref(QMatrix.identity(2))
    assert R == QMatrix.identity(2)
    assert piv == [0, 1]


def test_rref_rank_one():
    R, piv = rref(QMatrix.from_dense([[1, 2], [2, 4]]))
    assert R == QMatrix.from_dense([[1, 2], [0, 0]])
    assert piv == [0]


@pytest.mark.parametrize("seed", range(8))
def test_rank_matches_minor_oracle(seed):
    rng = random.Random(seed)
    rows = random_matrix(rng, 6, 6, rank_hint=[None, 3, 2, 4][seed % 4])
    assert rank(QMatrix.from_dense(rows)) == minor_rank(rows)


def test_rank_examples():
    assert rank(QMatrix(3, 4)) == 0
    assert rank(QMatrix.identity(5)) == 5
    # d1 of the two-vertex circle: rows x, y; columns a: x->y, b: y->x
    assert rank(QMatrix.from_dense([[-1, 1], [1, -1]])) == 1


def test_kernel_examples():
    assert kernel_basis(QMatrix.identity(3)) == []
    assert kernel_basis(QMatrix.from_dense([[1, -1]])) == [(1, 1)]


def test_kernel_of_boundary_contains_image():
    # boundary maps of a filled triangle: d1 d2 = 0
    d1 = QMatrix.from_dense([[-1, -1, 0], [1, 0, -1], [0, 1, 1]])
    d2 = QMatrix.from_dense([[1], [-1], [1]])
    assert (d1 @ d2).is_zero()
    for v in kernel_basis(d1):
        assert not any(d1 @ v)
    assert len(kernel_basis(d1)) == 1


def test_solve_examples():
    b = (Fraction(3), Fraction(-1, 2))
    assert solve(QMatrix.identity(2), b) == b
    with pytest.raises(NoSolution):
        solve(QMatrix.from_dense([[1], [1]]), (1, 2))
    with pytest.raises(ValueError):
        solve(QMatrix.identity(2), (1, 2, 3))


@pytest.mark.parametrize("seed", range(6))
def test_solve_consistent_with_augmented_rank(seed):
    rng = random.Random(100 + seed)
    rows = random_matrix(rng, 5, 4, rank_hint=2)
    M = QMatrix.from_dense(rows)
    b = [Fraction(rng.choice([0, 1, -2])) for _ in range(5)]
    solvable = rank(M.hstack(QMatrix.from_columns([b], 5))) == rank(M)
    if solvable:
        assert M @ solve(M, b) == tuple(b)
    else:
        with pytest.raises(NoSolution):
            solve(M, b)


def test_coordinates_in_span_examples():
    basis = [(1, 0, 1), (0, 1, 1)]
    assert coordinates_in_span(basis, (1, 0, 1)) == (1, 0)
    assert coordinates_in_span(basis, (0, 0, 0)) == (0, 0)
    v = (1, 0, 0)
    assert rank(QMatrix.from_columns(basis + [v], 3)) == 3
    with pytest.raises(NotInSpan):
        coordinates_in_span(basis, v)
    with pytest.raises(ValueError):
        coordinates_in_span(basis, (1, 0))


def test_inverse_and_left_inverse():
    M = QMatrix.from_dense([[2, 1], [1, 1]])
    assert inverse(M) @ M == QMatrix.identity(2)
    tall = QMatrix.from_dense([[1, 0], [1, 1], [0, 2]])
    assert left_inverse(tall) @ tall == QMatrix.identity(2)
    assert not is_invertible(QMatrix.from_dense([[1, 2], [2, 4]]))
    with pytest.raises(ValueError):
        inverse(QMatrix.from_dense([[1, 2], [2, 4]]))


def test_matrix_storage_invariants():
    M = QMatrix(2, 2, {(0, 0): 0, (1, 1): Fraction(2, 4)})
    assert M.nnz == 1
    assert list(M.entries()) == [(1, 1, Fraction(1, 2))]
    with pytest.raises(ValueError):
        QMatrix(2, 2, [(0, 0, 1), (0, 0, 2)])
    with pytest.raises(IndexError):
        QMatrix(2, 2, {(2, 0): 1})


def test_determinism_under_entry_order():
    rng = random.Random(7)
    rows = random_matrix(rng, 5, 5, rank_hint=3)
    items = [(i, j, v) for i, r in enumerate(rows) for j, v in enumerate(r) if v]
    results = set()
    for _ in range(5):
        rng.shuffle(items)
        R, piv = rref(QMatrix(5, 5, items))
        results.add((tuple(R.entries()), tuple(piv)))
    assert len(results) == 1


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rank_nullity(M):
    assert rank(M) + len(kernel_basis(M)) == M.ncols


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rref_idempotent(M):
    R, piv = rref(M)
    R2, piv2 = rref(R)
    assert R2 == R and piv2 == piv
    assert piv == sorted(set(piv))


@settings(max_examples=60, deadline=None)
@given(matrices(), st.data())
def test_solve_image_vectors(M, data):
    x = [data.draw(rationals) for _ in range(M.ncols)]
    b = M @ x
    assert M @ solve(M, b) == b
