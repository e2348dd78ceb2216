"""Exact rational matrix layer: determinants, rank, minor sums."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psdline.errors import DimensionError, DomainError
from psdline.exact_linalg import (
    ExactMatrix,
    det,
    det_cofactor,
    format_rational,
    k_subsets,
    matrix_from_json,
    matrix_to_json,
    parse_rational,
    principal_minor_sum,
    rank,
    squared_minor_sum,
    submatrix,
)

small_int = st.integers(min_value=-6, max_value=6)


def square(rows):
    return ExactMatrix.from_rows(rows)


def test_parse_rational_forms():
    assert parse_rational(3) == Fraction(3)
    assert parse_rational("2/7") == Fraction(2, 7)
    assert parse_rational(Fraction(1, 3)) == Fraction(1, 3)
    assert parse_rational(0.5) == Fraction(1, 2)
    with pytest.raises(DomainError):
        parse_rational(True)
    with pytest.raises(DomainError):
        parse_rational(None)


def test_format_roundtrip():
    for q in (Fraction(0), Fraction(-3, 4), Fraction(10)):
        assert parse_rational(format_rational(q)) == q


def test_k_subsets_lexicographic():
    assert k_subsets(4, 2) == [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]
    assert k_subsets(3, 0) == [()]
    assert k_subsets(3, 4) == []
    assert k_subsets(3, -1) == []


@settings(max_examples=60, deadline=None)
@given(
    st.integers(min_value=1, max_value=5).flatmap(
        lambda n: st.lists(
            st.lists(small_int, min_size=n, max_size=n), min_size=n, max_size=n
        )
    )
)
def test_det_cofactor_matches_bareiss(rows):
    A = square(rows)
    assert det(A) == det_cofactor(A)


def test_det_identity_and_singular():
    assert det(ExactMatrix.identity(4)) == 1
    assert det(square([[1, 2], [2, 4]])) == 0
    assert det(square([[Fraction(1, 2), 0], [0, Fraction(1, 3)]])) == Fraction(1, 6)


def test_det_rejects_nonsquare():
    with pytest.raises(DimensionError):
        det(ExactMatrix.zero(2, 3))


def test_rank_examples():
    assert rank(ExactMatrix.zero(3, 3)) == 0
    assert rank(ExactMatrix.identity(3)) == 3
    assert rank(square([[1, 2, 3], [2, 4, 6], [1, 1, 1]])) == 2


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=2, max_value=4), st.data())
def test_squared_minor_sum_detects_rank(m, data):
    # A = C C^T with C of m x r has rank <= r, so every (r+1)-minor dies
    r = data.draw(st.integers(min_value=1, max_value=m - 1))
    C = [
        [Fraction(data.draw(small_int)) for _ in range(r)] for _ in range(m)
    ]
    A = ExactMatrix.from_rows(
        [
            [sum((C[i][k] * C[j][k] for k in range(r)), Fraction(0)) for j in range(m)]
            for i in range(m)
        ]
    )
    assert squared_minor_sum(A, r + 1) == 0
    assert (squared_minor_sum(A, rank(A)) != 0) or rank(A) == 0


@settings(max_examples=40, deadline=None)
@given(
    st.integers(min_value=1, max_value=5).flatmap(
        lambda n: st.lists(
            st.lists(small_int, min_size=n, max_size=n), min_size=n, max_size=n
        )
    )
)
def test_principal_minor_sum_charpoly_relation(rows):
    """p_A(x) = sum_d (-1)^d (sum of d x d principal minors) x^{n-d}."""
    n = len(rows)
    sym = [[Fraction(rows[min(i, j)][max(i, j)]) for j in range(n)] for i in range(n)]
    A = square(sym)
    # evaluate both sides at a few rational points
    for x0 in (Fraction(2), Fraction(-1), Fraction(1, 3)):
        xI_minus_A = ExactMatrix.from_rows(
            [
                [(x0 if i == j else Fraction(0)) - sym[i][j] for j in range(n)]
                for i in range(n)
            ]
        )
        rhs = sum(
            (-1) ** d * principal_minor_sum(A, d) * x0 ** (n - d)
            for d in range(n + 1)
        )
        assert det(xI_minus_A) == rhs


def test_submatrix_one_based():
    A = square([[1, 2, 3], [4, 5, 6], [7, 8, 9]])
    S = submatrix(A, (1, 3), (2, 3))
    assert S.to_rows() == [[2, 3], [8, 9]]


def test_matrix_json_roundtrip():
    A = square([[Fraction(1, 2), 2], [3, Fraction(-7, 3)]])
    doc = matrix_to_json(A)
    assert doc["rows"] == 2 and doc["cols"] == 2
    assert matrix_from_json(doc) == A


def test_matrix_json_shape_mismatch():
    with pytest.raises(DimensionError):
        matrix_from_json({"rows": 2, "cols": 2, "data": [[1, 2]]})


def test_matrix_immutability():
    A = ExactMatrix.identity(2)
    with pytest.raises(AttributeError):
        A.rows = 3
