"""Compounds, higher adjugates and the minor-sum factorization."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psdline.errors import ContractError, DomainError
from psdline.exact_linalg import (
    ExactMatrix,
    det,
    principal_minor_sum,
    submatrix,
)
from psdline.multilinear import (
    adjugate_k,
    adjugate_vector,
    compound,
    compound_pm,
    det_perturbation_coefficients,
    pairing,
    pm_sum_factorization,
)

small_int = st.integers(min_value=-5, max_value=5)


def sym3(a, b, c, d, e, f):
    return ExactMatrix.from_rows([[a, b, c], [b, d, e], [c, e, f]])


def rand_matrix(rng, n, m=None):
    m = n if m is None else m
    return ExactMatrix.from_rows(
        [[Fraction(int(rng.integers(-5, 6))) for _ in range(m)] for _ in range(n)]
    )


def test_compound_small_cases():
    A = sym3(1, 2, 3, 4, 5, 6)
    assert compound(A, 0).body.to_rows() == [[1]]
    assert compound(A, 1).body == A
    assert compound(A, 3).body.to_rows() == [[det(A)]]
    C2 = compound(A, 2)
    assert C2.row_labels == ((1, 2), (1, 3), (2, 3))
    # entry ([1,2],[1,3]) = det A[{1,2},{1,3}]
    assert C2.entry((1, 2), (1, 3)) == det(submatrix(A, (1, 2), (1, 3)))


def test_compound_pm_displayed_pattern():
    # entries of C_2^1 are sums of the two diagonal entries of each block
    a, b, c, d, e, f = (Fraction(v) for v in (2, 3, 5, 7, 11, 13))
    A = sym3(a, b, c, d, e, f)
    C21 = compound_pm(A, 2, 1)
    expected = [
        [a + d, a + e, b + e],
        [a + e, a + f, b + f],
        [b + e, b + f, d + f],
    ]
    assert C21.body.to_rows() == expected
    assert compound_pm(A, 2, 2).body == compound(A, 2).body
    assert compound_pm(A, 2, 0).body == ExactMatrix.identity(3)
    assert compound_pm(A, 3, 0).body.to_rows() == [[1]]


def test_compound_pm_out_of_range_d():
    A = sym3(1, 0, 0, 1, 0, 1)
    assert compound_pm(A, 2, 3).body.is_zero()
    assert compound_pm(A, 2, -1).body.is_zero()


def test_adjugate_displayed_pattern():
    a, b, c, d, e, f = (Fraction(v) for v in (2, 3, 5, 7, 11, 13))
    A = sym3(a, b, c, d, e, f)
    assert adjugate_k(A, 0).body.to_rows() == [[det(A)]]
    assert adjugate_k(A, 3).body.to_rows() == [[1]]
    adj2 = adjugate_k(A, 2)
    assert adj2.body.to_rows() == [
        [f, -e, c],
        [-e, d, -b],
        [c, -b, a],
    ]


def test_adjugate_1_classical_identity():
    rng = np.random.default_rng(3)
    for _ in range(10):
        A = rand_matrix(rng, 3)
        adj = adjugate_k(A, 1).body
        prod = adj @ A
        assert prod == ExactMatrix.identity(3).scale(det(A))


def test_adjugate_vector_2x3_pattern():
    a, b, c, d, e, f = (Fraction(v) for v in (1, 2, 3, 4, 5, 7))
    A = ExactMatrix.from_rows([[a, b, c], [d, e, f]])
    v = adjugate_vector(A)
    assert list(v.body.row(0)) == [
        b * f - c * e,
        -(a * f - c * d),
        a * e - b * d,
    ]


def test_adjugate_vector_1x2_normalization():
    A = ExactMatrix.from_rows([[3, 4]])
    v = adjugate_vector(A)
    assert list(v.body.row(0)) == [4, -3]


def test_adjugate_vector_transpose_case():
    A = ExactMatrix.from_rows([[1, 2], [3, 4], [5, 7]])
    v = adjugate_vector(A)
    w = adjugate_vector(A.transpose())
    assert v.body.transpose() == w.body


def test_adjugate_vector_square_rejected():
    with pytest.raises(DomainError):
        adjugate_vector(ExactMatrix.identity(2))


def test_cauchy_binet():
    rng = np.random.default_rng(11)
    for n in (3, 4):
        for _ in range(5):
            A, B = rand_matrix(rng, n), rand_matrix(rng, n)
            for k in range(n + 1):
                lhs = compound(A @ B, k).body
                rhs = compound(A, k).body @ compound(B, k).body
                assert lhs == rhs


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=1, max_value=4), st.data())
def test_pairing_reproduces_det_perturbation(n, data):
    rows_a = [
        [Fraction(data.draw(small_int)) for _ in range(n)] for _ in range(n)
    ]
    rows_b = [
        [Fraction(data.draw(small_int)) for _ in range(n)] for _ in range(n)
    ]
    A, B = ExactMatrix.from_rows(rows_a), ExactMatrix.from_rows(rows_b)
    coeffs = det_perturbation_coefficients(A, B)
    for t0 in (Fraction(0), Fraction(1), Fraction(-2), Fraction(1, 2)):
        direct = det(A + B.scale(t0))
        val = Fraction(0)
        for c in reversed(coeffs):
            val = val * t0 + c
        assert val == direct


def _star_instance(rng, ell, m, r):
    """Random (M, b, c, u) satisfying the factorization assumptions."""
    b_cols = [
        [Fraction(int(rng.integers(-3, 4))) for _ in range(m)] for _ in range(ell)
    ]
    while True:
        C = rng.integers(-3, 4, size=(m, r))
        if r == 0 or np.linalg.matrix_rank(C) == r:
            break
    c_cols = [[Fraction(int(C[i, k])) for i in range(m)] for k in range(r)]
    u = [Fraction(int(rng.choice([-3, -2, -1, 1, 2, 3]))) for _ in range(r)]
    m11 = rng.integers(-3, 4, size=(ell, ell))
    m11 = np.triu(m11) + np.triu(m11, 1).T
    full = [[Fraction(0)] * (ell + m) for _ in range(ell + m)]
    for i in range(ell):
        for j in range(ell):
            full[i][j] = Fraction(int(m11[i, j]))
    for j in range(ell):
        for i in range(m):
            full[ell + i][j] = b_cols[j][i]
            full[j][ell + i] = b_cols[j][i]
    for i in range(m):
        for j in range(m):
            full[ell + i][ell + j] = sum(
                (u[k] * c_cols[k][i] * c_cols[k][j] for k in range(r)), Fraction(0)
            )
    return ExactMatrix.from_rows(full), b_cols, c_cols, u


def test_pm_sum_factorization_matches_direct():
    rng = np.random.default_rng(17)
    done = 0
    for _ in range(400):
        m = int(rng.integers(1, 6))
        ell = int(rng.integers(1, m + 1))
        r = int(rng.integers(0, m - ell + 1))
        M, b_cols, c_cols, u = _star_instance(rng, ell, m, r)
        got = pm_sum_factorization(M, ell, r, b_cols, c_cols, u)
        assert got == principal_minor_sum(M, r + 2 * ell)
        done += 1
        if done >= 200:
            break
    assert done >= 200


def test_pm_sum_factorization_validates_blocks():
    rng = np.random.default_rng(23)
    M, b_cols, c_cols, u = _star_instance(rng, 1, 3, 1)
    bad = [list(col) for col in b_cols]
    bad[0][0] += 1
    with pytest.raises(ContractError):
        pm_sum_factorization(M, 1, 1, bad, c_cols, u)
    with pytest.raises(ContractError):
        pm_sum_factorization(M, 1, 3, b_cols + b_cols + b_cols, c_cols, u)
