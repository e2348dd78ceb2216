"""Compound matrices, higher adjugates, adjugate vectors, and the
principal-minor-sum factorization for bordered low-rank blocks.

Rows and columns of the produced matrices are labeled by lexicographic
k-subsets of the index range; entries follow the sign conventions of the
classical higher adjugate (sign ``(-1)^{|alpha|+|beta|}`` where ``|.|``
is the sum of the subset's elements).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ContractError, DimensionError, DomainError
from .exact_linalg import (
    ExactMatrix,
    IndexSubset,
    det,
    k_subsets,
    principal_minor_sum,
    squared_minor_sum,
    submatrix,
)


@dataclass(frozen=True)
class LabeledMatrix:
    """A matrix whose rows/columns are indexed by k-subsets."""

    row_labels: tuple[tuple[int, ...], ...]
    col_labels: tuple[tuple[int, ...], ...]
    body: ExactMatrix

    def __post_init__(self):
        if len(self.row_labels) != self.body.rows or len(self.col_labels) != self.body.cols:
            raise DimensionError("label counts do not match body dimensions")

    def entry(self, alpha, beta) -> Fraction:
        i = self.row_labels.index(tuple(alpha))
        j = self.col_labels.index(tuple(beta))
        return self.body[i, j]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.body.rows, self.body.cols)


def _empty(rows_n: int, rows_k: int, cols_n: int, cols_k: int) -> LabeledMatrix:
    rl = tuple(k_subsets(rows_n, rows_k))
    cl = tuple(k_subsets(cols_n, cols_k))
    return LabeledMatrix(rl, cl, ExactMatrix.zero(len(rl), len(cl)))


def compound(A: ExactMatrix, k: int) -> LabeledMatrix:
    """k-th compound: entry (alpha, beta) is det A[alpha, beta].

    ``k = 0`` gives the 1x1 matrix [1]; ``k < 0`` gives the canonical
    empty (0x0) zero object, matching the summation conventions used in
    the characteristic-polynomial expansion.
    """
    if k < 0:
        return _empty(A.rows, -1, A.cols, -1)
    rl = tuple(k_subsets(A.rows, k))
    cl = tuple(k_subsets(A.cols, k))
    body = ExactMatrix(
        len(rl),
        len(cl),
        [det(submatrix(A, a, b)) for a in rl for b in cl],
    )
    return LabeledMatrix(rl, cl, body)


def compound_pm(A: ExactMatrix, k: int, d: int) -> LabeledMatrix:
    """Entrywise sums of d x d principal minors of the (alpha, beta) blocks.

    ``d = 0`` on a square A gives the identity of size C(n, k); ``d < 0``
    gives the zero matrix of that size.
    """
    rl = tuple(k_subsets(A.rows, k))
    cl = tuple(k_subsets(A.cols, k))
    if d < 0:
        return LabeledMatrix(rl, cl, ExactMatrix.zero(len(rl), len(cl)))
    if d == 0:
        if A.rows != A.cols:
            raise DomainError("C_k^0 is defined for square matrices only")
        return LabeledMatrix(rl, cl, ExactMatrix.identity(len(rl)))
    if d > k:
        # No d x d principal minors fit in a k x k block: empty sum.
        return LabeledMatrix(rl, cl, ExactMatrix.zero(len(rl), len(cl)))
    body = ExactMatrix(
        len(rl),
        len(cl),
        [principal_minor_sum(submatrix(A, a, b), d) for a in rl for b in cl],
    )
    return LabeledMatrix(rl, cl, body)


def adjugate_k(A: ExactMatrix, k: int) -> LabeledMatrix:
    """k-th adjugate: entry (alpha, beta) is (-1)^{|a|+|b|} det A[b^c, a^c].

    adj_0(A) = [det A], adj_n(A) = [1], and k < 0 gives the empty zero
    object.
    """
    if not A.is_square:
        raise DimensionError("adjugate of a non-square matrix")
    n = A.rows
    if k < 0:
        return _empty(n, -1, n, -1)
    if k > n:
        return _empty(n, -1, n, -1)
    labels = tuple(k_subsets(n, k))
    out = []
    for alpha in labels:
        ac = IndexSubset.of(n, alpha).complement().members
        for beta in labels:
            bc = IndexSubset.of(n, beta).complement().members
            sign = -1 if (sum(alpha) + sum(beta)) % 2 else 1
            out.append(sign * det(submatrix(A, bc, ac)))
    return LabeledMatrix(labels, labels, ExactMatrix(len(labels), len(labels), out))


def adjugate_vector(A: ExactMatrix) -> LabeledMatrix:
    """Signed maximal minors of a non-square matrix.

    For an m x n matrix with m < n this is the row vector indexed by
    alpha in <n>_{n-m} with entry proportional to
    ``(-1)^{|alpha|} det A[[m], alpha^c]``; the global sign is normalized
    so the 1x2 case [p, q] maps to (q, -p).  For m > n the column-vector
    analogue is obtained by transposition.
    """
    if A.rows == A.cols:
        raise DomainError("adjugate vector requires a non-square matrix")
    if A.rows > A.cols:
        inner = adjugate_vector(A.transpose())
        return LabeledMatrix(inner.col_labels, inner.row_labels, inner.body.transpose())
    m, n = A.rows, A.cols
    labels = tuple(k_subsets(n, n - m))
    norm = -1 if (m * (m + 1) // 2) % 2 else 1
    entries = []
    for alpha in labels:
        ac = IndexSubset.of(n, alpha).complement().members
        sign = -1 if sum(alpha) % 2 else 1
        entries.append(norm * sign * det(submatrix(A, tuple(range(1, m + 1)), ac)))
    return LabeledMatrix(((),), labels, ExactMatrix(1, len(labels), entries))


def pairing(U: LabeledMatrix, V: LabeledMatrix) -> Fraction:
    """Trace pairing <U, V> = sum over (alpha, beta) of U_{a,b} * V_{b,a}.

    This is the pairing under which det(A + tB) expands as
    sum_i <adj_i(A), C_i(B)> t^i for arbitrary square A, B.
    """
    if U.shape != V.shape[::-1] and U.shape != V.shape:
        raise DimensionError("pairing of incompatible labeled matrices")
    total = Fraction(0)
    ub, vb = U.body, V.body
    for i in range(ub.rows):
        for j in range(ub.cols):
            total += ub[i, j] * vb[j, i]
    return total


def det_perturbation_coefficients(A: ExactMatrix, B: ExactMatrix) -> list[Fraction]:
    """Coefficients of det(A + tB) in t, via the adjugate/compound pairing."""
    if A.rows != B.rows or A.cols != B.cols or not A.is_square:
        raise DimensionError("need two square matrices of equal size")
    n = A.rows
    return [pairing(adjugate_k(A, i), compound(B, i)) for i in range(n + 1)]


def pm_sum_factorization(
    M: ExactMatrix,
    ell: int,
    r: int,
    b_cols: list[list[Fraction]],
    c_cols: list[list[Fraction]],
    u: list[Fraction],
) -> Fraction:
    """Sum of (r+2*ell) principal minors of a bordered low-rank matrix.

    ``M`` is symmetric of size ell + m, partitioned with an ell x ell
    upper-left block; the lower-left block must be [b_1 ... b_ell] and
    the lower-right block must equal sum_k u_k c_k c_k^T.  The value is
    computed from the factorized right-hand side

        (-1)^ell * u_1...u_r * sum of squared (r+ell) minors of
        [b_1 ... b_ell  c_1 ... c_r]

    (with the u-product replaced by 1 when r = 0), which equals the
    direct principal-minor sum whenever the assumptions hold.
    """
    if not M.is_symmetric():
        raise ContractError("M must be symmetric")
    m = M.rows - ell
    if ell < 1 or m < 1:
        raise ContractError("need ell >= 1 and a nonempty lower block")
    if r + ell > m:
        raise ContractError(f"r + ell = {r + ell} exceeds m = {m}")
    if len(b_cols) != ell or len(c_cols) != r or len(u) != r:
        raise ContractError("block column counts do not match ell, r")
    for b in list(b_cols) + list(c_cols):
        if len(b) != m:
            raise ContractError("block columns must have length m")

    # Verify M_21 and M_22 against the provided decomposition.
    for j, b in enumerate(b_cols):
        for i in range(m):
            if M[ell + i, j] != b[i]:
                raise ContractError("M_21 does not match the given b columns")
    for i in range(m):
        for j in range(m):
            expected = sum(
                (u[k] * c_cols[k][i] * c_cols[k][j] for k in range(r)), Fraction(0)
            )
            if M[ell + i, ell + j] != expected:
                raise ContractError("M_22 does not equal C D C^T")

    stacked = ExactMatrix(
        m,
        ell + r,
        [
            (b_cols[j][i] if j < ell else c_cols[j - ell][i])
            for i in range(m)
            for j in range(ell + r)
        ],
    )
    uprod = Fraction(1)
    for uk in u:
        uprod *= uk
    sign = -1 if ell % 2 else 1
    return sign * uprod * squared_minor_sum(stacked, r + ell)
