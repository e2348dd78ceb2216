"""Exact rational matrices: subsets, minors, determinants, rank.

Everything here is computed over arbitrary-precision rationals
(``fractions.Fraction``), so downstream identity checks are exact
equalities rather than tolerance comparisons.  Index subsets are 1-based
in the public API; lexicographic enumeration order of k-subsets is fixed
because compound-matrix entry positions depend on it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import DimensionError, DomainError

Rational = Fraction


def parse_rational(value) -> Fraction:
    """Parse an int, a "p/q" string, or anything Fraction accepts."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise DomainError(f"not a rational entry: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, float):
        # Floats are accepted for convenience at the boundary only.
        return Fraction(value).limit_denominator(10**12)
    raise DomainError(f"not a rational entry: {value!r}")


def format_rational(q: Fraction) -> str:
    return str(q)


def k_subsets(n: int, k: int) -> list[tuple[int, ...]]:
    """All k-element subsets of {1,...,n} in lexicographic order."""
    if k < 0 or k > n:
        return []
    return list(itertools.combinations(range(1, n + 1), k))


@dataclass(frozen=True)
class IndexSubset:
    """A strictly increasing subset of {1,...,ground}."""

    ground: int
    members: tuple[int, ...]

    def __post_init__(self):
        ms = self.members
        if any(ms[i] >= ms[i + 1] for i in range(len(ms) - 1)):
            raise DomainError(f"members not strictly increasing: {ms}")
        if ms and (ms[0] < 1 or ms[-1] > self.ground):
            raise DimensionError(f"members {ms} out of range [1,{self.ground}]")

    @classmethod
    def of(cls, ground: int, members: Iterable[int]) -> "IndexSubset":
        return cls(ground, tuple(sorted(members)))

    @classmethod
    def full(cls, ground: int) -> "IndexSubset":
        return cls(ground, tuple(range(1, ground + 1)))

    def complement(self) -> "IndexSubset":
        inside = set(self.members)
        return IndexSubset(
            self.ground,
            tuple(i for i in range(1, self.ground + 1) if i not in inside),
        )

    def element_sum(self) -> int:
        return sum(self.members)

    def __len__(self) -> int:
        return len(self.members)


class ExactMatrix:
    """Dense matrix with Fraction entries, immutable after construction."""

    __slots__ = ("rows", "cols", "_e")

    def __init__(self, rows: int, cols: int, entries: Sequence[Fraction]):
        if rows < 0 or cols < 0:
            raise DimensionError("negative dimension")
        if len(entries) != rows * cols:
            raise DimensionError(
                f"expected {rows * cols} entries, got {len(entries)}"
            )
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "_e", tuple(Fraction(x) for x in entries))

    def __setattr__(self, *a):  # pragma: no cover - guard only
        raise AttributeError("ExactMatrix is immutable")

    # -- constructors ----------------------------------------------------

    @classmethod
    def from_rows(cls, data: Sequence[Sequence]) -> "ExactMatrix":
        rows = len(data)
        cols = len(data[0]) if rows else 0
        flat = []
        for row in data:
            if len(row) != cols:
                raise DimensionError("ragged rows")
            flat.extend(parse_rational(x) for x in row)
        return cls(rows, cols, flat)

    @classmethod
    def zero(cls, rows: int, cols: int) -> "ExactMatrix":
        return cls(rows, cols, [Fraction(0)] * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls(
            n, n, [Fraction(1 if i == j else 0) for i in range(n) for j in range(n)]
        )

    @classmethod
    def diagonal(cls, values: Sequence) -> "ExactMatrix":
        vals = [parse_rational(v) for v in values]
        n = len(vals)
        return cls(
            n, n, [vals[i] if i == j else Fraction(0) for i in range(n) for j in range(n)]
        )

    # -- access ----------------------------------------------------------

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self._e[i * self.cols + j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self._e[i * self.cols : (i + 1) * self.cols]

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(self._e[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_symmetric(self) -> bool:
        if not self.is_square:
            return False
        return all(
            self[i, j] == self[j, i]
            for i in range(self.rows)
            for j in range(i + 1, self.cols)
        )

    def is_zero(self) -> bool:
        return all(x == 0 for x in self._e)

    # -- algebra ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ExactMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self._e == other._e
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self._e))

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionError("shape mismatch in addition")
        return ExactMatrix(
            self.rows, self.cols, [a + b for a, b in zip(self._e, other._e)]
        )

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionError("shape mismatch in subtraction")
        return ExactMatrix(
            self.rows, self.cols, [a - b for a, b in zip(self._e, other._e)]
        )

    def scale(self, c) -> "ExactMatrix":
        c = parse_rational(c)
        return ExactMatrix(self.rows, self.cols, [c * a for a in self._e])

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise DimensionError("shape mismatch in product")
        out = []
        for i in range(self.rows):
            ri = self.row(i)
            for j in range(other.cols):
                out.append(
                    sum(
                        (ri[k] * other._e[k * other.cols + j] for k in range(self.cols)),
                        Fraction(0),
                    )
                )
        return ExactMatrix(self.rows, other.cols, out)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(
            self.cols,
            self.rows,
            [self._e[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)],
        )

    def hstack(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.rows != other.rows:
            raise DimensionError("row count mismatch in hstack")
        out = []
        for i in range(self.rows):
            out.extend(self.row(i))
            out.extend(other.row(i))
        return ExactMatrix(self.rows, self.cols + other.cols, out)

    def __repr__(self):
        return f"ExactMatrix({self.to_rows()!r})"


# -- submatrices ---------------------------------------------------------


def _as_subset(ground: int, s) -> IndexSubset:
    if isinstance(s, IndexSubset):
        if s.ground != ground:
            raise DimensionError(
                f"subset ground {s.ground} does not match dimension {ground}"
            )
        return s
    return IndexSubset.of(ground, s)


def submatrix(A: ExactMatrix, rows, cols) -> ExactMatrix:
    """A[rows, cols] with 1-based index subsets; A[alpha] when rows == cols."""
    rsub = _as_subset(A.rows, rows)
    csub = _as_subset(A.cols, cols)
    out = [A[i - 1, j - 1] for i in rsub.members for j in csub.members]
    return ExactMatrix(len(rsub), len(csub), out)


def principal_submatrix(A: ExactMatrix, alpha) -> ExactMatrix:
    return submatrix(A, alpha, alpha)


# -- determinants, rank, minor sums ---------------------------------------


def det(A: ExactMatrix) -> Fraction:
    """Exact determinant by Bareiss-style elimination; det of 0x0 is 1."""
    if not A.is_square:
        raise DimensionError("determinant of a non-square matrix")
    n = A.rows
    if n == 0:
        return Fraction(1)
    m = A.to_rows()
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * pivot - m[i][k] * m[k][j]) / prev
            m[i][k] = Fraction(0)
        prev = pivot
    return sign * m[n - 1][n - 1]


def det_cofactor(A: ExactMatrix) -> Fraction:
    """Cofactor-expansion determinant; independent cross-check for small n."""
    if not A.is_square:
        raise DimensionError("determinant of a non-square matrix")
    n = A.rows
    if n > 8:
        raise DomainError("cofactor oracle capped at n <= 8")
    rows = A.to_rows()

    def rec(rs: list[list[Fraction]], cols: tuple[int, ...]) -> Fraction:
        if not cols:
            return Fraction(1)
        first = rs[0]
        total = Fraction(0)
        for pos, c in enumerate(cols):
            a = first[c]
            if a == 0:
                continue
            rest = cols[:pos] + cols[pos + 1 :]
            term = a * rec(rs[1:], rest)
            total += term if pos % 2 == 0 else -term
        return total

    return rec(rows, tuple(range(n)))


def rank(A: ExactMatrix) -> int:
    """Exact rank over the rationals by Gaussian elimination."""
    m = A.to_rows()
    nrows, ncols = A.rows, A.cols
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, nrows):
            if m[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        pivot = m[r][c]
        for i in range(r + 1, nrows):
            if m[i][c] != 0:
                f = m[i][c] / pivot
                for j in range(c, ncols):
                    m[i][j] -= f * m[r][j]
        r += 1
        if r == nrows:
            break
    return r


def principal_minor_sum(A: ExactMatrix, d: int) -> Fraction:
    """Sum of all d x d principal minors; d = 0 gives 1 by convention."""
    if not A.is_square:
        raise DimensionError("principal minors need a square matrix")
    if d < 0 or d > A.rows:
        raise DomainError(f"minor order {d} out of range [0,{A.rows}]")
    if d == 0:
        return Fraction(1)
    total = Fraction(0)
    for alpha in k_subsets(A.rows, d):
        total += det(submatrix(A, alpha, alpha))
    return total


def squared_minor_sum(A: ExactMatrix, N: int) -> Fraction:
    """Sum of squares of all N x N minors; N = 0 gives 1 by convention."""
    if N < 0 or N > min(A.rows, A.cols):
        raise DomainError(f"minor order {N} out of range")
    if N == 0:
        return Fraction(1)
    total = Fraction(0)
    for alpha in k_subsets(A.rows, N):
        for beta in k_subsets(A.cols, N):
            total += det(submatrix(A, alpha, beta)) ** 2
    return total


# -- JSON matrix literal ---------------------------------------------------


def matrix_from_json(obj: dict) -> ExactMatrix:
    """Parse {"rows": n, "cols": m, "data": [[...], ...]}."""
    try:
        rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    except (KeyError, TypeError) as exc:
        raise DomainError(f"matrix literal missing field: {exc}") from exc
    if len(data) != rows or any(len(r) != cols for r in data):
        raise DimensionError("matrix literal data does not match rows/cols")
    return ExactMatrix.from_rows(data)


def matrix_to_json(A: ExactMatrix) -> dict:
    def enc(q: Fraction):
        return int(q) if q.denominator == 1 else str(q)

    return {
        "rows": A.rows,
        "cols": A.cols,
        "data": [[enc(x) for x in A.row(i)] for i in range(A.rows)],
    }
