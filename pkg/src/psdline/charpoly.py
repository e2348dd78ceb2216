"""Exact bivariate expansion of det(xI - A - tB) for A = diag(p, 0).

The structured expansion walks index subsets containing the zero block
and reads off principal-minor sums of the corresponding blocks of B; a
brute-force cofactor expansion over the bivariate polynomial ring serves
as an independent oracle.  Closed forms for the coefficients attached to
the Newton-polytope edges, and the rank-driven cascade of vanishing
coefficients, are exposed as separate operations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ContractError, DimensionError, DomainError, InvariantViolation
from .exact_linalg import (
    ExactMatrix,
    IndexSubset,
    format_rational,
    k_subsets,
    parse_rational,
    principal_minor_sum,
    rank,
    squared_minor_sum,
    submatrix,
)


class BivariatePoly:
    """Sparse exact polynomial in (t, x); zero coefficients never stored."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[tuple[int, int], Fraction] | None = None):
        self.terms = {g: c for g, c in (terms or {}).items() if c != 0}

    @classmethod
    def constant(cls, c) -> "BivariatePoly":
        return cls({(0, 0): parse_rational(c)})

    @classmethod
    def monomial(cls, t_deg: int, x_deg: int, c=1) -> "BivariatePoly":
        return cls({(t_deg, x_deg): parse_rational(c)})

    def coeff(self, t_deg: int, x_deg: int) -> Fraction:
        return self.terms.get((t_deg, x_deg), Fraction(0))

    def __eq__(self, other) -> bool:
        return isinstance(other, BivariatePoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "BivariatePoly") -> "BivariatePoly":
        out = dict(self.terms)
        for g, c in other.terms.items():
            out[g] = out.get(g, Fraction(0)) + c
        return BivariatePoly(out)

    def __sub__(self, other: "BivariatePoly") -> "BivariatePoly":
        out = dict(self.terms)
        for g, c in other.terms.items():
            out[g] = out.get(g, Fraction(0)) - c
        return BivariatePoly(out)

    def __neg__(self) -> "BivariatePoly":
        return BivariatePoly({g: -c for g, c in self.terms.items()})

    def __mul__(self, other: "BivariatePoly") -> "BivariatePoly":
        out: dict[tuple[int, int], Fraction] = {}
        for (t1, x1), c1 in self.terms.items():
            for (t2, x2), c2 in other.terms.items():
                g = (t1 + t2, x1 + x2)
                out[g] = out.get(g, Fraction(0)) + c1 * c2
        return BivariatePoly(out)

    def is_zero(self) -> bool:
        return not self.terms

    def x_degree(self) -> int:
        return max((g[1] for g in self.terms), default=0)

    def eval_t(self, t0) -> list[Fraction]:
        """Substitute t = t0; returns univariate coefficients [x^0, x^1, ...]."""
        t0 = parse_rational(t0)
        deg = self.x_degree()
        out = [Fraction(0)] * (deg + 1)
        for (td, xd), c in self.terms.items():
            out[xd] += c * t0**td
        return out

    def __repr__(self):
        items = sorted(self.terms.items(), key=lambda kv: (-kv[0][1], kv[0][0]))
        return "BivariatePoly(" + ", ".join(
            f"t^{g[0]}x^{g[1]}: {c}" for g, c in items
        ) + ")"


def poly_to_json(p: BivariatePoly) -> list[dict]:
    """Canonical serialization: sorted by (x-degree desc, t-degree asc)."""
    items = sorted(p.terms.items(), key=lambda kv: (-kv[0][1], kv[0][0]))
    return [{"t": g[0], "x": g[1], "c": format_rational(c)} for g, c in items]


def poly_from_json(rows: list[dict]) -> BivariatePoly:
    return BivariatePoly(
        {(int(r["t"]), int(r["x"])): parse_rational(r["c"]) for r in rows}
    )


# -- rank decomposition of the zero-block corner ---------------------------


def symmetric_rank_decomposition(
    M: ExactMatrix,
) -> tuple[list[list[Fraction]], list[Fraction]]:
    """Exact M = sum_k u_k c_k c_k^T with nonzero u_k and independent c_k.

    Rank-one peeling with exact congruence pivoting: at each step pick a
    vector v with v^T M v != 0 (a diagonal unit vector, or e_i + e_j when
    the diagonal has annihilated) and strip the conjugate direction.
    """
    if not M.is_symmetric():
        raise ContractError("rank decomposition needs a symmetric matrix")
    s = M.rows
    work = M.to_rows()
    c_cols: list[list[Fraction]] = []
    u: list[Fraction] = []
    while True:
        pivot = None
        for i in range(s):
            if work[i][i] != 0:
                pivot = (i, i)
                break
        if pivot is None:
            for i in range(s):
                for j in range(i + 1, s):
                    if work[i][j] != 0:
                        pivot = (i, j)
                        break
                if pivot:
                    break
        if pivot is None:
            break
        i, j = pivot
        if i == j:
            vMv = work[i][i]
            w = [work[row][i] for row in range(s)]
        else:
            vMv = work[i][i] + 2 * work[i][j] + work[j][j]
            w = [work[row][i] + work[row][j] for row in range(s)]
        uk = 1 / vMv
        c_cols.append(w)
        u.append(uk)
        for a in range(s):
            for b in range(s):
                work[a][b] -= uk * w[a] * w[b]
    return c_cols, u


@dataclass(frozen=True)
class PerturbedPencil:
    """The family diag(p_1..p_{n-m}, 0..0) + t*B with B partitioned.

    Blocks follow the corank split: b11 is (n-m) square, b21 is
    m x (n-m), b22 is m square with the exact decomposition
    b22 = sum_k u_k c_k c_k^T (r terms, r = rank b22).
    """

    n: int
    m: int
    p: tuple[Fraction, ...]
    B: ExactMatrix
    b11: ExactMatrix = field(compare=False)
    b21: ExactMatrix = field(compare=False)
    b22: ExactMatrix = field(compare=False)
    r: int = field(compare=False)
    c_cols: tuple[tuple[Fraction, ...], ...] = field(compare=False)
    u: tuple[Fraction, ...] = field(compare=False)

    @classmethod
    def build(cls, p, B: ExactMatrix) -> "PerturbedPencil":
        pvals = tuple(parse_rational(x) for x in p)
        if any(x <= 0 for x in pvals):
            raise DomainError("positive-part eigenvalues must be > 0")
        n = B.rows
        if not B.is_symmetric():
            raise ContractError("B must be symmetric")
        m = n - len(pvals)
        if m < 1 or m >= n:
            raise DomainError(f"corank m = {m} must satisfy 1 <= m < n = {n}")
        nm = n - m
        idx_top = tuple(range(1, nm + 1))
        idx_bot = tuple(range(nm + 1, n + 1))
        b11 = submatrix(B, idx_top, idx_top)
        b21 = submatrix(B, idx_bot, idx_top)
        b22 = submatrix(B, idx_bot, idx_bot)
        c_cols, u = symmetric_rank_decomposition(b22)
        return cls(
            n=n,
            m=m,
            p=pvals,
            B=B,
            b11=b11,
            b21=b21,
            b22=b22,
            r=len(u),
            c_cols=tuple(tuple(c) for c in c_cols),
            u=tuple(u),
        )

    def a_matrix(self) -> ExactMatrix:
        return ExactMatrix.diagonal(list(self.p) + [0] * self.m)

    def b21_column(self, k: int) -> tuple[Fraction, ...]:
        """k-th (1-based) column of the off-diagonal block, an m-vector."""
        return self.b21.column(k - 1)


# -- expansion --------------------------------------------------------------


def _all_principal_minor_sums(M: ExactMatrix) -> list[Fraction]:
    """[e_0, ..., e_s] with e_d the sum of d x d principal minors.

    Faddeev-LeVerrier recurrence on the characteristic polynomial;
    divisions by integers are exact over the rationals.
    """
    s = M.rows
    if s == 0:
        return [Fraction(1)]
    coeffs = [Fraction(1)]
    N = ExactMatrix.zero(s, s)
    c = Fraction(1)
    for k in range(1, s + 1):
        N = (M @ N) + ExactMatrix.identity(s).scale(c)
        MN = M @ N
        trace = sum((MN[i, i] for i in range(s)), Fraction(0))
        c = -trace / k
        coeffs.append(c)
    # det(xI - M) = sum_k coeffs[k] x^{s-k};  e_d = (-1)^d coeffs[d].
    return [(-1) ** d * coeffs[d] for d in range(s + 1)]


def expand_charpoly(pencil: PerturbedPencil) -> BivariatePoly:
    """Characteristic polynomial of A + tB as an exact polynomial in (t, x).

    Exploits the diagonal structure of A: only index subsets containing
    the whole zero block contribute, and each contributes the principal
    minor sums of the matching block of B weighted by the complementary
    product of the p's.
    """
    n, m = pencil.n, pencil.m
    nm = n - m
    zero_block = tuple(range(nm + 1, n + 1))
    terms: dict[tuple[int, int], Fraction] = {}
    for extra in range(nm + 1):
        k = m + extra  # size of the subset alpha
        for S in itertools.combinations(range(1, nm + 1), extra):
            alpha = S + zero_block
            weight = Fraction(1)
            inside = set(S)
            for idx in range(1, nm + 1):
                if idx not in inside:
                    weight *= pencil.p[idx - 1]
            sums = _all_principal_minor_sums(submatrix(pencil.B, alpha, alpha))
            for j in range(k + 1):
                i = k - j
                if sums[j] == 0:
                    continue
                sign = -1 if (n - i) % 2 else 1
                g = (j, i)
                terms[g] = terms.get(g, Fraction(0)) + sign * weight * sums[j]
    return BivariatePoly(terms)


def brute_force_charpoly(A: ExactMatrix, B: ExactMatrix) -> BivariatePoly:
    """det(xI - A - tB) by cofactor expansion over the polynomial ring.

    Independent of any structural assumption on A; capped at n <= 8.
    """
    if not (A.is_square and B.is_square) or A.rows != B.rows:
        raise DimensionError("need square matrices of equal size")
    n = A.rows
    if n > 8:
        raise DomainError("brute-force oracle capped at n <= 8")
    entries = [
        [
            BivariatePoly(
                {
                    (0, 1): Fraction(1 if i == j else 0),
                    (0, 0): -A[i, j],
                    (1, 0): -B[i, j],
                }
            )
            for j in range(n)
        ]
        for i in range(n)
    ]

    cache: dict[tuple[int, ...], BivariatePoly] = {}

    def minor(cols: tuple[int, ...]) -> BivariatePoly:
        if not cols:
            return BivariatePoly.constant(1)
        got = cache.get(cols)
        if got is not None:
            return got
        row = n - len(cols)
        total = BivariatePoly()
        for pos, c in enumerate(cols):
            e = entries[row][c]
            if e.is_zero():
                continue
            sub = minor(cols[:pos] + cols[pos + 1 :])
            term = e * sub
            total = total + term if pos % 2 == 0 else total - term
        cache[cols] = total
        return total

    return minor(tuple(range(n)))


# -- edge coefficients (Newton polytope boundary) ---------------------------

EDGE_E1 = "E1"
EDGE_E2 = "E2"
EDGE_E3 = "E3"
EDGE_BELOW = "below-E3"


@dataclass(frozen=True)
class EdgeCoefficientReport:
    gamma: tuple[int, int]
    formula_value: Fraction
    expansion_value: Fraction
    edge_tag: str


def _elementary_symmetric(values: tuple[Fraction, ...], k: int) -> Fraction:
    total = Fraction(0)
    for combo in itertools.combinations(values, k):
        prod = Fraction(1)
        for v in combo:
            prod *= v
        total += prod
    return total


def classify_gamma(pencil: PerturbedPencil, gamma: tuple[int, int]) -> str:
    """Which boundary case a support point falls in, or a domain error."""
    n, m, r = pencil.n, pencil.m, pencil.r
    g1, g2 = gamma
    if g1 == 0 and m <= g2 <= n:
        return EDGE_E1
    if 1 <= g1 <= r and g2 == m - g1:
        return EDGE_E2
    mu = g1 + g2 - m
    eta = g1 - r - 2 * mu
    mu_max = min(m - r, n - m)
    if eta == 0 and 1 <= mu <= mu_max:
        return EDGE_E3
    if eta >= 1 and 0 <= mu <= mu_max - 1 and eta <= m - r - mu:
        return EDGE_BELOW
    raise DomainError(
        f"gamma {gamma} is not on E1/E2/E3 nor strictly below E3 "
        f"(n={n}, m={m}, r={r})"
    )


def _edge_formula(pencil: PerturbedPencil, gamma: tuple[int, int], tag: str) -> Fraction:
    n, m, r = pencil.n, pencil.m, pencil.r
    g1, g2 = gamma
    if tag == EDGE_E1:
        eta = n - g2
        sign = -1 if eta % 2 else 1
        return sign * _elementary_symmetric(pencil.p, eta)
    if tag == EDGE_E2:
        eta = g1
        sign = -1 if (n - m + eta) % 2 else 1
        pprod = Fraction(1)
        for pk in pencil.p:
            pprod *= pk
        return sign * pprod * principal_minor_sum(pencil.b22, eta)
    if tag == EDGE_E3:
        mu = g1 + g2 - m
        sign = -1 if (n - m + r) % 2 else 1  # (-1)^(n-m+r+2mu)
        uprod = Fraction(1)
        for uk in pencil.u:
            uprod *= uk
        total = Fraction(0)
        nm = n - m
        for ks in itertools.combinations(range(1, nm + 1), mu):
            weight = Fraction(1)
            chosen = set(ks)
            for idx in range(1, nm + 1):
                if idx not in chosen:
                    weight *= pencil.p[idx - 1]
            cols = [pencil.b21_column(k) for k in ks] + [list(c) for c in pencil.c_cols]
            stacked = ExactMatrix(
                m, mu + r, [col[i] for i in range(m) for col in cols]
            )
            total += weight * squared_minor_sum(stacked, r + mu)
        return sign * uprod * total
    if tag == EDGE_BELOW:
        return Fraction(0)
    raise DomainError(f"unknown edge tag {tag}")


def edge_coefficient(
    pencil: PerturbedPencil,
    gamma: tuple[int, int],
    expansion: BivariatePoly | None = None,
) -> EdgeCoefficientReport:
    """Closed-form boundary coefficient, cross-checked against the expansion."""
    tag = classify_gamma(pencil, gamma)
    formula = _edge_formula(pencil, gamma, tag)
    if expansion is None:
        expansion = expand_charpoly(pencil)
    value = expansion.coeff(*gamma)
    if formula != value:
        raise InvariantViolation(
            f"edge coefficient mismatch at gamma={gamma} ({tag}): "
            f"formula {formula} vs expansion {value}"
        )
    return EdgeCoefficientReport(gamma, formula, value, tag)


def enumerate_edge_gammas(pencil: PerturbedPencil) -> list[tuple[tuple[int, int], str]]:
    """All support points covered by the boundary cases, with their tags."""
    n, m, r = pencil.n, pencil.m, pencil.r
    out = []
    for eta in range(n - m + 1):
        out.append(((0, n - eta), EDGE_E1))
    for eta in range(1, r + 1):
        out.append(((eta, m - eta), EDGE_E2))
    mu_max = min(m - r, n - m)
    for mu in range(1, mu_max + 1):
        out.append(((r + 2 * mu, m - r - mu), EDGE_E3))
    for mu in range(0, mu_max):
        for eta in range(1, m - r - mu + 1):
            out.append(((r + eta + 2 * mu, m - r - eta - mu), EDGE_BELOW))
    return out


def degeneracy_cascade(
    pencil: PerturbedPencil, mu_tilde: int
) -> tuple[bool, list[tuple[int, int]]]:
    """Rank test for the vanishing of the edge coefficient at depth mu_tilde.

    Fires exactly when rank([B_21 B_22]) < r + mu_tilde; in that case
    returns the full list of exponent pairs guaranteed zero.
    """
    n, m, r = pencil.n, pencil.m, pencil.r
    mu_max = min(m - r, n - m)
    if not (1 <= mu_tilde <= mu_max):
        raise DomainError(f"mu_tilde {mu_tilde} out of range [1,{mu_max}]")
    stacked = pencil.b21.hstack(pencil.b22)
    fired = rank(stacked) < r + mu_tilde
    if not fired:
        return False, []
    gammas = [
        (r + 2 * mu + nu, m - r - mu)
        for mu in range(mu_tilde, mu_max + 1)
        for nu in range(0, n - m - mu + 1)
    ]
    return True, gammas
