"""Rate prediction from exact rank conditions and empirical rate fitting.

The a-priori side classifies a pencil from exact data: if the columns
of the off-diagonal block lie in the column space of the corner block,
convergence is linear; otherwise O(k^{-1/2}) is an upper bound, tight
when the corner block is a nonzero singular semidefinite matrix (the
indicator that the singularity degree exceeds one).  The empirical side
fits a recorded iteration trace with a ratio test and a log-log
regression.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .charpoly import PerturbedPencil
from .errors import DomainError, FullRankMatrixError
from .exact_linalg import ExactMatrix, rank
from .projections import APTrace, FloatSymMatrix

PSD_TOL = 1e-10
RATIO_CONCENTRATION = 0.05
CI_WIDTH_MAX = 0.1


@dataclass(frozen=True)
class MeasuredRate:
    kind: str  # "linear" | "power_law" | "inconclusive"
    rate: float | None = None  # contraction factor for the linear kind
    exponent: float | None = None  # fitted power for the power_law kind
    ci: tuple[float, float] | None = None

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "rate": self.rate,
            "exponent": self.exponent,
            "ci": list(self.ci) if self.ci else None,
        }


@dataclass(frozen=True)
class RateVerdict:
    predicted: str  # "linear" | "sublinear_half" | "unknown"
    predicted_reason: str
    tight: bool = False
    measured: MeasuredRate | None = None
    agreement: bool | None = None

    def to_json(self) -> dict:
        return {
            "predicted": self.predicted,
            "predicted_reason": self.predicted_reason,
            "tight": self.tight,
            "measured": self.measured.kind if self.measured else None,
            "rate": self.measured.rate if self.measured else None,
            "exponent": self.measured.exponent if self.measured else None,
            "ci": list(self.measured.ci) if self.measured and self.measured.ci else None,
            "agreement": self.agreement,
        }


@dataclass(frozen=True)
class SDIndicator:
    b22_semidefiniteness: str  # positive_semidefinite | negative_semidefinite | indefinite | zero
    b22_singular: bool
    rank_gap: int
    conclusions: tuple[str, ...]


def canonicalize(
    A: FloatSymMatrix,
    B: FloatSymMatrix,
    denominator_limit: int = 10**6,
) -> tuple[PerturbedPencil, np.ndarray, float]:
    """Diagonalize A and rationalize, returning (pencil, Q, residual).

    Q is orthogonal with Q^T A Q = diag(p, 0); eigenvalues below the PSD
    tolerance count as zero and define the corank.  Entries are rounded
    to rationals with denominator <= denominator_limit; the returned
    residual is the largest rounding error, zero for exact inputs.
    """
    n = A.n
    if B.n != n:
        raise DomainError("A and B must have the same size")
    w, V = np.linalg.eigh(A.data)
    scale = max(1.0, float(np.abs(w).max()))
    if w.min() < -PSD_TOL * scale:
        raise DomainError(f"A is not PSD within tolerance (min eig {w.min():.3e})")
    pos = w > PSD_TOL * scale
    m = int(n - pos.sum())
    if m == 0:
        raise FullRankMatrixError(
            "A has full rank: the line meets the cone interior, "
            "convergence is trivially linear"
        )
    if m == n:
        raise DomainError("A is zero; the corank analysis needs a positive part")
    # positive eigenpairs first, descending
    order = np.concatenate([np.argsort(-w[pos].clip(min=0)).astype(int), []])
    pos_idx = np.where(pos)[0][np.argsort(-w[pos])]
    zero_idx = np.where(~pos)[0]
    Q = V[:, np.concatenate([pos_idx, zero_idx])]
    p_float = w[pos_idx]
    Bq = Q.T @ B.data @ Q
    Bq = (Bq + Bq.T) / 2.0

    residual = 0.0
    p_exact = []
    for x in p_float:
        q = Fraction(float(x)).limit_denominator(denominator_limit)
        residual = max(residual, abs(float(q) - float(x)))
        p_exact.append(q)
    b_rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if j < i:
                row.append(b_rows[j][i])
                continue
            q = Fraction(float(Bq[i, j])).limit_denominator(denominator_limit)
            residual = max(residual, abs(float(q) - float(Bq[i, j])))
            row.append(q)
        b_rows.append(row)
    pencil = PerturbedPencil.build(p_exact, ExactMatrix.from_rows(b_rows))
    return pencil, Q, residual


def sd_indicator(pencil: PerturbedPencil) -> SDIndicator:
    """Exact semidefiniteness/rank indicators tied to the singularity degree."""
    pos = sum(1 for uk in pencil.u if uk > 0)
    neg = pencil.r - pos
    if pencil.r == 0:
        kind = "zero"
    elif neg == 0:
        kind = "positive_semidefinite"
    elif pos == 0:
        kind = "negative_semidefinite"
    else:
        kind = "indefinite"
    singular = pencil.r < pencil.m
    gap = rank(pencil.b21.hstack(pencil.b22)) - pencil.r
    conclusions = []
    if kind == "indefinite" or not singular:
        conclusions.append(
            "B_22 indefinite or nonsingular: singularity degree is at most 1"
        )
    if kind in ("positive_semidefinite", "negative_semidefinite") and gap == 0:
        conclusions.append(
            "B_22 semidefinite with zero rank gap: the line meets the cone "
            "in more than one point, inconsistent with a singleton premise"
        )
    return SDIndicator(kind, singular, gap, tuple(conclusions))


def classify(pencil: PerturbedPencil) -> RateVerdict:
    """A-priori rate verdict from the exact rank condition."""
    ind = sd_indicator(pencil)
    if ind.rank_gap == 0:
        return RateVerdict(
            predicted="linear",
            predicted_reason="rank([B21 B22]) = rank(B22): all leading degrees <= 1",
        )
    tight = (
        ind.b22_semidefiniteness
        in ("positive_semidefinite", "negative_semidefinite")
        and ind.b22_singular
    )
    reason = "rank([B21 B22]) > rank(B22): O(k^-1/2) upper bound"
    if tight:
        reason += "; B22 nonzero semidefinite singular, bound expected tight"
    return RateVerdict(predicted="sublinear_half", predicted_reason=reason, tight=tight)


def _trim_to_decay(err: np.ndarray, k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cut the trace at the numerical noise floor (12 decades of decay)."""
    floor = err[0] * 1e-13
    below = np.where(err <= max(floor, 1e-290))[0]
    stop = below[0] + 1 if len(below) else len(err)
    return err[:stop], k[:stop]


def fit_rate(trace: APTrace) -> MeasuredRate:
    """Empirical rate classification of an iteration trace.

    Ratio test first: if the last-quartile error ratios concentrate
    (std/mean < 0.05) at a value strictly inside (0, 1) and clearly away
    from the 1 - O(1/k) drift of a power law, classify linear.
    Otherwise a log-log regression over the last decade of k classifies
    power_law when the 95% confidence interval is narrower than 0.1.

    Traces shorter than 100 rows are rejected unless they already
    decayed ten orders of magnitude (fast linear convergence exhausts
    double precision in a few dozen sweeps).
    """
    err = np.asarray(trace.err, dtype=float)
    ks = np.asarray(trace.k, dtype=float)
    if len(err) < 100 and not (len(err) >= 20 and err[-1] < 1e-10 * err[0]):
        raise DomainError(f"trace too short to fit ({len(err)} rows)")
    err, ks = _trim_to_decay(err, ks)

    # (a) ratio concentration
    q = max(len(err) // 4, 4)
    tail = err[-q - 1 :]
    tail_k = ks[-q - 1 :]
    if np.all(tail > 0):
        ratios = tail[1:] / tail[:-1]
        mean = float(ratios.mean())
        std = float(ratios.std())
        k_med = float(np.median(tail_k[1:]))
        if (
            mean > 0
            and std / mean < RATIO_CONCENTRATION
            and mean < 1 - 2.0 / k_med  # excludes the 1 - O(1/k) power-law drift
        ):
            return MeasuredRate(kind="linear", rate=mean)

    # (b) log-log regression over the last decade of k
    kmax = ks[-1]
    sel = (ks >= kmax / 10.0) & (ks > 0) & (err > 0)
    if sel.sum() >= 10:
        x = np.log(ks[sel])
        y = np.log(err[sel])
        coef, cov = np.polyfit(x, y, 1, cov=True)
        slope = float(coef[0])
        se = float(np.sqrt(cov[0, 0]))
        half = 1.96 * se
        if 2 * half < CI_WIDTH_MAX:
            return MeasuredRate(
                kind="power_law",
                exponent=slope,
                ci=(slope - half, slope + half),
            )
    return MeasuredRate(kind="inconclusive")


def combine(predicted: RateVerdict, measured: MeasuredRate) -> RateVerdict:
    """Attach a measurement to a prediction and judge agreement.

    A sublinear prediction counts as confirmed when the fitted exponent
    lies within 0.1 of -1/2; desk-scale windows do not resolve the
    asymptotic exponent more tightly than that.
    """
    if predicted.predicted == "linear":
        agree = measured.kind == "linear"
    elif predicted.predicted == "sublinear_half":
        agree = (
            measured.kind == "power_law"
            and measured.exponent is not None
            and abs(measured.exponent + 0.5) <= 0.1
        )
    else:
        agree = False
    return RateVerdict(
        predicted=predicted.predicted,
        predicted_reason=predicted.predicted_reason,
        tight=predicted.tight,
        measured=measured,
        agreement=agree,
    )
