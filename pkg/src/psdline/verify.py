"""Randomized self-verification: every exact identity the pipeline rests
on, checked on seeded random instances.

A single trial draws a random pencil and runs the full battery: the
diagonal-aware expansion against the brute-force determinant oracle, all
closed-form boundary coefficients, the degeneracy rank test in both
directions, the slope-2 bound of the Newton diagram, the adjugate /
compound pairing against interpolated determinants, and the agreement
of the two alternating-projection step implementations.  Trials are
independent and deterministic in (seed, trial index), so the suite can
fan out across processes and still produce byte-identical reports.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .charpoly import (
    PerturbedPencil,
    brute_force_charpoly,
    degeneracy_cascade,
    edge_coefficient,
    enumerate_edge_gammas,
    expand_charpoly,
)
from .errors import DomainError, InvariantViolation
from .exact_linalg import ExactMatrix, det, matrix_to_json
from .multilinear import det_perturbation_coefficients
from .newton_diagram import build_diagram
from .projections import FloatSymMatrix, LinePencil, ap_step_matrix, ap_step_scalar


def _rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, trial]))


def random_pencil(rng: np.random.Generator, n_max: int) -> PerturbedPencil:
    """Random pencil with integer data: p in [1,5], B symmetric in [-5,5]."""
    n = int(rng.integers(2, n_max + 1))
    m = int(rng.integers(1, n))
    p = [Fraction(int(rng.integers(1, 6))) for _ in range(n - m)]
    raw = rng.integers(-5, 6, size=(n, n))
    sym = np.triu(raw) + np.triu(raw, 1).T
    B = ExactMatrix.from_rows([[Fraction(int(x)) for x in row] for row in sym])
    return PerturbedPencil.build(p, B)


def degenerate_pencil(
    rng: np.random.Generator, n_max: int
) -> tuple[PerturbedPencil, int]:
    """Pencil built so the cascade fires: rank([B21 B22]) < r + mu_tilde.

    B22 = sum u_k c_k c_k^T with independent c_k, and every column of
    B21 drawn from span{c_k} plus fewer than mu_tilde extra directions.
    Returns the pencil and the smallest firing depth mu_tilde.
    """
    for _ in range(200):
        n = int(rng.integers(3, max(n_max, 3) + 1))
        m = int(rng.integers(2, n))
        if min(m - 1, n - m) < 1:
            continue
        r = int(rng.integers(0, m - 1))  # r < m so a depth exists
        C = rng.integers(-2, 3, size=(m, r))
        if r and np.linalg.matrix_rank(C) < r:
            continue
        u = [Fraction(int(x)) for x in rng.choice([-2, -1, 1, 2], size=r)]
        Cf = [[Fraction(int(C[i, k])) for k in range(r)] for i in range(m)]
        b22 = [
            [
                sum((u[k] * Cf[i][k] * Cf[j][k] for k in range(r)), Fraction(0))
                for j in range(m)
            ]
            for i in range(m)
        ]
        # B21 columns inside span{c_k}: keeps rank([B21 B22]) at r
        coef = rng.integers(-2, 3, size=(r, n - m))
        b21 = [
            [
                sum((Cf[i][k] * Fraction(int(coef[k, j])) for k in range(r)), Fraction(0))
                for j in range(n - m)
            ]
            for i in range(m)
        ]
        b11 = rng.integers(-5, 6, size=(n - m, n - m))
        b11 = np.triu(b11) + np.triu(b11, 1).T
        rows = []
        for i in range(n - m):
            rows.append(
                [Fraction(int(b11[i, j])) for j in range(n - m)]
                + [b21[k][i] for k in range(m)]
            )
        for i in range(m):
            rows.append(b21[i] + b22[i])
        B = ExactMatrix.from_rows(rows)
        p = [Fraction(int(rng.integers(1, 6))) for _ in range(n - m)]
        pencil = PerturbedPencil.build(p, B)
        mu_max = min(pencil.m - pencil.r, pencil.n - pencil.m)
        if pencil.r == r and mu_max >= 1:
            return pencil, 1
    raise DomainError("could not construct a degenerate pencil")


def linear_rank_pencil(
    rng: np.random.Generator, n_max: int
) -> PerturbedPencil:
    """Pencil with rank([B21 B22]) = rank(B22) and B22 indefinite.

    Indefiniteness keeps the line/cone intersection a singleton, so the
    rank condition genuinely predicts a linear rate.
    """
    for _ in range(500):
        n = int(rng.integers(3, max(n_max, 3) + 1))
        m = int(rng.integers(2, n))
        raw = rng.integers(-3, 4, size=(m, m))
        b22 = np.triu(raw) + np.triu(raw, 1).T
        ev = np.linalg.eigvalsh(b22.astype(float))
        if ev.min() > -0.5 or ev.max() < 0.5:
            continue  # need an indefinite corner block
        # B21 columns inside the column space of B22
        coef = rng.integers(-2, 3, size=(m, n - m))
        b21 = b22 @ coef
        b11 = rng.integers(-5, 6, size=(n - m, n - m))
        b11 = np.triu(b11) + np.triu(b11, 1).T
        top = np.hstack([b11, b21.T])
        bottom = np.hstack([b21, b22])
        B = ExactMatrix.from_rows(
            [[Fraction(int(x)) for x in row] for row in np.vstack([top, bottom])]
        )
        p = [Fraction(int(rng.integers(1, 6))) for _ in range(n - m)]
        pencil = PerturbedPencil.build(p, B)
        gap = _rank_gap(pencil)
        if gap == 0:
            return pencil
    raise DomainError("could not construct a rank-condition pencil")


def tight_sublinear_pencil(rng: np.random.Generator, n_max: int) -> PerturbedPencil:
    """Pencil with B22 PSD singular and rank_gap > 0.

    These satisfy the indicators under which the O(k^-1/2) bound is
    expected tight; the line meets the cone only at A for the sampled
    parameter range (checked on a sign grid).
    """
    for _ in range(500):
        n = int(rng.integers(3, max(n_max, 3) + 1))
        m = int(rng.integers(2, n))
        r = int(rng.integers(1, m))  # strictly singular, strictly nonzero
        C = rng.integers(-2, 3, size=(m, r))
        if np.linalg.matrix_rank(C) < r:
            continue
        b22 = C @ C.T  # PSD of rank r
        b21 = rng.integers(-2, 3, size=(m, n - m))
        b11 = rng.integers(-5, 6, size=(n - m, n - m))
        b11 = np.triu(b11) + np.triu(b11, 1).T
        top = np.hstack([b11, b21.T])
        bottom = np.hstack([b21, b22])
        full = np.vstack([top, bottom]).astype(float)
        p = [int(rng.integers(1, 6)) for _ in range(n - m)]
        A = np.diag([float(x) for x in p] + [0.0] * m)
        # singleton check on a grid: A + tB must leave the cone both ways
        ok = True
        for t in np.concatenate([np.logspace(-3, 2, 12), -np.logspace(-3, 2, 12)]):
            if np.linalg.eigvalsh(A + t * full).min() > -1e-12:
                ok = False
                break
        if not ok:
            continue
        B = ExactMatrix.from_rows(
            [[Fraction(int(x)) for x in row] for row in np.vstack([top, bottom])]
        )
        pencil = PerturbedPencil.build([Fraction(x) for x in p], B)
        if _rank_gap(pencil) > 0 and pencil.r < pencil.m:
            return pencil
    raise DomainError("could not construct a tight sublinear pencil")


def _rank_gap(pencil: PerturbedPencil) -> int:
    from .exact_linalg import rank

    return rank(pencil.b21.hstack(pencil.b22)) - pencil.r


def pencil_to_float(pencil: PerturbedPencil) -> LinePencil:
    A = FloatSymMatrix(
        np.diag([float(pk) for pk in pencil.p] + [0.0] * pencil.m)
    )
    B = FloatSymMatrix(
        np.array(
            [[float(x) for x in pencil.B.row(i)] for i in range(pencil.n)]
        )
    )
    return LinePencil(A, B)


def instance_json(pencil: PerturbedPencil) -> dict:
    return {
        "A": matrix_to_json(pencil.a_matrix()),
        "B": matrix_to_json(pencil.B),
    }


@dataclass
class TrialResult:
    trial: int
    ok: bool
    checks: int
    message: str = ""
    counterexample: dict | None = None


@dataclass
class VerifyReport:
    seed: int
    n_max: int
    trials: int
    results: list[TrialResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    @property
    def total_checks(self) -> int:
        return sum(r.checks for r in self.results)

    def to_json(self) -> dict:
        out = {
            "seed": self.seed,
            "n_max": self.n_max,
            "trials": self.trials,
            "ok": self.ok,
            "total_checks": self.total_checks,
            "failures": [
                {
                    "trial": r.trial,
                    "message": r.message,
                    "counterexample": r.counterexample,
                }
                for r in self.results
                if not r.ok
            ],
        }
        return out


def check_pencil(pencil: PerturbedPencil, rng: np.random.Generator) -> int:
    """Full battery on one pencil; raises InvariantViolation on mismatch.

    Returns the number of individual identities that were confirmed.
    """
    checks = 0
    expansion = expand_charpoly(pencil)

    oracle = brute_force_charpoly(pencil.a_matrix(), pencil.B)
    if expansion != oracle:
        raise InvariantViolation("expansion disagrees with brute-force oracle")
    checks += 1

    for gamma, _tag in enumerate_edge_gammas(pencil):
        edge_coefficient(pencil, gamma, expansion)  # raises on mismatch
        checks += 1

    mu_max = min(pencil.m - pencil.r, pencil.n - pencil.m)
    for mu_tilde in range(1, mu_max + 1):
        fired, gammas = degeneracy_cascade(pencil, mu_tilde)
        gamma_t = (pencil.r + 2 * mu_tilde, pencil.m - pencil.r - mu_tilde)
        lead = expansion.coeff(*gamma_t)
        if fired != (lead == 0):
            raise InvariantViolation(
                f"degeneracy test at depth {mu_tilde}: rank predicate {fired} "
                f"but leading coefficient {lead}"
            )
        for g in gammas:
            if expansion.coeff(*g) != 0:
                raise InvariantViolation(
                    f"cascade lists {g} as zero but coefficient is "
                    f"{expansion.coeff(*g)}"
                )
            checks += 1
        checks += 1

    diagram = build_diagram(expansion)
    for e in diagram.edges:
        if e.slope > 2:
            raise InvariantViolation(f"diagram slope {e.slope} exceeds 2")
        checks += 1

    # pairing identity: det(A + tB) coefficients vs interpolation values
    A, B = pencil.a_matrix(), pencil.B
    coeffs = det_perturbation_coefficients(A, B)
    for t0 in (Fraction(0), Fraction(1), Fraction(-1), Fraction(1, 2), Fraction(2)):
        direct = det(A + B.scale(t0))
        horner = Fraction(0)
        for c in reversed(coeffs):
            horner = horner * t0 + c
        if horner != direct:
            raise InvariantViolation(
                f"adjugate/compound pairing fails at t = {t0}"
            )
        checks += 1

    line = pencil_to_float(pencil)
    for _ in range(3):
        t = float(rng.uniform(-0.5, 0.5))
        s = ap_step_scalar(t, line)
        mmat = ap_step_matrix(t, line)
        if abs(s - mmat) > 1e-11 * max(1.0, abs(t)):
            raise InvariantViolation(
                f"projection step paths disagree at t = {t}: {s} vs {mmat}"
            )
        checks += 1
    return checks


def run_trial(seed: int, n_max: int, trial: int) -> TrialResult:
    rng = _rng(seed, trial)
    pencil = random_pencil(rng, n_max)
    try:
        checks = check_pencil(pencil, rng)
        # every third trial additionally exercises a constructed
        # degenerate instance so the cascade branch is never idle
        if trial % 3 == 0:
            deg, _mu = degenerate_pencil(rng, n_max)
            checks += check_pencil(deg, rng)
        return TrialResult(trial=trial, ok=True, checks=checks)
    except InvariantViolation as exc:
        return TrialResult(
            trial=trial,
            ok=False,
            checks=0,
            message=str(exc),
            counterexample=instance_json(pencil),
        )


def _trial_star(args) -> TrialResult:
    return run_trial(*args)


def run_verification(
    seed: int, n_max: int, trials: int, parallel: bool = True
) -> VerifyReport:
    """Deterministic randomized suite; trials fan out across processes."""
    if n_max > 6:
        raise DomainError("n_max must be <= 6 to keep the exact oracles fast")
    if n_max < 2:
        raise DomainError("n_max must be >= 2")
    if trials < 0:
        raise DomainError("trials must be >= 0")
    report = VerifyReport(seed=seed, n_max=n_max, trials=trials)
    if trials == 0:
        return report
    args = [(seed, n_max, t) for t in range(trials)]
    if parallel and trials >= 16:
        with ProcessPoolExecutor() as pool:
            results = list(pool.map(_trial_star, args, chunksize=4))
    else:
        results = [run_trial(*a) for a in args]
    report.results = sorted(results, key=lambda r: r.trial)
    return report


def report_text(report: VerifyReport) -> str:
    lines = [
        f"verify seed={report.seed} n_max={report.n_max} trials={report.trials}",
        f"checks passed: {report.total_checks}",
    ]
    for r in report.results:
        if not r.ok:
            lines.append(f"FAIL trial {r.trial}: {r.message}")
            lines.append(json.dumps(r.counterexample, sort_keys=True))
    lines.append("OK" if report.ok else "FAILED")
    return "\n".join(lines) + "\n"
