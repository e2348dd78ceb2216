"""Canonicalization, rate prediction and empirical rate fitting."""

from fractions import Fraction

import numpy as np
import pytest

from psdline.analysis import (
    MeasuredRate,
    canonicalize,
    classify,
    combine,
    fit_rate,
    sd_indicator,
)
from psdline.charpoly import PerturbedPencil
from psdline.errors import DomainError, FullRankMatrixError
from psdline.exact_linalg import ExactMatrix
from psdline.projections import APTrace, FloatSymMatrix, run_ap
from psdline.verify import (
    _rng,
    linear_rank_pencil,
    pencil_to_float,
    tight_sublinear_pencil,
)

F = Fraction


def pencil(p, rows):
    return PerturbedPencil.build(
        [F(x) for x in p], ExactMatrix.from_rows(rows)
    )


def rate_example_direction(b1, b2, b3, b4, u):
    return [
        [b1, b2, b3, b4],
        [b2, 1, 1, 1],
        [b3, 1, u, 0],
        [b4, 1, 0, 0],
    ]


def closed_form_direction():
    return [[0, 0, 0, 1], [0, 1, 0, 0], [0, 0, -2, 0], [1, 0, 0, 0]]


def synthetic_trace(errs):
    errs = list(errs)
    return APTrace(
        k=list(range(len(errs))), t=errs, err=errs, path="scalar"
    )


# -- canonicalize -----------------------------------------------------------


def test_canonicalize_already_diagonal():
    A = FloatSymMatrix(np.diag([2.0, 1.0, 0.0, 0.0]))
    B = FloatSymMatrix(np.eye(4))
    pen, Q, residual = canonicalize(A, B)
    assert pen.m == 2
    assert pen.p == (F(2), F(1))
    assert residual == 0
    assert Q.T @ Q == pytest.approx(np.eye(4), abs=1e-12)


def test_canonicalize_full_rank_rejected():
    A = FloatSymMatrix(np.eye(3))
    with pytest.raises(FullRankMatrixError):
        canonicalize(A, FloatSymMatrix(np.eye(3)))


def test_canonicalize_not_psd_rejected():
    A = FloatSymMatrix(np.diag([1.0, -0.5]))
    with pytest.raises(DomainError):
        canonicalize(A, FloatSymMatrix(np.eye(2)))


def test_canonicalize_zero_rejected():
    with pytest.raises(DomainError):
        canonicalize(
            FloatSymMatrix(np.zeros((2, 2))), FloatSymMatrix(np.eye(2))
        )


def test_canonicalize_rotation_roundtrip():
    """Orthogonal conjugation of the corank-3 example is undone."""
    rng = np.random.default_rng(21)
    A0 = np.diag([1.0, 0, 0, 0])
    B0 = np.array(rate_example_direction(0, 1, 1, 0, 1), dtype=float)
    Q0 = np.linalg.qr(rng.standard_normal((4, 4)))[0]
    pen, Q, residual = canonicalize(
        FloatSymMatrix(Q0 @ A0 @ Q0.T), FloatSymMatrix(Q0 @ B0 @ Q0.T)
    )
    assert pen.m == 3
    assert pen.p == (F(1),)
    assert residual < 1e-6
    # Q really diagonalizes the rotated A
    D = Q.T @ (Q0 @ A0 @ Q0.T) @ Q
    assert D == pytest.approx(np.diag([1.0, 0, 0, 0]), abs=1e-10)


# -- classify / sd_indicator -------------------------------------------------


def test_classify_rate_example_rank_condition():
    # rank([B21 B22]) = rank(B22) iff u != 0 or b3 = b4
    for u in (1, -2):
        v = classify(pencil([1], rate_example_direction(0, 1, 1, 0, u)))
        assert v.predicted == "linear"
    v = classify(pencil([1], rate_example_direction(0, 1, 1, 1, 0)))
    assert v.predicted == "linear"  # b3 = b4
    v = classify(pencil([1], rate_example_direction(0, 1, 1, 0, 0)))
    assert v.predicted == "sublinear_half"
    assert not v.tight  # B22 indefinite


def test_classify_closed_form_instance_not_tight():
    v = classify(pencil([1], closed_form_direction()))
    assert v.predicted == "sublinear_half"
    assert v.tight is False


def test_classify_scale_invariant():
    rows = rate_example_direction(0, 1, 1, 0, 0)
    base = classify(pencil([1], rows)).predicted
    for c in (3, F(-1, 2)):
        scaled = [[c * x for x in row] for row in rows]
        assert classify(pencil([1], scaled)).predicted == base


def test_sd_indicator_cases():
    ind = sd_indicator(
        pencil([1], [[0, 0, 0], [0, 1, 0], [0, 0, -1]])
    )
    assert ind.b22_semidefiniteness == "indefinite"
    assert any("degree is at most 1" in c for c in ind.conclusions)

    # B22 = rank-1 PSD outer product, B21 inside its column space
    ind = sd_indicator(pencil([1], [[0, 1, 1], [1, 1, 1], [1, 1, 1]]))
    assert ind.b22_semidefiniteness == "positive_semidefinite"
    assert ind.b22_singular
    assert ind.rank_gap == 0
    assert any("more than one point" in c for c in ind.conclusions)

    ind = sd_indicator(pencil([1], [[0, 1, 0], [1, 0, 0], [0, 0, 0]]))
    assert ind.b22_semidefiniteness == "zero"


def test_sd_indicator_matches_float_eigs():
    rng = _rng(3, 9)
    for trial in range(25):
        pen = tight_sublinear_pencil(rng, 5) if trial % 2 else linear_rank_pencil(rng, 5)
        ind = sd_indicator(pen)
        w = np.linalg.eigvalsh(
            np.array(
                [[float(x) for x in pen.b22.row(i)] for i in range(pen.m)]
            )
        )
        if ind.b22_semidefiniteness == "positive_semidefinite":
            assert w.min() > -1e-10
        elif ind.b22_semidefiniteness == "negative_semidefinite":
            assert w.max() < 1e-10
        elif ind.b22_semidefiniteness == "indefinite":
            assert w.min() < -1e-10 and w.max() > 1e-10


# -- fit_rate ----------------------------------------------------------------


def test_fit_rate_geometric():
    m = fit_rate(synthetic_trace(0.5**k for k in range(150)))
    assert m.kind == "linear"
    assert m.rate == pytest.approx(0.5)


def test_fit_rate_power_law():
    m = fit_rate(synthetic_trace((k + 1.0) ** -0.5 for k in range(2000)))
    assert m.kind == "power_law"
    assert m.exponent == pytest.approx(-0.5, abs=0.01)
    lo, hi = m.ci
    assert lo <= m.exponent <= hi


def test_fit_rate_too_short():
    with pytest.raises(DomainError):
        fit_rate(synthetic_trace([1.0] * 50))


def test_fit_rate_short_but_converged():
    # fast linear decay exhausts doubles long before 100 sweeps
    m = fit_rate(synthetic_trace(0.1**k for k in range(30)))
    assert m.kind == "linear"
    assert m.rate == pytest.approx(0.1)


def test_fit_rate_scalar_recurrence_lemma():
    x, xs = 0.5, []
    for _ in range(10**5):
        xs.append(x)
        x = x - 0.1 * x**3
    m = fit_rate(synthetic_trace(xs))
    assert m.kind == "power_law"
    assert m.exponent == pytest.approx(-0.5, abs=0.05)


def test_combine_agreement_rules():
    lin = classify(pencil([1], rate_example_direction(0, 1, 1, 0, 1)))
    sub = classify(pencil([1], rate_example_direction(0, 1, 1, 0, 0)))
    assert combine(lin, MeasuredRate("linear", rate=0.9)).agreement
    assert not combine(lin, MeasuredRate("inconclusive")).agreement
    good = MeasuredRate("power_law", exponent=-0.52, ci=(-0.55, -0.49))
    assert combine(sub, good).agreement
    bad = MeasuredRate("power_law", exponent=-1.4, ci=(-1.5, -1.3))
    assert not combine(sub, bad).agreement


# -- prediction vs measurement on generated populations ----------------------


def test_population_rank_condition_measures_linear():
    rng = _rng(77, 0)
    for _ in range(12):
        pen = linear_rank_pencil(rng, 5)
        assert classify(pen).predicted == "linear"
        trace = run_ap(pencil_to_float(pen), 0.05, max_iter=10**5, tol=1e-200)
        assert fit_rate(trace).kind == "linear"


def test_population_tight_sublinear_measures_half():
    rng = _rng(5, 0)
    for _ in range(6):
        pen = tight_sublinear_pencil(rng, 5)
        v = classify(pen)
        assert v.predicted == "sublinear_half"
        assert v.tight
        trace = run_ap(pencil_to_float(pen), 0.1, max_iter=10**5, tol=0.0)
        m = fit_rate(trace)
        assert m.kind == "power_law"
        assert m.exponent == pytest.approx(-0.5, abs=0.1)
        assert combine(v, m).agreement
