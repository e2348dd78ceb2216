"""HTTP-friendly request/response layer over the exact pipeline.

Every command of the command-line tool is a pure handler here, taking
and returning plain JSON-compatible data.  The FastAPI application in
``create_app`` exposes the same handlers over POST endpoints so the CLI
can run either in-process or as a thin client against a server.
"""

from __future__ import annotations

from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, Field

from .analysis import canonicalize, classify, combine, fit_rate, sd_indicator
from .charpoly import (
    PerturbedPencil,
    edge_coefficient,
    enumerate_edge_gammas,
    expand_charpoly,
    poly_to_json,
)
from .errors import (
    DivergenceError,
    DomainError,
    FullRankMatrixError,
    PsdlineError,
)
from .exact_linalg import (
    ExactMatrix,
    format_rational,
    matrix_from_json,
)
from .newton_diagram import build_diagram, diagram_to_json, leading_terms_from_poly
from .projections import FloatSymMatrix, LinePencil, run_ap
from .verify import run_verification


class MatrixModel(BaseModel):
    rows: int
    cols: int
    data: list[list[Any]]


class InstanceModel(BaseModel):
    A: MatrixModel
    B: MatrixModel


class IterateOptions(BaseModel):
    t0: float
    max_iter: int = 10**6
    tol: float = 1e-12
    path: str = "scalar"


class IterateRequest(InstanceModel, IterateOptions):
    pass


class VerifyRequest(BaseModel):
    seed: int = 42
    n_max: int = Field(default=5, le=6, ge=2)
    trials: int = 100


class PolyTermModel(BaseModel):
    t: int
    x: int
    c: str


class EdgeCoefficientModel(BaseModel):
    gamma: tuple[int, int]
    case: str
    value: str


class ExpandResponse(BaseModel):
    polynomial: list[PolyTermModel]
    edge_coefficients: list[EdgeCoefficientModel]
    canonicalization: Optional[dict] = None


class DiagramEdgeModel(BaseModel):
    slope: str
    mult: int
    f_gamma: list[str]


class DiagramResponse(BaseModel):
    vertices: list[list[int]]
    edges: list[DiagramEdgeModel]
    leading_terms: list[dict]
    canonicalization: Optional[dict] = None


class VerdictModel(BaseModel):
    predicted: str
    predicted_reason: str
    tight: bool
    measured: Optional[str] = None
    rate: Optional[float] = None
    exponent: Optional[float] = None
    ci: Optional[list[float]] = None
    agreement: Optional[bool] = None
    note: Optional[str] = None


class ClassifyResponse(BaseModel):
    verdict: VerdictModel
    indicator: dict


class IterateResponse(BaseModel):
    verdict: VerdictModel
    trace_csv: str


class VerifyResponse(BaseModel):
    seed: int
    n_max: int
    trials: int
    ok: bool
    total_checks: int
    failures: list[dict]


def _diagonal_zeros_last(A: ExactMatrix) -> list[int] | None:
    """1-based permutation putting positive diagonal entries first,
    or None when A is not a nonnegative diagonal matrix."""
    n = A.rows
    for i in range(n):
        for j in range(n):
            if i != j and A[i, j] != 0:
                return None
            if i == j and A[i, j] < 0:
                return None
    positive = [i + 1 for i in range(n) if A[i, i] > 0]
    zero = [i + 1 for i in range(n) if A[i, i] == 0]
    return positive + zero


def load_pencil(instance: dict) -> tuple[PerturbedPencil, dict | None]:
    """Instance JSON -> exact pencil, plus canonicalization info if the
    float path was taken.

    Nonnegative diagonal A stays exact (at most a permutation); any
    other PSD A goes through eigendecomposition and rationalization.
    """
    A = matrix_from_json(instance["A"])
    B = matrix_from_json(instance["B"])
    if A.rows != B.rows or A.cols != B.cols or not A.is_square:
        raise DomainError("A and B must be square matrices of equal size")
    perm = _diagonal_zeros_last(A)
    if perm is not None:
        p = [A[k - 1, k - 1] for k in perm if A[k - 1, k - 1] > 0]
        if len(p) == A.rows:
            raise FullRankMatrixError(
                "A has full rank: the line meets the cone interior, "
                "convergence is trivially linear"
            )
        Bp = ExactMatrix.from_rows(
            [[B[i - 1, j - 1] for j in perm] for i in perm]
        )
        return PerturbedPencil.build(p, Bp), None
    Af = FloatSymMatrix(np.array([[float(x) for x in A.row(i)] for i in range(A.rows)]))
    Bf = FloatSymMatrix(np.array([[float(x) for x in B.row(i)] for i in range(B.rows)]))
    pencil, _Q, residual = canonicalize(Af, Bf)
    return pencil, {"path": "float", "rounding_residual": residual}


def _full_rank_poly(instance: dict):
    """Characteristic polynomial when A has no zero eigenvalues.

    Outside the corank machinery; the brute-force determinant oracle
    still applies for moderate sizes."""
    from .charpoly import brute_force_charpoly

    A = matrix_from_json(instance["A"])
    B = matrix_from_json(instance["B"])
    return brute_force_charpoly(A, B)


def handle_expand(instance: dict) -> dict:
    try:
        pencil, canon = load_pencil(instance)
    except FullRankMatrixError:
        poly = _full_rank_poly(instance)
        return {
            "polynomial": poly_to_json(poly),
            "edge_coefficients": [],
            "canonicalization": {"path": "full-rank"},
        }
    poly = expand_charpoly(pencil)
    report = []
    for gamma, tag in enumerate_edge_gammas(pencil):
        rep = edge_coefficient(pencil, gamma, poly)
        report.append(
            {
                "gamma": list(gamma),
                "case": rep.edge_tag,
                "value": format_rational(rep.formula_value),
            }
        )
    return {
        "polynomial": poly_to_json(poly),
        "edge_coefficients": report,
        "canonicalization": canon,
    }


def handle_diagram(instance: dict) -> dict:
    try:
        pencil, canon = load_pencil(instance)
        poly = expand_charpoly(pencil)
    except FullRankMatrixError:
        poly = _full_rank_poly(instance)
        canon = {"path": "full-rank"}
    diagram = build_diagram(poly)
    terms = []
    for lt in leading_terms_from_poly(poly):
        terms.append(
            {
                "degree": format_rational(lt.degree),
                "count": lt.count,
                "coefficients": [
                    [c if isinstance(c, float) else repr(c), e]
                    for c, e in lt.coefficients
                ],
            }
        )
    out = diagram_to_json(diagram, poly)
    out["leading_terms"] = terms
    out["canonicalization"] = canon
    return out


def _float_line(pencil: PerturbedPencil) -> LinePencil:
    A = FloatSymMatrix(np.diag([float(pk) for pk in pencil.p] + [0.0] * pencil.m))
    B = FloatSymMatrix(
        np.array([[float(x) for x in pencil.B.row(i)] for i in range(pencil.n)])
    )
    return LinePencil(A, B)


def _transversal_verdict():
    from .analysis import RateVerdict

    return RateVerdict(
        predicted="linear",
        predicted_reason="A has full rank: transversal intersection",
    )


def handle_iterate(
    instance: dict,
    t0: float,
    max_iter: int = 10**6,
    tol: float = 1e-12,
    path: str = "scalar",
) -> dict:
    try:
        pencil, _canon = load_pencil(instance)
        predicted = classify(pencil)
        line = _float_line(pencil)
    except FullRankMatrixError:
        predicted = _transversal_verdict()
        A = matrix_from_json(instance["A"])
        B = matrix_from_json(instance["B"])
        line = LinePencil(
            FloatSymMatrix(np.array([[float(x) for x in A.row(i)] for i in range(A.rows)])),
            FloatSymMatrix(np.array([[float(x) for x in B.row(i)] for i in range(B.rows)])),
        )
    try:
        trace = run_ap(line, t0, max_iter=max_iter, tol=tol, path=path)
    except DivergenceError as exc:
        verdict = predicted.to_json()
        verdict["measured"] = "premise_violated"
        verdict["agreement"] = False
        verdict["note"] = str(exc)
        return {"verdict": verdict, "trace_csv": ""}
    note = None
    try:
        measured = fit_rate(trace)
    except DomainError as exc:
        from .analysis import MeasuredRate

        measured = MeasuredRate(kind="inconclusive")
        note = str(exc)
    verdict = combine(predicted, measured).to_json()
    if note:
        verdict["note"] = note
    return {"verdict": verdict, "trace_csv": trace.to_csv()}


def handle_classify(instance: dict) -> dict:
    try:
        pencil, _canon = load_pencil(instance)
    except FullRankMatrixError:
        return {
            "verdict": _transversal_verdict().to_json(),
            "indicator": {
                "b22_semidefiniteness": "zero",
                "b22_singular": False,
                "rank_gap": 0,
                "conclusions": ["A has full rank: no zero block to analyze"],
            },
        }
    verdict = classify(pencil).to_json()
    ind = sd_indicator(pencil)
    return {
        "verdict": verdict,
        "indicator": {
            "b22_semidefiniteness": ind.b22_semidefiniteness,
            "b22_singular": ind.b22_singular,
            "rank_gap": ind.rank_gap,
            "conclusions": list(ind.conclusions),
        },
    }


def handle_verify(seed: int = 42, n_max: int = 5, trials: int = 100) -> dict:
    report = run_verification(seed, n_max, trials)
    return report.to_json()


def create_app():
    from fastapi import FastAPI, HTTPException

    app = FastAPI(
        title="psdline",
        description="Exact eigenvalue perturbation analysis of PSD pencils "
        "and alternating-projection rate prediction.",
    )

    def guarded(fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except PsdlineError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc

    @app.post("/expand", response_model=ExpandResponse)
    def expand(req: InstanceModel):
        return guarded(handle_expand, req.model_dump())

    @app.post("/diagram", response_model=DiagramResponse)
    def diagram(req: InstanceModel):
        return guarded(handle_diagram, req.model_dump())

    @app.post("/iterate", response_model=IterateResponse)
    def iterate(req: IterateRequest):
        return guarded(
            handle_iterate,
            {"A": req.A.model_dump(), "B": req.B.model_dump()},
            t0=req.t0,
            max_iter=req.max_iter,
            tol=req.tol,
            path=req.path,
        )

    @app.post("/classify", response_model=ClassifyResponse)
    def classify_ep(req: InstanceModel):
        return guarded(handle_classify, req.model_dump())

    @app.post("/verify", response_model=VerifyResponse)
    def verify(req: VerifyRequest):
        return guarded(handle_verify, req.seed, req.n_max, req.trials)

    return app
