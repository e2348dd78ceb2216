"""Exact eigenvalue perturbation analysis of linearly perturbed PSD
matrices and convergence-rate prediction for alternating projections
between the PSD cone and a line."""

from .analysis import (
    MeasuredRate,
    RateVerdict,
    SDIndicator,
    canonicalize,
    classify,
    combine,
    fit_rate,
    sd_indicator,
)
from .charpoly import (
    BivariatePoly,
    PerturbedPencil,
    brute_force_charpoly,
    degeneracy_cascade,
    edge_coefficient,
    expand_charpoly,
)
from .errors import (
    ContractError,
    DimensionError,
    DivergenceError,
    DomainError,
    FullRankMatrixError,
    InvariantViolation,
    NumericalError,
    PsdlineError,
    TrackingError,
)
from .exact_linalg import ExactMatrix, det, matrix_from_json, matrix_to_json, rank
from .newton_diagram import NewtonDiagram, build_diagram, leading_terms
from .projections import (
    APTrace,
    FloatSymMatrix,
    LinePencil,
    ap_step_matrix,
    ap_step_scalar,
    project_line,
    project_psd,
    run_ap,
)
from .verify import run_verification

__all__ = [
    "APTrace",
    "BivariatePoly",
    "ContractError",
    "DimensionError",
    "DivergenceError",
    "DomainError",
    "ExactMatrix",
    "FloatSymMatrix",
    "FullRankMatrixError",
    "InvariantViolation",
    "LinePencil",
    "MeasuredRate",
    "NewtonDiagram",
    "NumericalError",
    "PerturbedPencil",
    "PsdlineError",
    "RateVerdict",
    "SDIndicator",
    "TrackingError",
    "ap_step_matrix",
    "ap_step_scalar",
    "brute_force_charpoly",
    "build_diagram",
    "canonicalize",
    "classify",
    "combine",
    "degeneracy_cascade",
    "det",
    "edge_coefficient",
    "expand_charpoly",
    "fit_rate",
    "leading_terms",
    "matrix_from_json",
    "matrix_to_json",
    "project_line",
    "project_psd",
    "rank",
    "run_ap",
    "run_verification",
    "sd_indicator",
]
