"""Floating-point projections and the alternating-projection iteration.

The line is parametrized as phi(t) = A + t*B; projecting onto the PSD
cone clips negative eigenvalues, projecting back onto the line is an
inner product.  One full sweep is available in two independent forms: a
matrix path that literally composes the two projections, and a scalar
path driven by the eigenvalue-derivative formula
T = t - sum_{lambda_i(t) < 0} lambda_i(t) * v_i^T B v_i / ||B||_F^2,
whose agreement is itself a tested identity.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, DivergenceError, DomainError

_SYM_TOL = 1e-14


class FloatSymMatrix:
    """Dense symmetric matrix of doubles; symmetrized on construction."""

    __slots__ = ("n", "data")

    def __init__(self, data):
        arr = np.asarray(data, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ContractError("need a square 2-D array")
        scale = np.linalg.norm(arr)
        asym = np.linalg.norm(arr - arr.T)
        if scale > 0 and asym > _SYM_TOL * max(scale, 1.0) * 10:
            raise ContractError(f"input asymmetry {asym:.3e} too large")
        self.n = arr.shape[0]
        self.data = (arr + arr.T) / 2.0

    @classmethod
    def from_array(cls, arr) -> "FloatSymMatrix":
        return cls(arr)

    def norm(self) -> float:
        return float(np.linalg.norm(self.data))

    def __sub__(self, other: "FloatSymMatrix") -> "FloatSymMatrix":
        return FloatSymMatrix(self.data - other.data)

    def __repr__(self):
        return f"FloatSymMatrix({self.data!r})"


def eigh(M: FloatSymMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of M."""
    w, V = np.linalg.eigh(M.data)
    return w, V


@dataclass(frozen=True)
class LinePencil:
    """The line {A + t*B} through a PSD matrix A with direction B."""

    A: FloatSymMatrix
    B: FloatSymMatrix
    B_norm_sq: float = field(init=False)

    def __post_init__(self):
        if self.A.n != self.B.n:
            raise ContractError("A and B must have the same size")
        bn = float(np.sum(self.B.data * self.B.data))
        if bn == 0.0:
            raise DomainError("direction matrix B must be nonzero")
        w = np.linalg.eigvalsh(self.A.data)
        if w.min() < -1e-10 * max(1.0, abs(w).max()):
            raise DomainError("base point A is not PSD within tolerance")
        object.__setattr__(self, "B_norm_sq", bn)

    def phi(self, t: float) -> FloatSymMatrix:
        return FloatSymMatrix(self.A.data + t * self.B.data)

    def b_norm(self) -> float:
        return float(np.sqrt(self.B_norm_sq))


def project_psd(U: FloatSymMatrix) -> FloatSymMatrix:
    """Nearest PSD matrix in Frobenius norm: clip negative eigenvalues."""
    w, V = eigh(U)
    w = np.maximum(w, 0.0)
    return FloatSymMatrix((V * w) @ V.T)


def project_line(V: FloatSymMatrix, pencil: LinePencil) -> float:
    """Parameter t of the nearest point A + t*B on the line."""
    return float(np.sum(pencil.B.data * (V.data - pencil.A.data)) / pencil.B_norm_sq)


def ap_step_matrix(t: float, pencil: LinePencil) -> float:
    """One alternating-projection sweep via the explicit projections."""
    return project_line(project_psd(pencil.phi(t)), pencil)


def ap_step_scalar(t: float, pencil: LinePencil) -> float:
    """One sweep via eigenvalues of phi(t) and their derivatives.

    Uses lambda_i'(t) = v_i^T B v_i; membership of the negative set is
    by strict sign of the eigenvalue.
    """
    w, V = eigh(pencil.phi(t))
    neg = w < 0.0
    if not np.any(neg):
        return t
    Vn = V[:, neg]
    deriv = np.einsum("ij,ij->j", Vn, pencil.B.data @ Vn)
    return t - float(np.dot(w[neg], deriv)) / pencil.B_norm_sq


@dataclass
class APTrace:
    """Iteration history: parallel arrays of k, t_k and ||U_k - A||_F."""

    k: list[int]
    t: list[float]
    err: list[float]
    path: str

    def __len__(self) -> int:
        return len(self.k)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("k,t_k,err_k\n")
        for k, t, e in zip(self.k, self.t, self.err):
            buf.write(f"{k},{t:.17g},{e:.17g}\n")
        return buf.getvalue()


def run_ap(
    pencil: LinePencil,
    t0: float,
    max_iter: int = 10**6,
    tol: float = 1e-12,
    path: str = "scalar",
) -> APTrace:
    """Iterate the sweep map from t0 until |t_k| < tol or max_iter.

    Because every iterate stays on the line, the error is exactly
    |t_k| * ||B||_F.  A growth guard raises when |t_k| exceeds 1000|t0|,
    which usually signals that the line meets the cone in more than one
    point (the rate theory assumes a singleton intersection).
    """
    if t0 == 0.0:
        raise DomainError("t0 must be nonzero")
    if max_iter < 1:
        raise DomainError("max_iter must be >= 1")
    if path not in ("scalar", "matrix"):
        raise DomainError(f"unknown iteration path {path!r}")
    step = ap_step_scalar if path == "scalar" else ap_step_matrix
    bnorm = pencil.b_norm()
    trace = APTrace(k=[0], t=[t0], err=[abs(t0) * bnorm], path=path)
    t = t0
    for k in range(1, max_iter + 1):
        t_next = step(t, pencil)
        if t_next == t:
            # already a fixed point (phi(t) is PSD, or exact stall)
            break
        trace.k.append(k)
        trace.t.append(t_next)
        trace.err.append(abs(t_next) * bnorm)
        if abs(t_next) > 1e3 * abs(t0):
            raise DivergenceError(
                f"|t_{k}| = {abs(t_next):.3e} exceeds 1000|t0|; "
                "singleton-intersection premise likely violated"
            )
        if abs(t_next) < tol:
            break
        t = t_next
    return trace
