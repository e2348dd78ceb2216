"""Newton diagram of the perturbed characteristic polynomial.

The exponent support of p(t, x) is translated so the monic corner sits
at the origin and rotated a quarter turn: a term t^a x^b becomes the
diagram point (n - b, a).  The lower convex hull of these points, with
the final edge prolonged to the vertical line at n, carries the leading
behavior of the eigenvalue branches: each edge of slope d accounts for
as many branches of leading degree d as its horizontal extent, and
their leading coefficients are the nonzero roots of the edge polynomial.

All hull geometry is exact rational arithmetic; only root finding for
edge polynomials is floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .charpoly import BivariatePoly, PerturbedPencil, expand_charpoly
from .errors import ContractError, DomainError, InvariantViolation, TrackingError
from .exact_linalg import format_rational

Point = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class Edge:
    start: Point
    end: Point
    slope: Fraction
    mult: int  # horizontal extent = number of eigenvalue branches
    extended: bool = False


@dataclass(frozen=True)
class NewtonDiagram:
    n: int
    points: tuple[tuple[int, int], ...]
    vertices: tuple[tuple[int, int], ...]
    edges: tuple[Edge, ...]


def _lower_hull(points: list[tuple[int, int]]) -> list[tuple[int, int]]:
    pts = sorted(points)
    best: dict[int, tuple[int, int]] = {}
    for h, v in pts:
        if h not in best or v < best[h][1]:
            best[h] = (h, v)
    pts = sorted(best.values())
    hull: list[tuple[int, int]] = []
    for p in pts:
        while len(hull) > 1:
            (x0, y0), (x1, y1) = hull[-2], hull[-1]
            # drop hull[-1] unless it turns strictly left (keeps hull lower)
            if (x1 - x0) * (p[1] - y0) - (p[0] - x0) * (y1 - y0) <= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def build_diagram(poly: BivariatePoly) -> NewtonDiagram:
    """Lower hull of the transformed support, with the final-edge extension."""
    n = poly.x_degree()
    if poly.coeff(0, n) != 1:
        raise ContractError("input polynomial is not monic in x")
    points = sorted((n - b, a) for (a, b) in poly.terms)
    hull = _lower_hull(points)
    edges: list[Edge] = []
    for (h0, v0), (h1, v1) in zip(hull, hull[1:]):
        slope = Fraction(v1 - v0, h1 - h0)
        edges.append(
            Edge(
                (Fraction(h0), Fraction(v0)),
                (Fraction(h1), Fraction(v1)),
                slope,
                h1 - h0,
            )
        )
    rightmost = hull[-1]
    if rightmost[0] < n:
        # Prolong the segment containing the rightmost point.  Branches
        # covered only by the extension have identically vanishing
        # coefficient rows; the flat prolongation of a vertex-only hull
        # covers identically zero eigenvalues.
        slope = edges[-1].slope if edges else Fraction(0)
        h0, v0 = rightmost
        end = (Fraction(n), Fraction(v0) + slope * (n - h0))
        if edges:
            last = edges[-1]
            edges[-1] = Edge(last.start, end, slope, n - int(last.start[0]), True)
        else:
            edges.append(Edge((Fraction(h0), Fraction(v0)), end, slope, n - h0, True))
    return NewtonDiagram(
        n=n,
        points=tuple(points),
        vertices=tuple(hull),
        edges=tuple(edges),
    )


def edge_polynomial(
    diagram: NewtonDiagram, edge_index: int, poly: BivariatePoly
) -> list[Fraction]:
    """Coefficients [x^0, x^1, ...] of f_edge(x), collected exactly.

    Collinear support points interior to the edge contribute; points on
    the prolonged part cannot exist by construction.
    """
    if not (0 <= edge_index < len(diagram.edges)):
        raise DomainError(f"no edge with index {edge_index}")
    e = diagram.edges[edge_index]
    n = diagram.n
    h0, v0 = e.start
    h1, v1 = e.end
    coeffs: dict[int, Fraction] = {}
    for (a, b), c in poly.terms.items():
        h, v = n - b, a
        if h0 <= h <= h1 and (v - v0) * (h1 - h0) == (h - h0) * (v1 - v0):
            coeffs[b] = c
    deg = max(coeffs, default=0)
    return [coeffs.get(k, Fraction(0)) for k in range(deg + 1)]


def _real_roots(coeffs: list[Fraction]) -> list[tuple[float, float]]:
    """Nonzero roots of sum c_k x^k as (root, error bound) pairs.

    Companion-matrix roots polished by Newton steps; the bound is the
    size of the final correction.
    """
    cs = np.array([float(c) for c in coeffs])
    nz = np.nonzero(cs)[0]
    if len(nz) == 0:
        return []
    lo = nz[0]
    reduced = cs[lo:]  # strip x^lo factor: drops zero roots
    if len(reduced) == 1:
        return []
    roots = np.roots(reduced[::-1])
    dps = np.polyder(np.poly1d(reduced[::-1]))
    p = np.poly1d(reduced[::-1])
    out = []
    for z in roots:
        if abs(z.imag) > 1e-7 * (1 + abs(z)):
            out.append((complex(z), float("nan")))
            continue
        x = float(z.real)
        step = 0.0
        for _ in range(50):
            d = dps(x)
            if d == 0:
                break
            step = p(x) / d
            if abs(step) < 1e-16 * (1 + abs(x)):
                break
            x -= step
        out.append((x, abs(step)))
    return out


@dataclass(frozen=True)
class LeadingTerm:
    degree: Fraction
    coefficients: tuple[tuple[float, float], ...]  # (root, error bound)
    count: int


def leading_terms(pencil: PerturbedPencil) -> list[LeadingTerm]:
    """Leading degree and coefficients for all n eigenvalue branches.

    One entry per diagram edge, slope-0 branches included; raises when a
    slope above 2 appears, which the PSD structure forbids.
    """
    return leading_terms_from_poly(expand_charpoly(pencil))


def leading_terms_from_poly(poly: BivariatePoly) -> list[LeadingTerm]:
    diagram = build_diagram(poly)
    out = []
    for idx, e in enumerate(diagram.edges):
        if e.slope > 2:
            raise InvariantViolation(
                f"diagram slope {e.slope} exceeds 2 for a PSD pencil"
            )
        coeffs = edge_polynomial(diagram, idx, poly)
        roots = tuple(_real_roots(coeffs))
        out.append(LeadingTerm(degree=e.slope, coefficients=roots, count=e.mult))
    return out


def numeric_leading_degree(
    pencil: PerturbedPencil,
    branch: int,
    t_samples: tuple[float, ...] = (1e-3, 1e-4, 1e-5, 1e-6),
    collision_tol: float = 1e-9,
) -> Fraction:
    """Log-log slope estimate of |lambda_branch(t)|, rounded to q <= 4.

    Branches are indexed by ascending eigenvalue order at the largest t
    sample and tracked toward t = 0 by maximal eigenvector overlap.
    """
    n = pencil.n
    if not (0 <= branch < n):
        raise DomainError(f"branch index {branch} out of range [0,{n})")
    A = np.diag([float(pk) for pk in pencil.p] + [0.0] * pencil.m)
    B = np.array([[float(x) for x in pencil.B.row(i)] for i in range(n)])
    mags = []
    prev_vecs = None
    order = None
    for t in t_samples:
        w, V = np.linalg.eigh(A + t * B)
        if prev_vecs is None:
            order = list(range(n))
            tracked_w = w
        else:
            overlap = np.abs(prev_vecs.T @ V)
            perm = [-1] * n
            used = set()
            for i in range(n):
                j = int(np.argmax(overlap[i]))
                if j in used or overlap[i, j] < 0.6:
                    # ambiguous match: only fatal if the candidates are
                    # genuinely distinct eigenvalues
                    candidates = [jj for jj in range(n) if jj not in used]
                    j = max(candidates, key=lambda jj: overlap[i, jj])
                    near = [
                        jj
                        for jj in candidates
                        if abs(w[jj] - w[j]) > collision_tol and overlap[i, jj] > 0.5
                    ]
                    if near:
                        raise TrackingError(
                            f"eigenvector overlap ambiguous at t={t}"
                        )
                perm[i] = j
                used.add(j)
            tracked_w = w[perm]
            V = V[:, perm]
        prev_vecs = V
        mags.append(np.abs(tracked_w))
    mags = np.array(mags)  # rows: t samples, cols: tracked branches
    lam = mags[:, branch]
    if np.all(lam < 1e-13):
        raise TrackingError("branch magnitude at noise level; exponent undefined")
    logs_t = np.log(np.array(t_samples))
    logs_l = np.log(np.maximum(lam, 1e-300))
    slope = np.polyfit(logs_t, logs_l, 1)[0]
    return Fraction(float(slope)).limit_denominator(4)


def diagram_to_json(diagram: NewtonDiagram, poly: BivariatePoly) -> dict:
    edges = []
    for idx, e in enumerate(diagram.edges):
        edges.append(
            {
                "slope": format_rational(e.slope),
                "mult": e.mult,
                "f_gamma": [
                    format_rational(c) for c in edge_polynomial(diagram, idx, poly)
                ],
            }
        )
    return {
        "vertices": [[int(h), int(v)] for h, v in diagram.vertices],
        "edges": edges,
    }
