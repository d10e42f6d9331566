"""Convex-cone analysis of vertex stars.

The star of a vertex orbit collects the edge vectors emanating from its
representative, one per incidence and both orientations for same-orbit edges.
On top of the feasibility oracle this module decides positive dependence
(a zero combination with strictly positive coefficients), computes the
lineality space of the generated cone, finds separating hyperplanes, and
tests pointedness in codimension two (lineality dimension at most d - 2),
the local condition every vertex star must satisfy where an expansive
deformation is effective.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import NumericalFailureError, UnknownOrbitError
from .feasibility import DEFAULT_LP_TOL, solve_linear_feasibility
from .framework import PeriodicFramework


@dataclass(frozen=True, eq=False)
class VectorStar:
    vertex_orbit: str
    vectors: np.ndarray  # (k, d); float, or object dtype holding Fractions

    def __len__(self) -> int:
        return len(self.vectors)

    def as_float(self) -> np.ndarray:
        return np.asarray(self.vectors, dtype=float)


@dataclass(frozen=True, eq=False)
class ConeAnalysis:
    orbit: str
    lineality_basis: np.ndarray  # (L, d) orthonormal rows
    pointed_codim2: bool
    separating_normal: np.ndarray | None
    positive_dependence: np.ndarray | None

    @property
    def lineality_dim(self) -> int:
        return self.lineality_basis.shape[0]


def vertex_star(fw: PeriodicFramework, orbit: str) -> VectorStar:
    """Edge vectors at the representative of `orbit`, one per incidence.

    An edge orbit with tail = orbit contributes its edge vector, one with
    head = orbit the negated vector; a same-orbit edge contributes both.
    """
    if orbit not in fw.placement.positions:
        raise UnknownOrbitError(orbit)
    vectors = []
    for k, e in enumerate(fw.graph.edge_orbits):
        v = fw.edge_vector(k)
        if e.tail == orbit:
            vectors.append(v)
        if e.head == orbit:
            vectors.append(-v)
    out = np.array(vectors) if vectors else np.zeros((0, fw.dimension))
    return VectorStar(orbit, out)


def _star_matrix(star: VectorStar) -> list[list]:
    """Equality rows (one per coordinate) of sum_i a_i v_i."""
    vs = star.vectors
    d = len(vs[0])
    return [[vs[i][c] for i in range(len(vs))] for c in range(d)]


def positive_dependence(
    star: VectorStar, tol: float = DEFAULT_LP_TOL, exact: bool | None = None
):
    """Coefficients a with every a_i >= 1 and sum a_i v_i = 0, else None.

    Strict positivity is normalized to >= 1: dependences form a cone, so a
    strictly positive combination exists iff one with entries >= 1 does.
    """
    if len(star) == 0:
        raise ValueError("empty star")
    rows = _star_matrix(star)
    d = len(rows)
    zero = Fraction(0) if _wants_exact(star, exact) else 0.0
    return solve_linear_feasibility(
        rows, [zero] * d, [1] * len(star), tol=tol, exact=exact
    )


def _wants_exact(star: VectorStar, exact: bool | None) -> bool:
    if exact is not None:
        return exact
    return all(
        isinstance(x, (int, Fraction)) and not isinstance(x, bool)
        for row in star.vectors
        for x in row
    )


def _in_cone(vectors: np.ndarray, target: np.ndarray, tol: float) -> bool:
    d = vectors.shape[1]
    rows = [[vectors[i][c] for i in range(len(vectors))] for c in range(d)]
    sol = solve_linear_feasibility(rows, list(target), [0] * len(vectors), tol=tol)
    return sol is not None


def lineality_space(star: VectorStar, tol: float = DEFAULT_LP_TOL) -> np.ndarray:
    """Orthonormal basis of the largest linear subspace inside the star cone.

    A generator v_i lies in the lineality space exactly when -v_i is still a
    nonnegative combination of the generators; the members span the whole
    linear part, so an SVD of that subset gives the basis.
    """
    if len(star) == 0:
        raise ValueError("empty star")
    vs = star.as_float()
    members = [v for v in vs if _in_cone(vs, -v, tol)]
    if not members:
        return np.zeros((0, vs.shape[1]))
    stack = np.array(members)
    _, s, vt = np.linalg.svd(stack)
    dim = int(np.sum(s > tol * s[0]))
    return vt[:dim]


def refute_expansive_at_vertex(star: VectorStar, tol: float = DEFAULT_LP_TOL) -> bool:
    """True when a positive dependence rules out effective local expansion.

    A zero combination with all-positive coefficients forces every velocity
    assignment that preserves the bar lengths to close at least one pair
    whenever it opens another, so no strictly expansive assignment exists.
    """
    return positive_dependence(star, tol) is not None


def analyze_star(
    star: VectorStar, d: int | None = None, tol: float = DEFAULT_LP_TOL
) -> ConeAnalysis:
    """Full cone report: lineality, codim-2 pointedness, separating normal.

    A separating normal is produced whenever the lineality dimension is at
    most d - 1: it vanishes on the lineality space and is strictly positive
    on every star vector outside it.
    """
    if len(star) == 0:
        raise ValueError("empty star")
    vs = star.as_float()
    if d is None:
        d = vs.shape[1]
    lin = lineality_space(star, tol)
    ldim = lin.shape[0]
    pointed2 = ldim <= d - 2

    normal = None
    if ldim <= d - 1:
        normal = _separating_normal(vs, lin, tol)

    dep = positive_dependence(VectorStar(star.vertex_orbit, vs), tol)
    return ConeAnalysis(
        orbit=star.vertex_orbit,
        lineality_basis=lin,
        pointed_codim2=pointed2,
        separating_normal=normal,
        positive_dependence=dep,
    )


def _separating_normal(vs: np.ndarray, lin: np.ndarray, tol: float) -> np.ndarray:
    d = vs.shape[1]
    units = vs / np.linalg.norm(vs, axis=1, keepdims=True)
    if lin.shape[0]:
        residual = units - (units @ lin.T) @ lin
        outside = units[np.linalg.norm(residual, axis=1) > tol]
    else:
        outside = units
    if len(outside) == 0:
        # Everything lies in the lineality span; any unit normal to it works.
        _, _, vt = np.linalg.svd(lin) if lin.shape[0] else (None, None, np.eye(d))
        return vt[lin.shape[0]]
    h = solve_linear_feasibility(
        [list(u) for u in lin],
        [0.0] * lin.shape[0],
        [None] * d,
        inequalities=[list(u) for u in outside],
        ineq_rhs=[1.0] * len(outside),
        tol=tol,
    )
    if h is None:
        raise NumericalFailureError(
            "no separating hyperplane found although the quotient cone is pointed"
        )
    return h / np.linalg.norm(h)


def strict_expansion_probe(
    star: VectorStar, tol: float = DEFAULT_LP_TOL, exact: bool | None = None
):
    """Velocity assignment opening some pair strictly, or None.

    Unknowns are one velocity per star vector (the hub stays fixed); bar
    constraints <v_i, vdot_i> = 0 hold exactly, every pair satisfies
    <v_i - v_j, vdot_i - vdot_j> >= 0, and a probe row asks for total opening
    >= 1.  Because solutions scale, feasibility is equivalent to the
    existence of a strictly expansive assignment.
    """
    if len(star) == 0:
        raise ValueError("empty star")
    vs = star.vectors
    k = len(vs)
    d = len(vs[0])
    nvars = k * d

    def empty_row():
        return [0] * nvars

    eq_rows, eq_b = [], []
    for i in range(k):
        row = empty_row()
        for c in range(d):
            row[i * d + c] = vs[i][c]
        eq_rows.append(row)
        eq_b.append(0)

    ineq_rows = []
    probe = empty_row()
    for i in range(k):
        for j in range(i + 1, k):
            row = empty_row()
            for c in range(d):
                diff = vs[i][c] - vs[j][c]
                row[i * d + c] = diff
                row[j * d + c] = -diff
                probe[i * d + c] += diff
                probe[j * d + c] -= diff
            ineq_rows.append(row)
    ineq_rows.append(probe)

    sol = solve_linear_feasibility(
        eq_rows,
        eq_b,
        [None] * nvars,
        inequalities=ineq_rows,
        ineq_rhs=[0] * (len(ineq_rows) - 1) + [1],
        tol=tol,
        exact=exact,
    )
    if sol is None:
        return None
    if isinstance(sol, list):
        return [sol[i * d : (i + 1) * d] for i in range(k)]
    return sol.reshape(k, d)


# ---------------------------------------------------------------------------
# Report serialization.

def _f17(x: float) -> str:
    return format(float(x), ".17g")


def _json_vec(v) -> str:
    if v is None:
        return "null"
    return "[" + ", ".join(_f17(x) for x in v) + "]"


def star_report_json(analysis: ConeAnalysis) -> str:
    import json as _json

    return (
        "{"
        + f'"orbit": {_json.dumps(analysis.orbit)}, '
        + f'"lineality_dim": {analysis.lineality_dim}, '
        + f'"pointed_codim2": {"true" if analysis.pointed_codim2 else "false"}, '
        + f'"separating_normal": {_json_vec(analysis.separating_normal)}, '
        + f'"positive_dependence": {_json_vec(analysis.positive_dependence)}'
        + "}"
    )
