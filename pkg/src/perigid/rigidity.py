"""Periodic rigidity matrix and infinitesimal analysis.

Motion vectors are laid out as (dn + d^2) coordinates: first the velocity of
each vertex-orbit representative (d entries per orbit, in graph order), then
the lattice velocity column by column (generator 1 first).  Constraint rows
are stored one per edge orbit: for edge (i, j, w) with realized vector e the
row carries -e in block i, +e in block j (cancelling when i = j), and
e_r * w_c at lattice position (r, c).  The factor 2 from differentiating
squared lengths is dropped; it does not change ranks, nullspaces, or signs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    IllConditionedError,
    NonUniqueStressError,
    NoStressError,
    NumericalFailureError,
    ZeroPivotError,
)
from .framework import PeriodicFramework, QuotientGraph

DEFAULT_RANK_TOL = 1e-9


def motion_size(graph: QuotientGraph) -> int:
    d = graph.dimension
    return d * graph.n + d * d


def lattice_column(graph: QuotientGraph, generator: int, coord: int) -> int:
    """Column index of lattice velocity entry (row=coord, generator)."""
    d = graph.dimension
    return d * graph.n + generator * d + coord


def unpack_motion(graph: QuotientGraph, vec: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split a motion vector into vertex velocities (n, d) and lattice velocity (d, d)."""
    d, n = graph.dimension, graph.n
    vec = np.asarray(vec, dtype=float)
    pdot = vec[: d * n].reshape(n, d)
    ldot = vec[d * n :].reshape(d, d, order="F")
    return pdot, ldot


def pack_motion(graph: QuotientGraph, pdot: np.ndarray, ldot: np.ndarray) -> np.ndarray:
    return np.concatenate([np.asarray(pdot, float).reshape(-1), np.asarray(ldot, float).reshape(-1, order="F")])


def rigidity_rows(graph: QuotientGraph, positions: np.ndarray, lattice: np.ndarray) -> np.ndarray:
    """Rigidity rows for explicit coordinates (positions indexed in orbit order)."""
    d, n = graph.dimension, graph.n
    index = {orbit: i for i, orbit in enumerate(graph.vertex_orbits)}
    rows = np.zeros((graph.m, motion_size(graph)))
    for k, (tail, head, shift) in enumerate(graph.edge_orbits):
        w = np.asarray(shift, dtype=float)
        i, j = index[tail], index[head]
        e = positions[j] + lattice @ w - positions[i]
        rows[k, i * d : (i + 1) * d] -= e
        rows[k, j * d : (j + 1) * d] += e
        rows[k, n * d :] += np.outer(e, w).reshape(-1, order="F")
    return rows


def rigidity_matrix(fw: PeriodicFramework) -> np.ndarray:
    """Constraint rows of the framework, one per edge orbit: shape (m, dn + d^2)."""
    positions = np.array([fw.placement.positions[o] for o in fw.graph.vertex_orbits])
    return rigidity_rows(fw.graph, positions, fw.placement.lattice)


def trivial_motion_basis(fw: PeriodicFramework) -> np.ndarray:
    """The d + C(d,2) motions induced by translations and rotations.

    Translations move every representative by the same vector and leave the
    lattice fixed; rotations apply a skew map S to positions and lattice
    alike, so each constraint row evaluates to <e, S e> = 0.
    """
    d, n = fw.dimension, fw.n
    size = motion_size(fw.graph)
    out = []
    for a in range(d):
        v = np.zeros(size)
        for i in range(n):
            v[i * d + a] = 1.0
        out.append(v)
    lattice = fw.placement.lattice
    for a in range(d):
        for b in range(a + 1, d):
            v = np.zeros(size)
            for i, orbit in enumerate(fw.graph.vertex_orbits):
                p = fw.placement.positions[orbit]
                v[i * d + a] = -p[b]
                v[i * d + b] = p[a]
            for c in range(d):
                v[n * d + c * d + a] = -lattice[b, c]
                v[n * d + c * d + b] = lattice[a, c]
            out.append(v)
    return np.array(out)


@dataclass(frozen=True, eq=False)
class RigidityReport:
    rank: int
    trivial_basis: np.ndarray  # (d + C(d,2), dn + d^2)
    flex_basis: np.ndarray  # (f, dn + d^2), orthonormal, orthogonal to trivial
    stress_basis: np.ndarray  # (s, m), orthonormal left-nullspace vectors
    dof: int
    tolerance_used: float

    @property
    def stress_dim(self) -> int:
        return self.stress_basis.shape[0]


def _rank_from_singular_values(s: np.ndarray, tol: float) -> int:
    if s.size == 0:
        return 0
    smax = float(s[0])
    threshold = tol * smax
    rank = int(np.sum(s > threshold))
    if 0 < rank < s.size:
        gap = float(s[rank - 1] - s[rank])
        if gap < 10.0 * tol * smax:
            raise IllConditionedError(
                f"singular values {s[rank - 1]:.3e} and {s[rank]:.3e} hug the rank "
                f"threshold {threshold:.3e}; rank is ambiguous"
            )
    return rank


def analyze(fw: PeriodicFramework, tol: float = DEFAULT_RANK_TOL) -> RigidityReport:
    """Rank, trivial motions, nontrivial flexes, stresses, and DOF count.

    Rank comes from an SVD with threshold tol * (largest singular value).
    The flex basis spans nullspace intersected with the orthogonal complement
    of the trivial motions; the stress basis spans the left nullspace.
    """
    matrix = rigidity_matrix(fw)
    m, size = matrix.shape
    trivial = trivial_motion_basis(fw)
    t = trivial.shape[0]

    if m == 0:
        rank = 0
        null_basis = np.eye(size)
        stress_basis = np.zeros((0, 0))
    else:
        u, s, vt = np.linalg.svd(matrix)
        rank = _rank_from_singular_values(s, tol)
        null_basis = vt[rank:]
        stress_basis = u[:, rank:].T

    q_triv, _ = np.linalg.qr(trivial.T)
    f = (size - rank) - t
    if f < 0:
        raise IllConditionedError(
            f"nullity {size - rank} smaller than the {t} trivial motions"
        )
    if f == 0:
        flex_basis = np.zeros((0, size))
    else:
        residual = null_basis - (null_basis @ q_triv) @ q_triv.T
        _, sg, vg = np.linalg.svd(residual)
        # Projected orthonormal rows have singular values 1 (flex directions)
        # or 0 (trivial directions); anything else means the split failed.
        kept = int(np.sum(sg > 0.5))
        if kept != f:
            raise IllConditionedError(
                f"flex-space projection produced {kept} directions, expected {f}"
            )
        flex_basis = vg[:f]

    return RigidityReport(
        rank=rank,
        trivial_basis=trivial,
        flex_basis=flex_basis,
        stress_basis=stress_basis,
        dof=f,
        tolerance_used=tol,
    )


def stress_coefficients(
    fw: PeriodicFramework,
    report: RigidityReport,
    normalize_edge: int,
    value: float = 1.0,
) -> np.ndarray:
    """The unique stress, rescaled so entry `normalize_edge` equals `value`."""
    s = report.stress_dim
    if s == 0:
        raise NoStressError("framework carries no stress")
    if s > 1:
        raise NonUniqueStressError(f"stress space has dimension {s}")
    stress = report.stress_basis[0]
    if not 0 <= normalize_edge < fw.m:
        raise IndexError(f"edge orbit index {normalize_edge} out of range 0..{fw.m - 1}")
    pivot = stress[normalize_edge]
    if abs(pivot) <= report.tolerance_used * float(np.linalg.norm(stress)):
        raise ZeroPivotError(f"stress vanishes at edge orbit {normalize_edge}")
    stress = stress * (value / pivot)

    matrix = rigidity_matrix(fw)
    residual = float(np.linalg.norm(stress @ matrix))
    scale = float(np.linalg.norm(matrix)) * float(np.linalg.norm(stress))
    if residual > 1e-9 * max(scale, 1.0):
        raise NumericalFailureError(
            f"stress residual {residual:.3e} exceeds tolerance"
        )
    return stress


def is_minimally_rigid(fw: PeriodicFramework, tol: float = DEFAULT_RANK_TOL) -> bool:
    """True iff rank = m = dn + C(d,2)."""
    d = fw.dimension
    target = d * fw.n + d * (d - 1) // 2
    report = analyze(fw, tol)
    return report.rank == fw.m == target


# ---------------------------------------------------------------------------
# Report serialization.

def _f17(x: float) -> str:
    return format(float(x), ".17g")


def _json_matrix(rows: np.ndarray) -> str:
    return "[" + ", ".join("[" + ", ".join(_f17(x) for x in row) + "]" for row in rows) + "]"


def report_to_json(report: RigidityReport) -> str:
    return (
        "{"
        + f'"rank": {report.rank}, "dof": {report.dof}, '
        + f'"stress_dim": {report.stress_dim}, '
        + f'"flex_basis": {_json_matrix(report.flex_basis)}, '
        + f'"stress_basis": {_json_matrix(report.stress_basis)}, '
        + f'"tolerance": {_f17(report.tolerance_used)}'
        + "}"
    )
