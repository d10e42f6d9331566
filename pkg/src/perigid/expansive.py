"""Infinitesimal expansive cone of a periodic framework.

A motion is expansive when the distance between every pair of joints is
nondecreasing.  For a quotient description that quantifies over all pairs of
vertex-orbit translates; here the pair set is truncated to lattice shifts
with max-norm at most a radius R, and the resulting halfspace rows are
expressed in the coordinates of the nontrivial flex basis (trivial motions
satisfy every pair row with equality and would only add spurious lineality).
Extremal rays come from a double description pass over the deduplicated
halfspaces; a stability probe at R + 1 makes truncation bias observable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .cones import ConeAnalysis, analyze_star, vertex_star
from .errors import (
    FlexDimensionTooLargeError,
    FrameworkError,
    NonPointedConeError,
    NotAFlexError,
    NumericalFailureError,
)
from .framework import PeriodicFramework
from .rigidity import RigidityReport, rigidity_matrix

DEFAULT_RADIUS = 2
DEFAULT_CONE_TOL = 1e-9
MAX_FLEX_DIM = 6
_MERGE_TOL = 1e-8  # angular tolerance for parallel halfspace rows
_RAY_MATCH_TOL = 1e-6  # angular tolerance when comparing ray sets


@dataclass(frozen=True, eq=False)
class PairConstraint:
    """One truncated pair inequality <s, sdot> >= 0 in rigidity coordinates.

    The row evaluates a motion u to <s, pdot_b + ldot w - pdot_a> where
    s = p_b + lattice w - p_a; it is invariant under orientation reversal,
    and pairs are stored with (a, b, w) lexicographically minimal versus
    (b, a, -w).  Same-orbit pairs with w a generator shift encode period
    length constraints.
    """

    orbit_a: str
    orbit_b: str
    shift: tuple[int, ...]
    separation: np.ndarray
    row: np.ndarray

    @property
    def key(self) -> tuple[str, str, tuple[int, ...]]:
        return (self.orbit_a, self.orbit_b, self.shift)


def canonical_pair_key(a: str, b: str, shift) -> tuple[str, str, tuple[int, ...]]:
    shift = tuple(int(c) for c in shift)
    if a == b and all(c == 0 for c in shift):
        raise FrameworkError(f"({a}, {b}, {shift}) pairs a vertex with itself")
    fwd = (a, b, shift)
    rev = (b, a, tuple(-c for c in shift))
    return min(fwd, rev)


def pair_constraint(fw: PeriodicFramework, a: str, b: str, shift) -> PairConstraint:
    a, b, shift = canonical_pair_key(a, b, shift)
    d, n = fw.dimension, fw.n
    ia, ib = fw.orbit_index(a), fw.orbit_index(b)
    w = np.asarray(shift, dtype=float)
    s = fw.placement.positions[b] + fw.placement.lattice @ w - fw.placement.positions[a]
    row = np.zeros(d * n + d * d)
    row[ia * d : (ia + 1) * d] -= s
    row[ib * d : (ib + 1) * d] += s
    row[n * d :] += np.outer(s, w).reshape(-1, order="F")
    return PairConstraint(a, b, shift, s, row)


def pair_keys(orbits, d: int, radius: int) -> list[tuple[str, str, tuple[int, ...]]]:
    """Canonical pair keys with shift max-norm at most `radius`."""
    if radius < 1:
        raise ValueError("radius must be at least 1")
    box = list(itertools.product(range(-radius, radius + 1), repeat=d))
    keys = []
    ordered = sorted(orbits)
    for i, a in enumerate(ordered):
        for b in ordered[i + 1 :]:
            keys.extend((a, b, w) for w in box)
    for a in ordered:
        keys.extend((a, a, w) for w in box if w < tuple(-c for c in w))
    return keys


def enumerate_pairs(fw: PeriodicFramework, radius: int) -> list[PairConstraint]:
    """All canonical pair constraints within the truncation radius.

    Count is C(n,2)*(2R+1)^d + n*((2R+1)^d - 1)/2.
    """
    return [
        pair_constraint(fw, a, b, w)
        for a, b, w in pair_keys(fw.graph.vertex_orbits, fw.dimension, radius)
    ]


# ---------------------------------------------------------------------------
# Double description.

def _independent_rows(a: np.ndarray, f: int, tol: float) -> list[int]:
    chosen: list[int] = []
    basis = np.zeros((0, f))
    for i, row in enumerate(a):
        residual = row - basis.T @ (basis @ row) if len(basis) else row
        if np.linalg.norm(residual) > tol:
            basis = np.vstack([basis, residual / np.linalg.norm(residual)])
            chosen.append(i)
            if len(chosen) == f:
                return chosen
    return chosen


def extremal_rays(halfspaces, f: int | None = None, tol: float = DEFAULT_CONE_TOL) -> np.ndarray:
    """Minimal generating rays of {c : A c >= 0} for a pointed cone.

    Incremental double description: start from a simplicial subcone given by
    f independent rows, then clip with each remaining halfspace, combining
    adjacent positive/negative ray pairs.  Adjacency uses the standard
    combinatorial test on active-constraint sets (kept as bitmasks).  Raises
    NonPointedConeError when the rows have a nontrivial common nullspace.
    """
    a = np.asarray(halfspaces, dtype=float)
    if a.ndim != 2:
        raise ValueError("halfspaces must be a matrix")
    k = a.shape[0]
    if f is None:
        f = a.shape[1]
    if f != a.shape[1]:
        raise ValueError("declared dimension does not match halfspace width")
    if f < 1:
        raise ValueError("cone dimension must be positive")
    if f > MAX_FLEX_DIM:
        raise FlexDimensionTooLargeError(
            f"ray enumeration disabled for dimension {f} > {MAX_FLEX_DIM}"
        )
    norms = np.linalg.norm(a, axis=1)
    a = a[norms > tol]
    a = a / np.linalg.norm(a, axis=1, keepdims=True) if len(a) else a
    k = len(a)
    if k < f:
        raise NonPointedConeError(f"{k} halfspaces cannot point a {f}-dimensional cone")
    s = np.linalg.svd(a, compute_uv=False)
    if int(np.sum(s > tol * s[0])) < f:
        raise NonPointedConeError("halfspace normals do not span; nonzero lineality")

    base = _independent_rows(a, f, tol)
    if len(base) < f:
        raise NonPointedConeError("could not extract an independent halfspace basis")
    m_inv = np.linalg.inv(a[base])
    rays: list[np.ndarray] = []
    masks: list[int] = []
    processed = list(base)
    for j in range(f):
        r = m_inv[:, j]
        r = r / np.linalg.norm(r)
        rays.append(r)
        masks.append(_active_mask(a, processed, r, tol))

    for t in [i for i in range(k) if i not in set(base)]:
        vals = np.array([a[t] @ r for r in rays])
        pos = [i for i, v in enumerate(vals) if v > tol]
        zero = [i for i, v in enumerate(vals) if -tol <= v <= tol]
        neg = [i for i, v in enumerate(vals) if v < -tol]
        processed.append(t)
        bit = 1 << t
        if not neg:
            for i in zero:
                masks[i] |= bit
            continue
        new_rays: list[np.ndarray] = []
        new_masks: list[int] = []
        for p in pos:
            for q in neg:
                if not _adjacent(masks, p, q):
                    continue
                r = vals[p] * rays[q] - vals[q] * rays[p]
                nrm = np.linalg.norm(r)
                if nrm <= tol:
                    continue
                r = r / nrm
                new_rays.append(r)
                new_masks.append(_active_mask(a, processed, r, tol))
        rays = [rays[i] for i in pos + zero] + new_rays
        masks = [masks[i] for i in pos] + [masks[i] | bit for i in zero] + new_masks
        if not rays:
            break

    rays = _dedup_unit_rows(np.array(rays) if rays else np.zeros((0, f)), _MERGE_TOL)
    if len(rays):
        worst = float((a @ rays.T).min())
        if worst < -10 * tol:
            raise NumericalFailureError(f"ray violates a halfspace by {-worst:.3e}")
    order = np.lexsort(np.round(rays, 12).T[::-1]) if len(rays) else []
    return rays[order] if len(rays) else rays


def _active_mask(a: np.ndarray, processed: list[int], ray: np.ndarray, tol: float) -> int:
    idx = np.asarray(processed, dtype=int)
    vals = a[idx] @ ray
    mask = 0
    for i in idx[np.abs(vals) <= tol]:
        mask |= 1 << int(i)
    return mask


def _adjacent(masks: list[int], p: int, q: int) -> bool:
    common = masks[p] & masks[q]
    for r, mr in enumerate(masks):
        if r != p and r != q and (common & ~mr) == 0:
            return False
    return True


def _dedup_unit_rows(rows: np.ndarray, tol: float) -> np.ndarray:
    out: list[np.ndarray] = []
    for r in rows:
        if all(np.linalg.norm(r - s) > tol for s in out):
            out.append(r)
    return np.array(out) if out else np.zeros((0, rows.shape[1] if rows.ndim == 2 else 0))


# ---------------------------------------------------------------------------
# Expansive cone of a framework.

@dataclass(frozen=True, eq=False)
class ExpansiveCone:
    flex_basis: np.ndarray  # (f, dn + d^2)
    halfspace_matrix: np.ndarray  # (k, f), unit rows, deduplicated
    radius: int
    rays: np.ndarray  # (r, f), unit rows, deterministic order
    is_trivial: bool

    @property
    def flex_dim(self) -> int:
        return self.flex_basis.shape[0]

    def ray_motion(self, i: int) -> np.ndarray:
        """Lift ray i back to (pdot, lattice-dot) coordinates."""
        return self.rays[i] @ self.flex_basis

    def ray_motions(self) -> np.ndarray:
        return self.rays @ self.flex_basis if len(self.rays) else np.zeros((0, self.flex_basis.shape[1]))


def expansive_cone(
    fw: PeriodicFramework,
    report: RigidityReport,
    radius: int = DEFAULT_RADIUS,
    tol: float = DEFAULT_CONE_TOL,
) -> ExpansiveCone:
    """Halfspace description and extremal rays in flex coordinates.

    Pair rows are composed with the flex basis; rows of norm below tolerance
    are dropped (bars project to zero because flexes preserve them exactly),
    parallel rows are merged, and rays come from the double description pass.
    """
    f = report.dof
    if f == 0:
        return ExpansiveCone(report.flex_basis, np.zeros((0, 0)), radius, np.zeros((0, 0)), True)
    if f > MAX_FLEX_DIM:
        raise FlexDimensionTooLargeError(
            f"flex dimension {f} exceeds the ray-enumeration cap {MAX_FLEX_DIM}"
        )
    pairs = enumerate_pairs(fw, radius)
    rows = np.array([p.row for p in pairs])
    projected = rows @ report.flex_basis.T
    scale = np.maximum(np.linalg.norm(rows, axis=1), 1.0)
    keep = np.linalg.norm(projected, axis=1) > tol * scale
    projected = projected[keep]
    if len(projected) == 0:
        # No pair restricts the flexes at this radius; the cone is all of R^f.
        raise NonPointedConeError("no active pair constraints; cone has full lineality")
    projected = projected / np.linalg.norm(projected, axis=1, keepdims=True)

    # Exact-duplicate merge through rounded keys, then a pairwise angular
    # merge when the survivor count stays small.
    seen: dict[tuple, int] = {}
    unique: list[np.ndarray] = []
    for r in projected:
        key = tuple(np.round(r, 9))
        if key not in seen:
            seen[key] = len(unique)
            unique.append(r)
    uniq = np.array(unique)
    if len(uniq) <= 800:
        uniq = _dedup_unit_rows(uniq, _MERGE_TOL)

    rays = extremal_rays(uniq, f, tol)
    return ExpansiveCone(report.flex_basis, uniq, radius, rays, len(rays) == 0)


# ---------------------------------------------------------------------------
# Flex classification.

class FlexClass(Enum):
    NOT_EXPANSIVE = "not_expansive"
    WEAKLY_EXPANSIVE = "weakly_expansive"
    EFFECTIVELY_EXPANSIVE = "effectively_expansive"


def _check_flex(fw: PeriodicFramework, flex: np.ndarray, tol: float) -> np.ndarray:
    flex = np.asarray(flex, dtype=float)
    matrix = rigidity_matrix(fw)
    if matrix.shape[1] != flex.shape[0]:
        raise NotAFlexError(
            f"motion vector has length {flex.shape[0]}, expected {matrix.shape[1]}"
        )
    if fw.m:
        resid = np.abs(matrix @ flex)
        bound = tol * np.linalg.norm(matrix, axis=1) * np.linalg.norm(flex)
        if np.any(resid > bound):
            raise NotAFlexError(
                f"edge residual {resid.max():.3e} exceeds tolerance; not a flex"
            )
    return flex


def _pair_values(fw, flex, radius):
    pairs = enumerate_pairs(fw, radius)
    values = np.array([p.row @ flex for p in pairs])
    scales = np.array([np.linalg.norm(p.row) for p in pairs]) * np.linalg.norm(flex)
    return pairs, values, scales


def classify_flex(
    fw: PeriodicFramework,
    flex,
    radius: int = DEFAULT_RADIUS,
    tol: float = DEFAULT_CONE_TOL,
) -> FlexClass:
    """NotExpansive / WeaklyExpansive / EffectivelyExpansive at this radius.

    Thresholds are relative: a pair row counts as strict when its value
    exceeds tol * |row| * |flex|, as violated when below the negative of it.
    """
    flex = _check_flex(fw, flex, tol)
    _, values, scales = _pair_values(fw, flex, radius)
    thresholds = tol * scales
    if np.any(values < -thresholds):
        return FlexClass.NOT_EXPANSIVE
    if np.any(values > thresholds):
        return FlexClass.EFFECTIVELY_EXPANSIVE
    return FlexClass.WEAKLY_EXPANSIVE


def effective_vertices(
    fw: PeriodicFramework,
    flex,
    radius: int = DEFAULT_RADIUS,
    tol: float = DEFAULT_CONE_TOL,
) -> set[str]:
    """Orbits touched by a pair constraint that opens strictly under `flex`."""
    flex = _check_flex(fw, flex, tol)
    pairs, values, scales = _pair_values(fw, flex, radius)
    out: set[str] = set()
    for p, v, s in zip(pairs, values, scales):
        if v > tol * s:
            out.add(p.orbit_a)
            out.add(p.orbit_b)
    return out


@dataclass(frozen=True, eq=False)
class PointednessReport:
    analyses: dict[str, ConeAnalysis]
    passed: bool


def verify_pointedness(
    fw: PeriodicFramework,
    flex,
    radius: int = DEFAULT_RADIUS,
    tol: float = DEFAULT_CONE_TOL,
) -> PointednessReport:
    """Check codim-2 pointedness of every effective vertex star.

    The flex must classify as effectively expansive; a failure on a genuine
    expansive flex indicates a numerical or modeling bug, never a valid state.
    """
    cls = classify_flex(fw, flex, radius, tol)
    if cls is not FlexClass.EFFECTIVELY_EXPANSIVE:
        raise ValueError(f"flex classifies as {cls.value}, not effectively expansive")
    analyses = {}
    for orbit in sorted(effective_vertices(fw, flex, radius, tol)):
        analyses[orbit] = analyze_star(vertex_star(fw, orbit), fw.dimension, tol)
    return PointednessReport(analyses, all(a.pointed_codim2 for a in analyses.values()))


# ---------------------------------------------------------------------------
# Radius stability.

def rays_match(a: np.ndarray, b: np.ndarray, angular_tol: float = _RAY_MATCH_TOL) -> bool:
    """Same ray set up to angular tolerance (unit rays, same orientation)."""
    if len(a) != len(b):
        return False
    unmatched = list(range(len(b)))
    for r in a:
        hit = next((i for i in unmatched if np.linalg.norm(r - b[i]) < angular_tol), None)
        if hit is None:
            return False
        unmatched.remove(hit)
    return True


def find_stable_radius(
    fw: PeriodicFramework,
    report: RigidityReport,
    start: int = DEFAULT_RADIUS,
    max_radius: int = 6,
    tol: float = DEFAULT_CONE_TOL,
    angular_tol: float = _RAY_MATCH_TOL,
) -> int:
    """Smallest R >= start whose ray set agrees with the one at R + 1."""
    prev = expansive_cone(fw, report, start, tol)
    for radius in range(start, max_radius + 1):
        nxt = expansive_cone(fw, report, radius + 1, tol)
        if rays_match(prev.rays, nxt.rays, angular_tol):
            return radius
        prev = nxt
    raise NumericalFailureError(
        f"ray set still changing between radius {max_radius} and {max_radius + 1}"
    )


# ---------------------------------------------------------------------------
# Serialization.

def _f17(x: float) -> str:
    return format(float(x), ".17g")


def _json_matrix(rows) -> str:
    return "[" + ", ".join("[" + ", ".join(_f17(x) for x in row) + "]" for row in rows) + "]"


def cone_report_json(cone: ExpansiveCone, stable_radius: int) -> str:
    return (
        "{"
        + f'"flex_dim": {cone.flex_dim}, '
        + f'"radius": {cone.radius}, '
        + f'"stable_radius": {stable_radius}, '
        + f'"num_halfspaces": {cone.halfspace_matrix.shape[0]}, '
        + f'"rays": {_json_matrix(cone.rays)}, '
        + f'"ray_motions": {_json_matrix(cone.ray_motions())}'
        + "}"
    )


def write_pair_audit_csv(
    fw: PeriodicFramework,
    report: RigidityReport,
    radius: int,
    path,
    tol: float = DEFAULT_CONE_TOL,
) -> None:
    """Per-pair audit: the norm of each pair row projected to flex coordinates.

    Zero means the pair does not restrict the flex space (bars in particular).
    """
    pairs = enumerate_pairs(fw, radius)
    d = fw.dimension
    header = ["orbit_a", "orbit_b"] + [f"shift_{i + 1}" for i in range(d)] + ["value"]
    lines = [",".join(header)]
    for p in pairs:
        if report.dof:
            value = float(np.linalg.norm(p.row @ report.flex_basis.T))
        else:
            value = 0.0
        fields = [p.orbit_a, p.orbit_b, *(str(c) for c in p.shift), format(value, ".12g")]
        lines.append(",".join(fields))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
