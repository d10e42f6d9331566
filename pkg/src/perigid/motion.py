"""Finite deformation along a flex by predictor-corrector continuation.

State is the full coordinate vector (representative positions plus lattice,
in rigidity layout).  Each step advances by ``h * min_edge_length`` along the
current unit tangent, then Newton iterations restore the squared edge lengths.
Corrections are restricted to a gauge complement: the first vertex orbit stays
pinned and the strictly lower triangular lattice entries are never corrected,
which removes exactly the d + C(d,2) isometry freedoms without altering
intrinsic geometry.  The tangent is carried along by projecting the previous
tangent onto the new nontrivial flex space, so the path follows one smooth
branch; rank drops surface as errors instead of being stepped through.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import (
    NewtonDivergenceError,
    NotAFlexError,
    NotSimplexFamilyError,
    NumericalFailureError,
    SingularJacobianError,
)
from .expansive import pair_keys
from .framework import PeriodicFramework, Placement, QuotientGraph, validate_framework
from .rigidity import DEFAULT_RANK_TOL, analyze, motion_size, rigidity_rows

DEFAULT_STEP = 0.01
DEFAULT_STEPS = 50
DEFAULT_NEWTON_TOL = 1e-10
DEFAULT_AUDIT_TOL = 1e-8
_MAX_NEWTON_ITER = 25
_SEED_FLEX_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class MotionPath:
    graph: QuotientGraph
    placements: list[Placement]  # step 0 is the input placement
    step_size: float  # arc step actually taken (h * min edge length)
    nominal_h: float
    direction_seed: np.ndarray
    tangents: np.ndarray  # (steps + 1, dn + d^2) unit tangents
    residuals: np.ndarray  # per step, max |len^2 - len0^2| after correction
    pinning: str

    @property
    def n_steps(self) -> int:
        return len(self.placements) - 1

    def framework_at(self, k: int) -> PeriodicFramework:
        return validate_framework(self.graph, self.placements[k])


@dataclass(frozen=True, eq=False)
class ExpansionAudit:
    radius: int
    pair_results: dict[tuple[str, str, tuple[int, ...]], float]  # min step increment
    violations: list[tuple[tuple[str, str, tuple[int, ...]], int, float]]
    passed: bool


def _state_of(graph: QuotientGraph, placement: Placement) -> np.ndarray:
    pos = np.array([placement.positions[o] for o in graph.vertex_orbits], dtype=float)
    return np.concatenate([pos.reshape(-1), np.asarray(placement.lattice, float).reshape(-1, order="F")])


def _placement_of(graph: QuotientGraph, state: np.ndarray) -> Placement:
    d, n = graph.dimension, graph.n
    pos = state[: d * n].reshape(n, d)
    lattice = state[d * n :].reshape(d, d, order="F")
    return Placement(
        {o: pos[i].copy() for i, o in enumerate(graph.vertex_orbits)}, lattice.copy()
    )


def _split_state(graph: QuotientGraph, state: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d, n = graph.dimension, graph.n
    return state[: d * n].reshape(n, d), state[d * n :].reshape(d, d, order="F")


def _gauge_free_indices(graph: QuotientGraph) -> np.ndarray:
    d, n = graph.dimension, graph.n
    fixed = set(range(d))  # first orbit pinned
    for c in range(d):
        for r in range(c + 1, d):  # strictly lower triangular lattice entries
            fixed.add(d * n + c * d + r)
    return np.array([i for i in range(motion_size(graph)) if i not in fixed])


def _edge_sq_lengths(graph: QuotientGraph, state: np.ndarray) -> np.ndarray:
    pos, lattice = _split_state(graph, state)
    index = {o: i for i, o in enumerate(graph.vertex_orbits)}
    out = np.zeros(graph.m)
    for k, (tail, head, shift) in enumerate(graph.edge_orbits):
        e = pos[index[head]] + lattice @ np.asarray(shift, float) - pos[index[tail]]
        out[k] = e @ e
    return out


def _newton_correct(
    graph: QuotientGraph,
    target_sq: np.ndarray,
    state: np.ndarray,
    free: np.ndarray,
    newton_tol: float,
) -> tuple[np.ndarray, float]:
    x = state.copy()
    for _ in range(_MAX_NEWTON_ITER):
        g = _edge_sq_lengths(graph, x) - target_sq
        residual = float(np.abs(g).max()) if len(g) else 0.0
        if residual < newton_tol:
            return x, residual
        pos, lattice = _split_state(graph, x)
        jac = 2.0 * rigidity_rows(graph, pos, lattice)
        delta, *_ = np.linalg.lstsq(jac[:, free], -g, rcond=None)
        x[free] += delta
    g = _edge_sq_lengths(graph, x) - target_sq
    raise NewtonDivergenceError(
        f"corrector stalled at residual {float(np.abs(g).max()):.3e} "
        f"after {_MAX_NEWTON_ITER} iterations"
    )


def continue_motion(
    fw: PeriodicFramework,
    direction,
    n_steps: int = DEFAULT_STEPS,
    h: float = DEFAULT_STEP,
    newton_tol: float = DEFAULT_NEWTON_TOL,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> MotionPath:
    """Follow the flex `direction` for `n_steps` steps of size h.

    h is measured in units of the shortest edge length.  The seed must
    annihilate the edge rows; its trivial (isometry) component is projected
    out before stepping.  A purely trivial seed, or a rigid framework, yields
    a zero-displacement path.
    """
    if h <= 0:
        raise ValueError("step size must be positive")
    direction = np.asarray(direction, dtype=float)
    graph = fw.graph
    if direction.shape != (motion_size(graph),):
        raise NotAFlexError(
            f"direction has shape {direction.shape}, expected ({motion_size(graph)},)"
        )
    pos0 = np.array([fw.placement.positions[o] for o in graph.vertex_orbits])
    rows = rigidity_rows(graph, pos0, fw.placement.lattice)
    if fw.m:
        resid = np.abs(rows @ direction)
        bound = _SEED_FLEX_TOL * np.linalg.norm(rows, axis=1) * max(np.linalg.norm(direction), 1e-300)
        if np.any(resid > bound):
            raise NotAFlexError(
                f"edge residual {resid.max():.3e} exceeds tolerance; seed is not a flex"
            )

    report0 = analyze(fw, rank_tol)
    pinning = (
        f"vertex orbit '{graph.vertex_orbits[0]}' pinned; "
        "lattice corrections restricted to upper triangular form"
    )
    state = _state_of(graph, fw.placement)
    tangent = report0.flex_basis.T @ (report0.flex_basis @ direction) if report0.dof else np.zeros_like(direction)
    norm0 = float(np.linalg.norm(tangent))
    if norm0 <= 1e-12 * max(1.0, float(np.linalg.norm(direction))):
        same = _placement_of(graph, state)
        return MotionPath(
            graph,
            [same] * (n_steps + 1),
            0.0,
            h,
            direction,
            np.zeros((n_steps + 1, state.size)),
            np.zeros(n_steps + 1),
            pinning,
        )
    tangent = tangent / norm0

    step_len = h * fw.min_edge_length
    target_sq = fw.edge_lengths**2
    free = _gauge_free_indices(graph)
    placements = [_placement_of(graph, state)]
    tangents = [tangent]
    residuals = [0.0]

    for _ in range(n_steps):
        predicted = state + step_len * tangent
        state, residual = _newton_correct(graph, target_sq, predicted, free, newton_tol)
        placement = _placement_of(graph, state)
        step_fw = validate_framework(graph, placement)
        report = analyze(step_fw, rank_tol)
        if report.rank < report0.rank or report.dof != report0.dof:
            raise SingularJacobianError(
                f"rank changed from {report0.rank} to {report.rank}; possible bifurcation"
            )
        projected = report.flex_basis.T @ (report.flex_basis @ tangent)
        nrm = float(np.linalg.norm(projected))
        if nrm < 0.5:
            raise NumericalFailureError(
                f"tangent projection shrank to {nrm:.3f}; lost the smooth branch"
            )
        tangent = projected / nrm
        placements.append(placement)
        tangents.append(tangent)
        residuals.append(residual)

    return MotionPath(
        graph,
        placements,
        step_len,
        h,
        direction,
        np.array(tangents),
        np.array(residuals),
        pinning,
    )


# ---------------------------------------------------------------------------
# Audits.

def _pair_distances(path: MotionPath, key) -> np.ndarray:
    a, b, shift = key
    w = np.asarray(shift, dtype=float)
    out = np.zeros(len(path.placements))
    for s, pl in enumerate(path.placements):
        sep = pl.positions[b] + pl.lattice @ w - pl.positions[a]
        out[s] = np.linalg.norm(sep)
    return out


def audit_expansiveness(
    path: MotionPath,
    radius: int = 2,
    audit_tol: float = DEFAULT_AUDIT_TOL,
) -> ExpansionAudit:
    """Check that every truncated pair distance is nondecreasing stepwise.

    A violation at step k means the distance dropped by more than audit_tol
    between steps k-1 and k.
    """
    if len(path.placements) < 2:
        raise ValueError("path needs at least two steps")
    d = path.graph.dimension
    keys = pair_keys(path.graph.vertex_orbits, d, radius)
    pair_results = {}
    violations = []
    for key in keys:
        dist = _pair_distances(path, key)
        inc = np.diff(dist)
        pair_results[key] = float(inc.min())
        for step in np.nonzero(inc < -audit_tol)[0]:
            violations.append((key, int(step) + 1, float(-inc[step])))
    return ExpansionAudit(radius, pair_results, violations, not violations)


def _simplex_family_offsets(graph: QuotientGraph):
    """Hub orbit, far orbit, and shift lists (singles, doubles) if the graph
    belongs to the two-orbit simplex family; raises otherwise."""
    if graph.n != 2:
        raise NotSimplexFamilyError("simplex family has exactly two vertex orbits")
    d = graph.dimension
    singles = {tuple(int(i == k) for i in range(d)) for k in range(d)}
    pairs = {
        tuple(int(i == a) + int(i == b) for i in range(d))
        for a, b in itertools.combinations(range(d), 2)
    }
    doubles = {tuple(2 * int(i == k) for i in range(d)) for k in range(d)}
    for hub, far in (graph.vertex_orbits, graph.vertex_orbits[::-1]):
        shifts = set()
        ok = True
        for e in graph.edge_orbits:
            if e.tail == hub and e.head == far:
                shifts.add(e.shift)
            elif e.tail == far and e.head == hub:
                shifts.add(tuple(-c for c in e.shift))
            else:
                ok = False
                break
        if ok and singles <= shifts and pairs <= shifts and shifts <= singles | pairs | doubles:
            return hub, far, sorted(singles), sorted(doubles)
    raise NotSimplexFamilyError("edge offsets do not match the simplex family")


def facet_separation(path: MotionPath) -> np.ndarray:
    """Distance between the affine hulls of the far translates {2 lambda_i}
    and {lambda_i} at each step (simplex-family frameworks only).

    The two hulls are parallel hyperplanes through lattice translates of the
    far orbit, so the distance is the normal component of one generator.
    """
    _, far, singles, doubles = _simplex_family_offsets(path.graph)
    d = path.graph.dimension
    out = np.zeros(len(path.placements))
    for s, pl in enumerate(path.placements):
        base = pl.positions[far]
        near_pts = np.array([base + pl.lattice @ np.asarray(w, float) for w in singles])
        far_pts = np.array([base + pl.lattice @ np.asarray(w, float) for w in doubles])
        diffs = far_pts[1:] - far_pts[0]
        if d == 1:
            normal = np.ones(1)
        else:
            _, _, vt = np.linalg.svd(diffs)
            normal = vt[-1]
        out[s] = abs(normal @ (far_pts[0] - near_pts[0]))
    return out


# ---------------------------------------------------------------------------
# Frame export.

def _f17(x: float) -> str:
    return format(float(x), ".17g")


def _supercell_shifts(d: int, radius: int):
    return list(itertools.product(range(-radius, radius + 1), repeat=d))


def export_frames(path: MotionPath, supercell: int = 1, fmt: str = "obj", outdir=".") -> list[str]:
    """Write realized geometry per step: OBJ wireframes or one CSV table.

    OBJ files contain only ``v`` and ``l`` records and require d <= 3 (third
    coordinate padded with zero for d = 2); the CSV lists every realized
    vertex as step,orbit,shift_1..shift_d,x_1..x_d.
    """
    import os

    d = path.graph.dimension
    shifts = _supercell_shifts(d, supercell)
    written = []
    if fmt == "csv":
        header = (
            ["step", "orbit"]
            + [f"shift_{i + 1}" for i in range(d)]
            + [f"x_{i + 1}" for i in range(d)]
        )
        lines = [",".join(header)]
        for step, pl in enumerate(path.placements):
            for orbit in path.graph.vertex_orbits:
                for w in shifts:
                    x = pl.positions[orbit] + pl.lattice @ np.asarray(w, float)
                    lines.append(
                        ",".join(
                            [str(step), orbit]
                            + [str(c) for c in w]
                            + [format(v, ".12g") for v in x]
                        )
                    )
        target = os.path.join(outdir, "frames.csv")
        with open(target, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        return [target]
    if fmt != "obj":
        raise ValueError(f"unknown format {fmt!r}")
    if d > 3:
        raise ValueError("obj export supports d <= 3; use csv")

    vertex_index = {}
    counter = 1
    for orbit in path.graph.vertex_orbits:
        for w in shifts:
            vertex_index[(orbit, w)] = counter
            counter += 1
    box = set(shifts)
    segments = []
    for z in shifts:
        for e in path.graph.edge_orbits:
            other = tuple(z[i] + e.shift[i] for i in range(d))
            if other in box:
                segments.append((vertex_index[(e.tail, z)], vertex_index[(e.head, other)]))

    for step, pl in enumerate(path.placements):
        lines = []
        for orbit in path.graph.vertex_orbits:
            for w in shifts:
                x = pl.positions[orbit] + pl.lattice @ np.asarray(w, float)
                coords = [_f17(v) for v in x] + ["0"] * (3 - d)
                lines.append("v " + " ".join(coords))
        for i, j in segments:
            lines.append(f"l {i} {j}")
        target = os.path.join(outdir, f"frame_{step:04d}.obj")
        with open(target, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        written.append(target)
    return written


def write_audit_csv(audit: ExpansionAudit, path) -> None:
    """Audit table: orbit_a,orbit_b,shift...,min_increment,first_violation_step."""
    keys = sorted(audit.pair_results)
    d = len(keys[0][2]) if keys else 0
    first_violation: dict = {}
    for key, step, _ in sorted(audit.violations, key=lambda v: v[1]):
        first_violation.setdefault(key, step)
    header = (
        ["orbit_a", "orbit_b"]
        + [f"shift_{i + 1}" for i in range(d)]
        + ["min_increment", "first_violation_step"]
    )
    lines = [",".join(header)]
    for key in keys:
        a, b, shift = key
        step = first_violation.get(key)
        lines.append(
            ",".join(
                [a, b]
                + [str(c) for c in shift]
                + [format(audit.pair_results[key], ".12g"), "" if step is None else str(step)]
            )
        )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
