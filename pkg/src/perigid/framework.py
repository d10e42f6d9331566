"""Data model for d-periodic bar-and-joint frameworks given by a finite quotient.

A framework is described by a quotient graph (vertex orbits plus edge orbits
labeled with integer lattice shifts), a placement of one representative per
vertex orbit, and a lattice matrix whose columns are the period generators.
The realized edge for orbit (tail, head, shift) runs from p[tail] to
p[head] + lattice @ shift.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from .errors import (
    DimensionMismatchError,
    DuplicateEdgeOrbitError,
    FrameworkError,
    LoopEdgeError,
    SchemaError,
    SingularLatticeError,
    UnknownOrbitError,
    ZeroLengthEdgeError,
)

# |det| must exceed this factor times (max generator norm)^d.
LATTICE_DET_TOL = 1e-12


class EdgeOrbit(NamedTuple):
    tail: str
    head: str
    shift: tuple[int, ...]

    def reversed(self) -> "EdgeOrbit":
        return EdgeOrbit(self.head, self.tail, tuple(-c for c in self.shift))

    def canonical(self) -> "EdgeOrbit":
        """Orientation with the lexicographically smaller (tail, head, shift)."""
        rev = self.reversed()
        return self if tuple(self) <= tuple(rev) else rev


@dataclass(frozen=True, eq=False)
class QuotientGraph:
    dimension: int
    vertex_orbits: tuple[str, ...]
    edge_orbits: tuple[EdgeOrbit, ...]

    @property
    def n(self) -> int:
        return len(self.vertex_orbits)

    @property
    def m(self) -> int:
        return len(self.edge_orbits)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuotientGraph):
            return NotImplemented
        return (
            self.dimension == other.dimension
            and self.vertex_orbits == other.vertex_orbits
            and self.edge_orbits == other.edge_orbits
        )


@dataclass(frozen=True, eq=False)
class Placement:
    positions: dict[str, np.ndarray]
    lattice: np.ndarray  # column c is period generator c


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class PeriodicFramework:
    """Validated framework; build through :func:`validate_framework` only.

    Immutable after construction: all arrays are read-only and safe to share
    between threads.
    """

    graph: QuotientGraph
    placement: Placement
    edge_lengths: np.ndarray
    _edge_vectors: np.ndarray = field(repr=False, default=None)

    @property
    def dimension(self) -> int:
        return self.graph.dimension

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def m(self) -> int:
        return self.graph.m

    def orbit_index(self, orbit: str) -> int:
        try:
            return self.graph.vertex_orbits.index(orbit)
        except ValueError:
            raise UnknownOrbitError(orbit) from None

    def edge_vector(self, k: int) -> np.ndarray:
        """Realized bar vector of edge orbit k (head + lattice@shift - tail)."""
        if not 0 <= k < self.m:
            raise IndexError(f"edge orbit index {k} out of range 0..{self.m - 1}")
        return self._edge_vectors[k]

    def realized_vertex(self, orbit: str, shift: Iterable[int]) -> np.ndarray:
        """Position of the translate of `orbit` by the given lattice shift."""
        if orbit not in self.placement.positions:
            raise UnknownOrbitError(orbit)
        w = np.asarray(tuple(shift), dtype=float)
        if w.shape != (self.dimension,):
            raise DimensionMismatchError(
                f"shift has length {w.size}, expected {self.dimension}"
            )
        return self.placement.positions[orbit] + self.placement.lattice @ w

    @property
    def min_edge_length(self) -> float:
        return float(self.edge_lengths.min()) if self.m else 0.0


def validate_framework(graph: QuotientGraph, placement: Placement) -> PeriodicFramework:
    """Check all framework invariants and return the validated value.

    Edge orbits are stored in canonical orientation (lexicographically smallest
    of (tail, head, shift) versus the reversal), preserving input order.
    """
    d = graph.dimension
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise DimensionMismatchError(f"dimension must be a positive integer, got {d!r}")

    orbits = tuple(graph.vertex_orbits)
    if len(orbits) < 1:
        raise FrameworkError("framework needs at least one vertex orbit")
    if len(set(orbits)) != len(orbits):
        raise FrameworkError("duplicate vertex orbit identifiers")
    orbit_set = set(orbits)

    canonical_edges = []
    seen: set[EdgeOrbit] = set()
    for e in graph.edge_orbits:
        e = EdgeOrbit(e[0], e[1], tuple(int(c) for c in e[2]))
        if e.tail not in orbit_set or e.head not in orbit_set:
            raise FrameworkError(f"edge orbit {e} references an unknown vertex orbit")
        if len(e.shift) != d:
            raise DimensionMismatchError(
                f"edge orbit {e} has a shift of length {len(e.shift)}, expected {d}"
            )
        if e.tail == e.head and all(c == 0 for c in e.shift):
            raise LoopEdgeError(f"edge orbit {e} is a loop")
        canon = e.canonical()
        if canon in seen:
            raise DuplicateEdgeOrbitError(f"edge orbit {e} duplicates {canon}")
        seen.add(canon)
        canonical_edges.append(canon)

    positions = dict(placement.positions)
    if set(positions) != orbit_set:
        missing = orbit_set - set(positions)
        extra = set(positions) - orbit_set
        raise FrameworkError(
            f"positions do not cover the vertex orbits (missing={sorted(missing)}, "
            f"extra={sorted(extra)})"
        )
    frozen_positions = {}
    for orbit in orbits:
        p = np.asarray(positions[orbit], dtype=float)
        if p.shape != (d,):
            raise DimensionMismatchError(
                f"position of orbit {orbit!r} has shape {p.shape}, expected ({d},)"
            )
        if not np.all(np.isfinite(p)):
            raise FrameworkError(f"position of orbit {orbit!r} is not finite")
        frozen_positions[orbit] = _freeze(p)

    lattice = np.asarray(placement.lattice, dtype=float)
    if lattice.shape != (d, d):
        raise DimensionMismatchError(
            f"lattice has shape {lattice.shape}, expected ({d}, {d})"
        )
    if not np.all(np.isfinite(lattice)):
        raise FrameworkError("lattice is not finite")
    col_norm = float(np.linalg.norm(lattice, axis=0).max())
    if abs(np.linalg.det(lattice)) <= LATTICE_DET_TOL * col_norm**d:
        raise SingularLatticeError("lattice determinant below degeneracy tolerance")
    lattice = _freeze(lattice)

    scale = max(1.0, col_norm, max(float(np.abs(p).max()) for p in frozen_positions.values()))
    vectors = np.zeros((len(canonical_edges), d))
    for k, e in enumerate(canonical_edges):
        w = np.asarray(e.shift, dtype=float)
        vectors[k] = frozen_positions[e.head] + lattice @ w - frozen_positions[e.tail]
    lengths = np.linalg.norm(vectors, axis=1) if len(canonical_edges) else np.zeros(0)
    for k, e in enumerate(canonical_edges):
        if lengths[k] <= 1e-12 * scale:
            raise ZeroLengthEdgeError(f"edge orbit {e} realizes to a zero vector")

    out_graph = QuotientGraph(d, orbits, tuple(canonical_edges))
    out_placement = Placement(frozen_positions, lattice)
    return PeriodicFramework(out_graph, out_placement, _freeze(lengths), _freeze(vectors))


# ---------------------------------------------------------------------------
# JSON serialization.  Fixed schema, fixed key order, 17-significant-digit
# floats so that save/load round-trips bit for bit.

_TOP_KEYS = ("dimension", "vertex_orbits", "lattice", "edge_orbits")


def _f17(x: float) -> str:
    return format(float(x), ".17g")


def dumps_framework(fw: PeriodicFramework) -> str:
    g, pl = fw.graph, fw.placement
    lines = ["{", f'  "dimension": {g.dimension},']
    vo = []
    for orbit in g.vertex_orbits:
        pos = ", ".join(_f17(x) for x in pl.positions[orbit])
        vo.append(f'    {{"id": {json.dumps(orbit)}, "position": [{pos}]}}')
    lines.append('  "vertex_orbits": [')
    lines.append(",\n".join(vo))
    lines.append("  ],")
    rows = ", ".join(
        "[" + ", ".join(_f17(x) for x in row) + "]" for row in pl.lattice
    )
    lines.append(f'  "lattice": [{rows}],')
    eo = []
    for e in g.edge_orbits:
        shift = ", ".join(str(c) for c in e.shift)
        eo.append(
            f'    {{"tail": {json.dumps(e.tail)}, "head": {json.dumps(e.head)}, '
            f'"shift": [{shift}]}}'
        )
    lines.append('  "edge_orbits": [')
    lines.append(",\n".join(eo))
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _require_keys(obj: dict, keys: tuple[str, ...], where: str) -> None:
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object")
    if set(obj) != set(keys):
        raise SchemaError(
            f"{where}: keys {sorted(obj)} do not match schema {list(keys)}"
        )


def loads_framework(text: str) -> PeriodicFramework:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    _require_keys(data, _TOP_KEYS, "framework")
    if not isinstance(data["dimension"], int) or isinstance(data["dimension"], bool):
        raise SchemaError("dimension must be an integer")

    orbits, positions = [], {}
    if not isinstance(data["vertex_orbits"], list):
        raise SchemaError("vertex_orbits must be a list")
    for rec in data["vertex_orbits"]:
        _require_keys(rec, ("id", "position"), "vertex orbit")
        if not isinstance(rec["id"], str):
            raise SchemaError("vertex orbit id must be a string")
        if not _number_list(rec["position"]):
            raise SchemaError("vertex position must be a list of numbers")
        orbits.append(rec["id"])
        positions[rec["id"]] = rec["position"]

    edges = []
    if not isinstance(data["edge_orbits"], list):
        raise SchemaError("edge_orbits must be a list")
    for rec in data["edge_orbits"]:
        _require_keys(rec, ("tail", "head", "shift"), "edge orbit")
        shift = rec["shift"]
        if not isinstance(shift, list) or any(
            not isinstance(c, int) or isinstance(c, bool) for c in shift
        ):
            raise SchemaError("edge shift must be a list of integers")
        edges.append(EdgeOrbit(rec["tail"], rec["head"], tuple(shift)))

    lattice = data["lattice"]
    if not isinstance(lattice, list) or not all(_number_list(r) for r in lattice):
        raise SchemaError("lattice must be a list of rows of numbers")
    if len({len(r) for r in lattice} | {len(lattice)}) > 1:
        raise DimensionMismatchError("lattice rows must form a square matrix")

    graph = QuotientGraph(data["dimension"], tuple(orbits), tuple(edges))
    placement = Placement(positions, np.asarray(lattice, dtype=float))
    return validate_framework(graph, placement)


def _number_list(values) -> bool:
    return isinstance(values, list) and all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in values
    )


def save_framework(fw: PeriodicFramework, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_framework(fw))


def load_framework(path) -> PeriodicFramework:
    with open(path) as fh:
        return loads_framework(fh.read())
