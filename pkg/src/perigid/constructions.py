"""Constructors for the built-in framework families and edge-orbit surgery.

Two families are provided:

* ``simplex_framework(d, variant)``: two orbits, red at the origin and green
  at the centroid v = (1/(d+1)) sum(lambda_i), with green-to-red bars at the
  offsets {lambda_i} and {lambda_i + lambda_j, i < j}.  The enhanced variant
  adds the d offsets {2 lambda_i}; removing one of those gives a one-degree-
  of-freedom mechanism.
* ``stressed_framework()``: the three-dimensional two-orbit framework with
  eight green-to-red bars that carries a one-dimensional stress space.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import InvalidDimensionError
from .framework import EdgeOrbit, PeriodicFramework, Placement, QuotientGraph, validate_framework

RED = "red"
GREEN = "green"


@dataclass(frozen=True)
class SimplexVariant:
    kind: str  # "base" | "enhanced" | "removed"
    removed: int | None = None

    @classmethod
    def base(cls) -> "SimplexVariant":
        return cls("base")

    @classmethod
    def enhanced(cls) -> "SimplexVariant":
        return cls("enhanced")

    @classmethod
    def removed_edge(cls, k: int) -> "SimplexVariant":
        return cls("removed", k)

    @classmethod
    def parse(cls, text: str) -> "SimplexVariant":
        """Parse CLI-style variant spec: ``base``, ``enhanced``, ``removed:K``."""
        if text == "base":
            return cls.base()
        if text == "enhanced":
            return cls.enhanced()
        if text.startswith("removed:"):
            try:
                return cls.removed_edge(int(text.split(":", 1)[1]))
            except ValueError:
                pass
        raise InvalidDimensionError(f"unknown simplex variant {text!r}")

    def label(self) -> str:
        return self.kind if self.removed is None else f"{self.kind}{self.removed}"


def _regular_simplex_generators(d: int) -> np.ndarray:
    # Unit generators with pairwise inner product 1/2: the edge vectors of a
    # regular simplex with one vertex at the origin.  Cholesky gives an
    # upper-triangular column layout.
    gram = (np.eye(d) + np.ones((d, d))) / 2.0
    return np.linalg.cholesky(gram).T


def simplex_framework(
    d: int,
    variant: SimplexVariant = SimplexVariant.base(),
    regular: bool = False,
) -> PeriodicFramework:
    """Two-orbit simplex-family framework in dimension d >= 2.

    With ``regular=False`` (default) the lattice generators are the standard
    basis, which keeps every coordinate an exact binary rational for d where
    1/(d+1) is dyadic and keeps golden tests deterministic; ``regular=True``
    uses the edge vectors of a regular simplex instead.
    """
    if not isinstance(d, int) or isinstance(d, bool) or d < 2:
        raise InvalidDimensionError(f"simplex family needs integer d >= 2, got {d!r}")
    if variant.kind == "removed" and not (
        isinstance(variant.removed, int) and 1 <= variant.removed <= d
    ):
        raise InvalidDimensionError(
            f"removed edge index must lie in 1..{d}, got {variant.removed!r}"
        )

    lattice = _regular_simplex_generators(d) if regular else np.eye(d)
    green = lattice.sum(axis=1) / (d + 1)

    def unit(k: int, scale: int = 1) -> tuple[int, ...]:
        s = [0] * d
        s[k] = scale
        return tuple(s)

    shifts: list[tuple[int, ...]] = [unit(k) for k in range(d)]
    shifts += [
        tuple(int(i == a) + int(i == b) for i in range(d))
        for a, b in combinations(range(d), 2)
    ]
    if variant.kind in ("enhanced", "removed"):
        doubles = [unit(k, 2) for k in range(d)]
        if variant.kind == "removed":
            del doubles[variant.removed - 1]
        shifts += doubles

    graph = QuotientGraph(
        d,
        (RED, GREEN),
        tuple(EdgeOrbit(GREEN, RED, s) for s in shifts),
    )
    placement = Placement({RED: np.zeros(d), GREEN: green}, lattice)
    return validate_framework(graph, placement)


def stressed_framework() -> PeriodicFramework:
    """Three-dimensional stressed framework: 2 vertex orbits, 8 edge orbits.

    Red sits at the origin with the identity lattice; green sits at
    (1/2, 1/2, -1/2) and connects to the red translates at 0, e1, e2, e3,
    e1+e2, e2+e3, e3+e1, e1+e2+e3 (in that edge order).
    """
    shifts = [
        (0, 0, 0),
        (1, 0, 0),
        (0, 1, 0),
        (0, 0, 1),
        (1, 1, 0),
        (0, 1, 1),
        (1, 0, 1),
        (1, 1, 1),
    ]
    graph = QuotientGraph(
        3,
        (RED, GREEN),
        tuple(EdgeOrbit(GREEN, RED, s) for s in shifts),
    )
    placement = Placement(
        {RED: np.zeros(3), GREEN: np.array([0.5, 0.5, -0.5])},
        np.eye(3),
    )
    return validate_framework(graph, placement)


def with_edge_orbit(
    fw: PeriodicFramework, tail: str, head: str, shift
) -> PeriodicFramework:
    """Return a new framework with one extra edge orbit appended."""
    new_edge = EdgeOrbit(tail, head, tuple(int(c) for c in shift))
    graph = QuotientGraph(
        fw.dimension,
        fw.graph.vertex_orbits,
        fw.graph.edge_orbits + (new_edge,),
    )
    return validate_framework(graph, fw.placement)


def remove_edge_orbit(fw: PeriodicFramework, k: int) -> PeriodicFramework:
    """Return a new framework with edge orbit k removed."""
    if not 0 <= k < fw.m:
        raise IndexError(f"edge orbit index {k} out of range 0..{fw.m - 1}")
    edges = fw.graph.edge_orbits
    graph = QuotientGraph(
        fw.dimension, fw.graph.vertex_orbits, edges[:k] + edges[k + 1 :]
    )
    return validate_framework(graph, fw.placement)
