"""Independent brute-force oracles used to cross-check the library.

Everything here is deliberately implemented from first principles with no
code shared with the package: exact Gaussian elimination over Fractions,
Fourier-Motzkin elimination for linear feasibility, and an angular sweep for
two-dimensional cones.
"""

from fractions import Fraction

import numpy as np


def exact_rank(rows) -> int:
    """Rank by fraction-free Gaussian elimination over exact rationals."""
    mat = [[Fraction(x) for x in row] for row in rows]
    if not mat:
        return 0
    n_rows, n_cols = len(mat), len(mat[0])
    rank = 0
    row = 0
    for col in range(n_cols):
        pivot = next((r for r in range(row, n_rows) if mat[r][col] != 0), None)
        if pivot is None:
            continue
        mat[row], mat[pivot] = mat[pivot], mat[row]
        inv = mat[row][col]
        for r in range(n_rows):
            if r != row and mat[r][col] != 0:
                factor = mat[r][col] / inv
                mat[r] = [a - factor * b for a, b in zip(mat[r], mat[row])]
        row += 1
        rank += 1
        if row == n_rows:
            break
    return rank


def fourier_motzkin_feasible(ineqs, eqs=(), eq_rhs=(), ineq_rhs=None) -> bool:
    """Feasibility of {A x >= b, C x = d} by exact variable elimination.

    `ineqs` rows with right-hand sides `ineq_rhs` (default 0), equalities are
    rewritten as two opposite inequalities.  Exponential in general; fine for
    the tiny systems used in tests.
    """
    rows = []
    if ineq_rhs is None:
        ineq_rhs = [0] * len(ineqs)
    for r, b in zip(ineqs, ineq_rhs):
        rows.append([Fraction(x) for x in r] + [Fraction(b)])
    for r, b in zip(eqs, eq_rhs):
        rows.append([Fraction(x) for x in r] + [Fraction(b)])
        rows.append([-Fraction(x) for x in r] + [-Fraction(b)])
    if not rows:
        return True

    def normalized(row):
        lead = next((abs(x) for x in row[:-1] if x != 0), None)
        if lead is None:
            return tuple(row)
        return tuple(x / lead for x in row)

    nvars = len(rows[0]) - 1
    for _ in range(nvars):
        pos = [r for r in rows if r[0] > 0]
        neg = [r for r in rows if r[0] < 0]
        zero = [r[1:] for r in rows if r[0] == 0]
        combined = []
        for p in pos:
            for q in neg:
                scale_p, scale_q = -q[0], p[0]
                combined.append(
                    [scale_p * a + scale_q * b for a, b in zip(p[1:], q[1:])]
                )
        # Dedup and drop trivially satisfied rows to keep growth in check.
        rows = []
        seen = set()
        for r in zero + combined:
            if all(x == 0 for x in r[:-1]) and r[-1] <= 0:
                continue
            key = normalized(r)
            if key not in seen:
                seen.add(key)
                rows.append(r)
        if not rows:
            return True
    return all(r[0] <= 0 for r in rows)


def sweep_rays_2d(halfspaces, samples: int = 3600):
    """Approximate extremal rays of {x in R^2 : A x >= 0} by angular sweep.

    Returns unit direction estimates of the feasible arc endpoints; empty if
    no sampled direction is feasible.  Resolution is 2*pi/samples.
    """
    a = np.asarray(halfspaces, dtype=float)
    angles = np.arange(samples) * (2 * np.pi / samples)
    dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    feasible = np.all(dirs @ a.T >= -1e-9, axis=1)
    if not feasible.any():
        return np.zeros((0, 2))
    if feasible.all():
        return None  # whole plane: non-pointed
    # Endpoints of maximal circular arcs of feasible directions.
    rays = []
    for i in range(samples):
        prev = feasible[(i - 1) % samples]
        nxt = feasible[(i + 1) % samples]
        if feasible[i] and (not prev or not nxt):
            rays.append(dirs[i])
    return np.array(rays)
