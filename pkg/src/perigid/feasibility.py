"""Dense linear feasibility oracle.

Finds x with A_eq x = b_eq, A_ineq x >= b_ineq, and per-variable lower bounds
(None marks a free variable), or certifies that no such x exists.  The solver
is a Phase-I simplex with Bland's rule, so it terminates and is deterministic
for a fixed input ordering.  Arithmetic runs in floating point with a
tolerance by default and falls back to exact Fractions whenever every input
is an int or Fraction (or when ``exact=True``), in which case all comparisons
are exact.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import NumericalFailureError

DEFAULT_LP_TOL = 1e-9
_MAX_PIVOTS = 50_000


def _is_exact(value) -> bool:
    return isinstance(value, (int, Fraction, np.integer)) and not isinstance(value, bool)


def _all_exact(rows) -> bool:
    return all(_is_exact(x) for row in rows for x in row)


def solve_linear_feasibility(
    equalities,
    rhs,
    lower_bounds,
    inequalities=None,
    ineq_rhs=None,
    *,
    tol: float = DEFAULT_LP_TOL,
    exact: bool | None = None,
    max_pivots: int = _MAX_PIVOTS,
):
    """Feasible point for the system, or None if infeasible.

    equalities / rhs:     A_eq x = b_eq  (lists or arrays; may be empty)
    lower_bounds:         one entry per variable; a number means x_i >= lb_i,
                          None means x_i is free
    inequalities / ineq_rhs: optional rows A x >= b, handled through slacks

    Returns a float ndarray in floating mode, a list of Fractions in exact
    mode.  Raises NumericalFailureError if the pivot cap is hit.
    """
    eq_rows = [list(r) for r in equalities]
    eq_b = list(rhs)
    lbs = list(lower_bounds)
    in_rows = [list(r) for r in (inequalities if inequalities is not None else [])]
    in_b = list(ineq_rhs) if ineq_rhs is not None else []
    if len(eq_rows) != len(eq_b) or len(in_rows) != len(in_b):
        raise ValueError("row/rhs length mismatch")
    nvars = len(lbs)
    for r in eq_rows + in_rows:
        if len(r) != nvars:
            raise ValueError("constraint row length does not match variable count")

    if exact is None:
        exact = (
            _all_exact(eq_rows)
            and _all_exact(in_rows)
            and _all_exact([eq_b, in_b])
            and all(x is None or _is_exact(x) for x in lbs)
        )
    num = Fraction if exact else float
    zero = num(0)
    eps = zero if exact else tol

    # Inequality row r >= b becomes equality r - slack = b with slack >= 0.
    n_slack = len(in_rows)
    rows = [[num(x) for x in r] + [zero] * n_slack for r in eq_rows]
    b = [num(x) for x in eq_b]
    for idx, (r, bi) in enumerate(zip(in_rows, in_b)):
        row = [num(x) for x in r] + [zero] * n_slack
        row[nvars + idx] = -num(1)
        rows.append(row)
        b.append(num(bi))
    bounds = [None if x is None else num(x) for x in lbs] + [zero] * n_slack

    # Standard form y >= 0: shift bounded variables, split free ones.
    col_map = []  # per original column: ("shift", y_col, lb) or ("free", y+, y-)
    width = 0
    for lb in bounds:
        if lb is None:
            col_map.append(("free", width, width + 1))
            width += 2
        else:
            col_map.append(("shift", width, lb))
            width += 1

    m = len(rows)
    tableau = [[zero] * width + [zero] for _ in range(m)]
    for r in range(m):
        acc = b[r]
        src = rows[r]
        for j, spec in enumerate(col_map):
            coeff = src[j]
            if coeff == zero:
                continue
            if spec[0] == "free":
                tableau[r][spec[1]] = coeff
                tableau[r][spec[2]] = -coeff
            else:
                tableau[r][spec[1]] = coeff
                acc -= coeff * spec[2]
        tableau[r][-1] = acc
        if acc < zero:
            tableau[r] = [-x for x in tableau[r]]

    rhs_scale = max([abs(row[-1]) for row in tableau], default=zero)
    feas_tol = zero if exact else tol * (1.0 + float(rhs_scale))

    # Phase I: append artificial columns, minimize their sum.
    total = width + m
    basis = []
    for r in range(m):
        row = tableau[r]
        row[-1:-1] = [zero] * m  # insert artificial block before rhs
        row[width + r] = num(1)
        basis.append(width + r)
    # Reduced costs (artificial basis): -sum of rows on real columns.
    zrow = [zero] * (total + 1)
    for j in range(width):
        zrow[j] = -sum(tableau[r][j] for r in range(m))
    zrow[-1] = -sum(tableau[r][-1] for r in range(m))  # = -objective

    pivots = 0
    while True:
        enter = next((j for j in range(total) if zrow[j] < -eps), None)
        if enter is None:
            break
        best_r, best_ratio = None, None
        for r in range(m):
            a = tableau[r][enter]
            if a > eps:
                ratio = tableau[r][-1] / a
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[r] < basis[best_r])
                ):
                    best_r, best_ratio = r, ratio
        if best_r is None:
            raise NumericalFailureError("phase-1 objective unbounded; inconsistent tableau")
        piv = tableau[best_r][enter]
        tableau[best_r] = [x / piv for x in tableau[best_r]]
        prow = tableau[best_r]
        for r in range(m):
            if r != best_r and tableau[r][enter] != zero:
                factor = tableau[r][enter]
                tableau[r] = [x - factor * p for x, p in zip(tableau[r], prow)]
        if zrow[enter] != zero:
            factor = zrow[enter]
            zrow = [x - factor * p for x, p in zip(zrow, prow)]
        basis[best_r] = enter
        pivots += 1
        if pivots > max_pivots:
            raise NumericalFailureError(f"simplex exceeded {max_pivots} pivots")

    objective = -zrow[-1]
    if objective > feas_tol:
        return None

    y = [zero] * width
    for r, var in enumerate(basis):
        if var < width:
            y[var] = tableau[r][-1]
    x = []
    for spec in col_map:
        if spec[0] == "free":
            x.append(y[spec[1]] - y[spec[2]])
        else:
            x.append(y[spec[1]] + spec[2])
    x = x[:nvars]  # drop slack values
    if exact:
        return [Fraction(v) for v in x]
    return np.array([float(v) for v in x])
