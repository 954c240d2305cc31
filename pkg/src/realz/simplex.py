"""Dense two-phase simplex for equality-form programs.

Solves ``minimize c.x  subject to  A x = b, x >= 0`` with either plain
float or exact ``fractions.Fraction`` arithmetic on a full tableau.  The
implementation favors auditability over speed: explicit row operations,
Dantzig pivoting with a stall guard that falls back to Bland's rule (or
pure Bland on request), duals read off the artificial columns.

Sign convention for infeasibility, fixed here and relied on downstream: the
returned ``farkas`` vector ``y`` satisfies

    y . A >= 0   componentwise (within tolerance in float mode)
    y . b <  0

so any ``x >= 0`` with ``A x = b`` would give the contradiction
``0 <= (y.A).x = y.b < 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    DimensionError,
    IterationLimitError,
    RationalInputError,
    UnboundedObjectiveError,
)


@dataclass(frozen=True)
class SimplexOutcome:
    status: str  # "optimal" | "infeasible"
    x: tuple | None
    dual: tuple | None
    farkas: tuple | None
    objective_value: object | None
    iterations: int


def _to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return Fraction(int(value))
    if isinstance(value, str):
        return Fraction(value)
    raise RationalInputError(f"not an exact rational: {value!r}")


def solve(
    A,
    b,
    objective=None,
    *,
    rational: bool = False,
    tolerance: float = 1e-9,
    pivot_rule: str = "dantzig",
    max_iterations: int = 50_000,
) -> SimplexOutcome:
    """Decide feasibility and optionally minimize ``objective`` over it.

    Rows of ``A`` are equality constraints; variables are implicitly
    nonnegative.  In rational mode every input entry must be an ``int``,
    ``Fraction`` or fraction string, comparisons are exact, and the
    tolerance is ignored.
    """
    if pivot_rule not in ("bland", "dantzig"):
        raise ValueError(f"unknown pivot rule {pivot_rule!r}")
    num = _to_fraction if rational else float
    zero = Fraction(0) if rational else 0.0
    one = Fraction(1) if rational else 1.0
    tol = Fraction(0) if rational else tolerance

    m = len(b)
    n = len(A[0]) if m else (len(objective) if objective is not None else 0)
    for row in A:
        if len(row) != n:
            raise DimensionError("ragged constraint matrix")
    if objective is not None and len(objective) != n:
        raise DimensionError("objective length does not match variable count")

    if m == 0:
        value = None
        if objective is not None:
            cvec = [num(v) for v in objective]
            if any(c < -tol for c in cvec):
                raise UnboundedObjectiveError("unconstrained negative objective direction")
            value = zero
        return SimplexOutcome("optimal", (zero,) * n, (), None, value, 0)

    # Flip rows so the right-hand side is nonnegative; remember the signs
    # to map duals back to the original orientation.
    signs = []
    rows = []
    for i in range(m):
        bi = num(b[i])
        s = -one if bi < zero else one
        signs.append(s)
        row = [s * num(v) for v in A[i]]
        row.extend(one if k == i else zero for k in range(m))
        row.append(s * bi)
        rows.append(row)
    width = n + m + 1
    basis = list(range(n, n + m))

    # Phase-1 reduced costs: minimize the sum of artificial variables.
    cost = [zero] * width
    for j in range(n + m):
        col = zero
        for i in range(m):
            col += rows[i][j]
        cost[j] = (one if j >= n else zero) - col
    rhs_total = zero
    for i in range(m):
        rhs_total += rows[i][-1]
    cost[-1] = -rhs_total

    iterations = 0
    rule = pivot_rule
    stall = 0
    stall_limit = 2 * (m + n) + 16

    def pivot(r: int, c: int) -> None:
        prow = rows[r]
        inv = one / prow[c]
        if inv != one:
            prow = [v * inv for v in prow]
            rows[r] = prow
        for i in range(m):
            if i == r:
                continue
            f = rows[i][c]
            if f != zero:
                rows[i] = [a - f * p for a, p in zip(rows[i], prow)]
        f = cost[c]
        if f != zero:
            cost[:] = [a - f * p for a, p in zip(cost, prow)]
        basis[r] = c

    def entering(limit_col: int) -> int | None:
        if rule == "bland":
            for j in range(limit_col):
                if cost[j] < -tol:
                    return j
            return None
        best, best_val = None, -tol
        for j in range(limit_col):
            if cost[j] < best_val:
                best, best_val = j, cost[j]
        return best

    def leaving(c: int) -> int | None:
        best_r = None
        best_key = None
        for r in range(m):
            a = rows[r][c]
            if a > tol:
                ratio = rows[r][-1] / a
                key = (ratio, basis[r] if rule == "bland" else r)
                if best_key is None or key < best_key:
                    best_key, best_r = key, r
        return best_r

    def run(limit_col: int, phase: str) -> None:
        nonlocal iterations, rule, stall
        while True:
            c = entering(limit_col)
            if c is None:
                return
            r = leaving(c)
            if r is None:
                raise UnboundedObjectiveError("objective unbounded below")
            z_cell = cost[-1]
            pivot(r, c)
            iterations += 1
            if iterations > max_iterations:
                raise IterationLimitError(
                    f"simplex exceeded {max_iterations} pivots in {phase}"
                )
            if rule == "dantzig":
                # Degeneracy guard: too many pivots without progress means
                # possible cycling, so fall back to Bland's rule.
                if cost[-1] > z_cell:
                    stall = 0
                else:
                    stall += 1
                    if stall > stall_limit:
                        rule = "bland"
                        stall = 0

    run(n + m, "phase 1")
    phase1_value = -cost[-1]

    if phase1_value > tol:
        # y solves the phase-1 dual; 1 - reduced cost under artificial i
        # recovers its component.  Negate to match the documented
        # orientation (y.A >= 0, y.b < 0).
        farkas = tuple(-(signs[i] * (one - cost[n + i])) for i in range(m))
        return SimplexOutcome("infeasible", None, None, farkas, None, iterations)

    # Drive artificial variables out of the basis where possible; a row
    # whose structural part vanished is redundant and its artificial stays
    # basic at level zero, which is harmless.
    for r in range(m):
        if basis[r] >= n:
            c = next((j for j in range(n) if abs(rows[r][j]) > tol), None)
            if c is not None:
                pivot(r, c)
                iterations += 1

    def extract_x() -> tuple:
        x = [zero] * n
        for r, bv in enumerate(basis):
            if bv < n:
                v = rows[r][-1]
                if not rational and -tolerance < v < 0:
                    v = 0.0
                x[bv] = v
        return tuple(x)

    if objective is None:
        return SimplexOutcome("optimal", extract_x(), (zero,) * m, None, None, iterations)

    cvec = [num(v) for v in objective]
    cb = [cvec[basis[r]] if basis[r] < n else zero for r in range(m)]
    for j in range(n + m):
        col = zero
        for r in range(m):
            if cb[r] != zero:
                col += cb[r] * rows[r][j]
        cost[j] = (cvec[j] if j < n else zero) - col
    acc = zero
    for r in range(m):
        if cb[r] != zero:
            acc += cb[r] * rows[r][-1]
    cost[-1] = -acc

    run(n, "phase 2")

    dual = tuple(signs[i] * (-cost[n + i]) for i in range(m))
    return SimplexOutcome("optimal", extract_x(), dual, None, -cost[-1], iterations)
