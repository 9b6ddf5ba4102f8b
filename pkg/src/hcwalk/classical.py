"""Classical expected hitting times, exact over the rationals.

The closed-form expressions mix terms of order 2^d with corrections of
order 1/d, so everything here runs on ``fractions.Fraction`` and converts
to floating point only at the caller's discretion.  The absorbing-chain
solve operates on the reduced grid (O(d^2) states), never on the full
hypercube.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .errors import SingularSystemError
from .grid import PerturbationSpec, ReducedGrid, Scenario, TailMarker, build_reduced_grid


class ClassicalMethod(enum.Enum):
    CLOSED_FORM = "closed-form"
    FUNDAMENTAL_MATRIX = "fundamental-matrix"


@dataclass(frozen=True)
class ClassicalResult:
    spec: PerturbationSpec
    tau: Fraction
    method: ClassicalMethod


def delta_sequence(d: int) -> list[Fraction]:
    """Per-shell hitting-time gaps ``Delta(k) = tau(k) - tau(k+1)`` for k = 0..d-1.

    Computed by the backward recursion
    ``Delta(k) = (d-k-1)/(k+1) * Delta(k+1) - d/(k+1)`` starting from the
    return-time boundary value ``Delta(d-1) = 2^d - 1``.
    """
    if d < 1:
        raise ValueError(f"d must be a positive integer, got d={d}")
    deltas = [Fraction(0)] * d
    deltas[d - 1] = Fraction(2**d - 1)
    for k in range(d - 2, -1, -1):
        deltas[k] = Fraction(d - k - 1, k + 1) * deltas[k + 1] - Fraction(d, k + 1)
    return deltas


def classical_bare(d: int) -> Fraction:
    """Exact corner-to-corner expected hitting time on the bare hypercube."""
    return sum(delta_sequence(d), start=Fraction(0))


def classical_tail(d: int, q: int) -> Fraction:
    """Expected hitting time with one extra vertex tailed at Hamming weight q.

    Equals the bare value plus the exact correction
    ``(2/d) * sum_{k=q}^{d-1} 1/C(d-1, k)``; strictly decreasing in q.  For
    ``q = d`` the tail hangs off the absorbing corner and is unreachable, so
    the bare value is returned.
    """
    if not 0 <= q <= d:
        raise ValueError(f"tail scenario requires 0 <= q <= d, got q={q}")
    if q == d:
        return classical_bare(d)
    correction = sum((Fraction(1, comb(d - 1, k)) for k in range(q, d)), start=Fraction(0))
    return classical_bare(d) + Fraction(2, d) * correction


def classical_embedded(d: int, q: int) -> Fraction:
    """Expected hitting time to a target of Hamming weight q inside a d-cube.

    By symmetry this is the bare-cube time over the last q shells,
    ``sum_{k=d-q}^{d-1} Delta(k)``; monotonically increasing in q and equal
    to the full corner-to-corner time at ``q = d``.
    """
    if not 1 <= q <= d:
        raise ValueError(f"embedded final vertex requires 1 <= q <= d, got q={q}")
    deltas = delta_sequence(d)
    return sum(deltas[d - q :], start=Fraction(0))


def classical_fundamental(grid: ReducedGrid) -> Fraction:
    """Expected hitting time from the absorbing-chain solve on the reduced grid.

    Solves ``(I - Q) t = 1`` exactly over the rationals, where ``Q`` holds
    the grid transition probabilities ``N_v(J) / degree(v)`` with the final
    vertex removed, and returns ``t[start]``.  Agrees exactly with the
    closed forms wherever those apply; for the removed-edge scenario it is
    the only exact route.

    Raises
    ------
    SingularSystemError
        If the system is singular, i.e. some vertex cannot reach the final
        vertex (cannot happen for valid scenario parameters).
    """
    final = grid.final
    unknowns = [v for v in grid.vertices if v.id != final]
    # Band-friendly elimination order: y rows outermost, x within, z fastest,
    # with the tail vertex right after its anchor column.
    unknowns.sort(
        key=lambda v: (0, grid.spec.q_weight, 0, 1)
        if isinstance(v.coord, TailMarker)
        else (v.coord.y, v.coord.x, v.coord.z or 0, 0)
    )
    col = {v.id: i for i, v in enumerate(unknowns)}

    rows: list[dict[int, Fraction]] = []
    for v in unknowns:
        row = {col[v.id]: Fraction(1)}
        for direction, count in v.dir_counts.items():
            w = grid.neighbor(v.id, direction)
            if w is None or w == final:
                continue
            c = col[w]
            row[c] = row.get(c, Fraction(0)) - Fraction(count, v.degree)
        rows.append(row)

    solution = _solve_rational(rows, [Fraction(1)] * len(rows))
    return solution[col[grid.start]]


def classical_hitting_time(spec: PerturbationSpec, method: ClassicalMethod | None = None) -> ClassicalResult:
    """Exact classical hitting time for a scenario.

    Defaults to the closed form where one exists; the removed-edge scenario
    has none and always goes through the grid solve.
    """
    if method is None:
        method = (
            ClassicalMethod.FUNDAMENTAL_MATRIX
            if spec.kind is Scenario.REMOVED_EDGE
            else ClassicalMethod.CLOSED_FORM
        )
    if method is ClassicalMethod.CLOSED_FORM:
        if spec.kind is Scenario.BARE:
            tau = classical_bare(spec.d)
        elif spec.kind is Scenario.TAIL:
            tau = classical_tail(spec.d, spec.q_weight)
        elif spec.kind is Scenario.EMBEDDED_FINAL:
            tau = classical_embedded(spec.d, spec.q_weight)
        else:
            raise ValueError("the removed-edge scenario has no closed form")
    else:
        tau = classical_fundamental(build_reduced_grid(spec))
    return ClassicalResult(spec, tau, method)


def _solve_rational(rows: list[dict[int, Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Gaussian elimination over sparse rational rows.

    Rows are dicts of column -> coefficient.  The caller's ordering keeps
    the system banded, so elimination touches only nearby rows and entries
    stay small; ``Fraction`` keeps everything exact.
    """
    n = len(rows)
    rows = [dict(r) for r in rows]
    rhs = list(rhs)
    for k in range(n):
        if not rows[k].get(k):
            for r in range(k + 1, n):
                if rows[r].get(k):
                    rows[k], rows[r] = rows[r], rows[k]
                    rhs[k], rhs[r] = rhs[r], rhs[k]
                    break
            else:
                raise SingularSystemError(
                    "hitting-time system is singular; the walk graph is disconnected"
                )
        pivot = rows[k][k]
        for r in range(k + 1, n):
            factor = rows[r].get(k)
            if not factor:
                continue
            scale = factor / pivot
            for c, value in rows[k].items():
                if c < k:
                    continue
                updated = rows[r].get(c, Fraction(0)) - scale * value
                if updated:
                    rows[r][c] = updated
                else:
                    rows[r].pop(c, None)
            rhs[r] -= scale * rhs[k]
    solution = [Fraction(0)] * n
    for k in range(n - 1, -1, -1):
        acc = rhs[k]
        for c, value in rows[k].items():
            if c > k:
                acc -= value * solution[c]
        solution[k] = acc / rows[k][k]
    return solution
