"""Coined quantum walk in the reduced grid basis.

The walk unitary is ``U = S C``: a per-vertex Grover coin followed by a
shift that swaps the two ends of every grid edge bundle.  In the reduced
basis a state is labeled ``(vertex, direction)`` and exists whenever the
direction has a positive edge count, so applying ``U`` costs O(basis size).

The measured walk applies ``U``, records the probability found on the final
vertex, and projects it away; hitting-time statistics accumulate over all
steps even when the per-step series itself is truncated.  For runs that
plateau below total arrival probability 1 (dark states), the stopping rule
watches the arrival gain over a long trailing window instead of a plain
threshold on the total.
"""

from __future__ import annotations

import enum
import logging
import math
from collections import deque
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import _kernel
from .errors import CapacityError
from .grid import (
    DIRECTION_ORDER,
    OPPOSITE,
    Direction,
    GridVertex,
    ReducedGrid,
    build_reduced_grid,
)

log = logging.getLogger(__name__)

DEFAULT_MAX_STEPS = 10**8
DEFAULT_EIGEN_BOUND = 5000
DEFAULT_RECORD_LIMIT = 1_000_000

#: The dark-window rule is evaluated at window/16 granularity, so a stop is
#: reported at the first checkpoint whose trailing full window gained < delta.
_WINDOW_SEGMENTS = 16
_EPSILON_CHUNK = 4096
_NORM_GUARD = 1e-8


@dataclass(frozen=True)
class BasisState:
    """One reduced basis label: a grid vertex and an outgoing direction."""

    vertex: int
    direction: Direction


@dataclass(frozen=True)
class EpsilonRule:
    """Stop at the first step where total arrival reaches ``1 - epsilon``."""

    epsilon: float = 1e-4


@dataclass(frozen=True)
class DarkWindowRule:
    """Stop once total arrival gained less than ``delta`` over a trailing window.

    The window spans ``t_window * d`` steps; ``t_window`` defaults to
    ``1 / delta``.  Meant for walks that never reach total arrival 1.
    """

    delta: float = 1e-6
    t_window: float | None = None

    @property
    def effective_t_window(self) -> float:
        return 1.0 / self.delta if self.t_window is None else self.t_window

    def window_steps(self, d: int) -> int:
        return max(1, math.ceil(self.effective_t_window * d))


StopRule = EpsilonRule | DarkWindowRule


class ConvergenceMode(enum.Enum):
    EPSILON = "epsilon"
    DARK_WINDOW = "dark-window"
    FIXED_STEPS = "fixed-steps"


@dataclass
class WalkState:
    """Complex amplitudes over the reduced direction/position basis."""

    amplitudes: np.ndarray


@dataclass(frozen=True)
class WalkOperator:
    """Applicable walk unitary plus the basis bookkeeping around it.

    ``matrix`` is real orthogonal and sparse (a few entries per row), so one
    step is a cheap matvec.  ``final_slice`` marks the contiguous run of
    basis states living on the final vertex.
    """

    grid: ReducedGrid
    basis: tuple[BasisState, ...]
    index: dict[tuple[int, Direction], int]
    matrix: sp.csr_matrix
    final_slice: tuple[int, int]

    @property
    def basis_size(self) -> int:
        return len(self.basis)

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()


@dataclass
class HitSeries:
    """First-hit record of one measured walk.

    ``p[t]`` is the probability of first arrival at step ``t`` (``p[0] = 0``);
    the array keeps at most ``record_limit`` steps while ``p_tot`` and
    ``tau_num`` always cover all ``steps`` simulated.
    """

    p: np.ndarray
    steps: int
    p_tot: float
    tau_num: float
    converged: bool
    rule: StopRule | None

    @property
    def recorded_steps(self) -> int:
        return len(self.p) - 1

    @property
    def truncated(self) -> bool:
        return self.recorded_steps < self.steps


@dataclass(frozen=True)
class WalkSummary:
    """Hitting-time statistics of a measured walk.

    ``tau`` is the truncated expected hitting time ``sum t p(t)``; ``tau_c``
    the conditional version ``tau / p_tot`` (``None`` when nothing arrived).
    """

    tau: float
    tau_c: float | None
    p_tot: float
    mode: ConvergenceMode
    threshold: float | None
    t_window: float | None
    steps: int
    converged: bool


@dataclass(frozen=True)
class DarkAnalysis:
    """Spectral view of the trapped part of a walk.

    ``dark_overlap`` is the initial-state weight on states that evolve
    forever without touching the final vertex, i.e. ``1 - p_tot`` of an
    infinitely long run.
    """

    dark_overlap: float
    dark_dimension: int
    eigen_tolerance: float


def enumerate_basis(
    grid: ReducedGrid,
) -> tuple[tuple[BasisState, ...], dict[tuple[int, Direction], int], tuple[int, int]]:
    """Basis layout: per vertex in id order, directions in canonical order.

    Returns the states, the reverse lookup, and the final vertex's
    contiguous index slice.
    """
    states: list[BasisState] = []
    index: dict[tuple[int, Direction], int] = {}
    final_start = final_end = 0
    for v in grid.vertices:
        if v.id == grid.final:
            final_start = len(states)
        for direction in DIRECTION_ORDER:
            if v.dir_counts.get(direction, 0) > 0:
                index[(v.id, direction)] = len(states)
                states.append(BasisState(v.id, direction))
        if v.id == grid.final:
            final_end = len(states)
    assert len(states) == grid.basis_size
    return tuple(states), index, (final_start, final_end)


def coin_block(vertex: GridVertex) -> tuple[list[Direction], np.ndarray]:
    """Grover coin restricted to the vertex's grouped directions.

    With ``p`` the vertex degree and ``N(J)`` the per-direction edge counts,
    entries are ``(2/p) sqrt(N(J) N(K))`` off the diagonal and
    ``(2/p) N(J) - 1`` on it; the block is symmetric and orthogonal.
    """
    directions = [j for j in DIRECTION_ORDER if vertex.dir_counts.get(j, 0) > 0]
    counts = np.array([vertex.dir_counts[j] for j in directions], dtype=np.float64)
    roots = np.sqrt(counts)
    block = (2.0 / vertex.degree) * np.outer(roots, roots) - np.eye(len(directions))
    return directions, block


def build_walk_operator(grid: ReducedGrid) -> WalkOperator:
    """Assemble ``U = S C`` in the reduced basis as a sparse matrix.

    The coin acts blockwise per vertex; the shift swaps each state with its
    partner across the grid edge (``R`` at ``(x, y)`` with ``L`` at
    ``(x+1, y)``, and so on, including the tail pairing).  Since the shift
    is a basis permutation, row ``i`` of ``U`` is the coin row of the state
    that shifts onto ``i``.
    """
    basis, index, final_slice = enumerate_basis(grid)
    n = len(basis)

    partner = np.empty(n, dtype=np.int64)
    for i, state in enumerate(basis):
        w = grid.neighbor(state.vertex, state.direction)
        partner[i] = index[(w, OPPOSITE[state.direction])]

    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    for v in grid.vertices:
        directions, block = coin_block(v)
        ids = [index[(v.id, j)] for j in directions]
        for a, ia in enumerate(ids):
            row = partner[ia]
            for b, ib in enumerate(ids):
                value = block[a, b]
                if value != 0.0:
                    rows.append(row)
                    cols.append(ib)
                    vals.append(value)

    matrix = sp.csr_matrix(
        (np.array(vals), (np.array(rows), np.array(cols))), shape=(n, n)
    )
    return WalkOperator(grid, basis, index, matrix, final_slice)


def initial_state(grid: ReducedGrid) -> WalkState:
    """Uniform-superposition start: amplitude ``sqrt(N(J)/p0)`` per direction.

    ``p0`` is the start vertex's degree, so the state is the reduced image
    of an equal-weight launch along every original edge.
    """
    _, index, _ = enumerate_basis(grid)
    start = grid.vertices[grid.start]
    psi = np.zeros(grid.basis_size, dtype=np.complex128)
    for direction, count in start.dir_counts.items():
        psi[index[(start.id, direction)]] = math.sqrt(count / start.degree)
    return WalkState(psi)


def run_measured_walk(
    grid: ReducedGrid,
    operator: WalkOperator | None = None,
    max_steps: int = DEFAULT_MAX_STEPS,
    stop_rule: StopRule | None = EpsilonRule(),
    *,
    record_limit: int = DEFAULT_RECORD_LIMIT,
    initial: WalkState | None = None,
) -> HitSeries:
    """Measured walk on the reduced grid: step, measure the final vertex, project.

    Stops at the first step satisfying ``stop_rule`` (exactly, for the
    epsilon rule; at window/16 checkpoints for the dark-window rule), or
    after ``max_steps`` with ``converged=False``.  ``stop_rule=None`` runs a
    fixed horizon of ``max_steps``.
    """
    operator = operator if operator is not None else build_walk_operator(grid)
    state = initial if initial is not None else initial_state(grid)
    psi = np.array(state.amplitudes, dtype=np.complex128, copy=True)
    return _run_measured(
        operator.matrix,
        psi,
        operator.final_slice,
        grid.spec.d,
        stop_rule,
        max_steps,
        record_limit,
    )


def _run_measured(
    matrix: sp.csr_matrix,
    psi: np.ndarray,
    final_slice: tuple[int, int],
    d: int,
    stop_rule: StopRule | None,
    max_steps: int,
    record_limit: int,
) -> HitSeries:
    """Shared stepping loop for reduced- and full-space walks."""
    fs, fe = final_slice
    data, indices, indptr = matrix.data, matrix.indices, matrix.indptr
    scratch = np.empty_like(psi)

    if isinstance(stop_rule, DarkWindowRule):
        window = stop_rule.window_steps(d)
        chunk = max(1, -(-window // _WINDOW_SEGMENTS))  # ceil division
    else:
        chunk = _EPSILON_CHUNK
    checkpoints: deque[tuple[int, float]] = deque([(0, 0.0)])

    t = 0
    p_tot = 0.0
    tau_num = 0.0
    converged = stop_rule is None  # a fixed horizon counts as completed
    kept: list[np.ndarray] = [np.zeros(1)]
    kept_steps = 0
    buffer = np.empty(chunk, dtype=np.float64)

    while t < max_steps:
        m = min(chunk, max_steps - t)
        p_buf = buffer[:m]
        _kernel.step_chunk(data, indices, indptr, psi, scratch, fs, fe, p_buf)

        used = m
        stop = False
        if isinstance(stop_rule, EpsilonRule):
            target = 1.0 - stop_rule.epsilon
            cumulative = p_tot + np.cumsum(p_buf)
            if cumulative[-1] >= target:
                used = int(np.argmax(cumulative >= target)) + 1
                converged = stop = True

        p_used = p_buf[:used]
        tau_num += float(np.dot(np.arange(t + 1, t + used + 1, dtype=np.float64), p_used))
        p_tot += float(p_used.sum())
        t += used
        if kept_steps < record_limit:
            take = min(used, record_limit - kept_steps)
            kept.append(p_used[:take].copy())
            kept_steps += take

        if p_tot > 1.0 + 1e-10:
            raise RuntimeError(f"total arrival probability exceeded 1: {p_tot!r}")
        if stop:
            break

        if isinstance(stop_rule, DarkWindowRule):
            checkpoints.append((t, p_tot))
            while len(checkpoints) > _WINDOW_SEGMENTS + 1:
                checkpoints.popleft()
            t_past, p_past = checkpoints[0]
            if t - t_past >= window and p_tot - p_past < stop_rule.delta:
                converged = True
                break
            survival = float(np.real(np.vdot(psi, psi)))
            if abs(survival + p_tot - 1.0) > _NORM_GUARD:
                raise RuntimeError(
                    f"probability leak: survival {survival} + arrived {p_tot} != 1"
                )
            if t % (64 * chunk) < chunk:
                log.debug("measured walk at t=%d, p_tot=%.12g", t, p_tot)

    return HitSeries(
        p=np.concatenate(kept),
        steps=t,
        p_tot=p_tot,
        tau_num=tau_num,
        converged=converged,
        rule=stop_rule,
    )


def expected_hitting_time(series: HitSeries) -> WalkSummary:
    """Summarize a measured walk: tau, conditional tau, arrival total."""
    rule = series.rule
    if isinstance(rule, EpsilonRule):
        mode, threshold, t_window = ConvergenceMode.EPSILON, rule.epsilon, None
    elif isinstance(rule, DarkWindowRule):
        mode, threshold, t_window = (
            ConvergenceMode.DARK_WINDOW,
            rule.delta,
            rule.effective_t_window,
        )
    else:
        mode, threshold, t_window = ConvergenceMode.FIXED_STEPS, None, None
    tau_c = series.tau_num / series.p_tot if series.p_tot > 0.0 else None
    return WalkSummary(
        tau=series.tau_num,
        tau_c=tau_c,
        p_tot=series.p_tot,
        mode=mode,
        threshold=threshold,
        t_window=t_window,
        steps=series.steps,
        converged=series.converged,
    )


# ---------------------------------------------------------------------------
# Horizon-doubling evaluation
#
# p_tot(T) and tau_num(T) are quadratic forms in the initial state:
#     p_tot(T) = psi0' G_T psi0,    G_T = sum_{s<T} M'^s Omega M^s
# with M the step-then-project map and Omega = U' F U the one-step arrival
# form.  Two consecutive segments compose as
#     G_{a+b} = G_a + A_a' G_b A_a
#     H_{a+b} = H_a + A_a' (H_b + a G_b) A_a      (H accumulates s * terms)
#     A_{a+b} = A_b A_a
# so a horizon of 1e8+ steps costs log-many dense products instead of 1e8
# matvecs.  This trades the per-step series for reachability of horizons the
# stepping loop cannot touch; both routes agree to float precision.
# ---------------------------------------------------------------------------


class _Segment:
    """Accumulators for a block of ``steps`` measured-walk steps."""

    __slots__ = ("A", "G", "H", "steps")

    def __init__(self, A: np.ndarray, G: np.ndarray, H: np.ndarray, steps: int):
        self.A, self.G, self.H, self.steps = A, G, H, steps

    def then(self, other: "_Segment") -> "_Segment":
        """Composite segment: run ``self`` first, then ``other``."""
        At = self.A.T
        G = self.G + At @ other.G @ self.A
        H = self.H + At @ (other.H + self.steps * other.G) @ self.A
        return _Segment(other.A @ self.A, G, H, self.steps + other.steps)


def _base_segments(operator: WalkOperator) -> _Segment:
    U = operator.dense()
    fs, fe = operator.final_slice
    arrivals = U[fs:fe, :]
    M = U.copy()
    M[fs:fe, :] = 0.0
    omega = arrivals.T @ arrivals
    return _Segment(M, omega, np.zeros_like(omega), 1)


def _segment_for(steps: int, one: _Segment) -> _Segment:
    """Segment covering an arbitrary number of steps by binary composition."""
    result: _Segment | None = None
    power = one
    remaining = steps
    while remaining:
        if remaining & 1:
            result = power if result is None else result.then(power)
        remaining >>= 1
        if remaining:
            power = power.then(power)
    assert result is not None
    return result


def hitting_moments(
    operator: WalkOperator, steps: int, initial: WalkState | None = None
) -> tuple[float, float]:
    """(p_tot, tau_num) of a measured walk after exactly ``steps`` steps.

    Dense-doubling counterpart of running the stepping loop for the same
    horizon; useful on its own and the building block of
    :func:`run_doubled_walk`.
    """
    if steps < 1:
        return 0.0, 0.0
    psi = (initial if initial is not None else initial_state(operator.grid)).amplitudes
    segment = _segment_for(steps, _base_segments(operator))
    p_tot = float(np.real(np.vdot(psi, segment.G @ psi)))
    tau_num = float(np.real(np.vdot(psi, (segment.H + segment.G) @ psi)))
    return p_tot, tau_num


def run_doubled_walk(
    grid: ReducedGrid,
    operator: WalkOperator | None = None,
    max_steps: int = DEFAULT_MAX_STEPS,
    stop_rule: DarkWindowRule = DarkWindowRule(),
    *,
    initial: WalkState | None = None,
) -> HitSeries:
    """Dark-window run evaluated at geometrically growing horizons.

    Starts at one full window and keeps doubling; the run stops once a
    doubling gains less than ``delta``, which always spans at least one full
    trailing window, so any stop here also satisfies the stepping rule.  The
    per-step series is not materialized (``p`` holds only ``p(0) = 0``).
    """
    operator = operator if operator is not None else build_walk_operator(grid)
    state = initial if initial is not None else initial_state(grid)
    psi = state.amplitudes

    window = stop_rule.window_steps(grid.spec.d)
    one = _base_segments(operator)
    horizon = min(window, max_steps)
    segment = _segment_for(horizon, one)

    def moments(seg: _Segment) -> tuple[float, float]:
        p = float(np.real(np.vdot(psi, seg.G @ psi)))
        tau = float(np.real(np.vdot(psi, (seg.H + seg.G) @ psi)))
        return p, tau

    p_tot, tau_num = moments(segment)
    converged = False
    while horizon <= max_steps:
        if 2 * horizon > max_steps:
            break
        segment = segment.then(segment)
        horizon = segment.steps
        p_next, tau_next = moments(segment)
        gain = max(0.0, p_next - p_tot)  # clamp doubling round-off
        p_tot, tau_num = p_next, tau_next
        if gain < stop_rule.delta:
            converged = True
            break

    if p_tot > 1.0 + 1e-10:
        raise RuntimeError(f"total arrival probability exceeded 1: {p_tot!r}")
    return HitSeries(
        p=np.zeros(1),
        steps=horizon,
        p_tot=p_tot,
        tau_num=tau_num,
        converged=converged,
        rule=stop_rule,
    )


# ---------------------------------------------------------------------------
# Dark-state analysis from the spectrum of U
# ---------------------------------------------------------------------------


def dark_overlap_eigen(
    grid: ReducedGrid,
    operator: WalkOperator | None = None,
    *,
    eigen_bound: int = DEFAULT_EIGEN_BOUND,
    tolerance: float = 1e-9,
) -> DarkAnalysis:
    """Trapped probability from the eigenvectors of the walk unitary.

    Within each eigenvalue cluster (distance ``tolerance``), the dark part
    of the eigenspace is the orthogonal complement of the projections of the
    final-vertex basis states; summing ``|<v|psi0>|^2`` over the resulting
    dark basis gives the probability that never arrives.

    Raises
    ------
    CapacityError
        If the basis exceeds ``eigen_bound``; estimate ``1 - p_tot`` from a
        long measured run instead.
    """
    operator = operator if operator is not None else build_walk_operator(grid)
    n = operator.basis_size
    if n > eigen_bound:
        raise CapacityError(
            f"basis size {n} exceeds the dense-eigendecomposition bound {eigen_bound};"
            " estimate 1 - p_tot from a long measured run instead"
        )
    eigenvalues, eigenvectors = _unitary_eigensystem(operator.dense())
    psi0 = initial_state(grid).amplitudes
    fs, fe = operator.final_slice

    dark_overlap = 0.0
    dark_dimension = 0
    for cluster in _cluster_indices(eigenvalues, tolerance):
        vectors = eigenvectors[:, cluster]  # n x k orthonormal
        final_coeffs = vectors.conj().T[:, fs:fe]  # k x r
        u, singulars, _ = np.linalg.svd(final_coeffs, full_matrices=True)
        rank = int(np.sum(singulars > tolerance))
        null_basis = u[:, rank:]
        if null_basis.shape[1] == 0:
            continue
        coeffs = null_basis.conj().T @ (vectors.conj().T @ psi0)
        dark_overlap += float(np.real(np.vdot(coeffs, coeffs)))
        dark_dimension += null_basis.shape[1]

    return DarkAnalysis(dark_overlap, dark_dimension, tolerance)


def dark_basis(
    grid: ReducedGrid,
    operator: WalkOperator | None = None,
    *,
    eigen_bound: int = DEFAULT_EIGEN_BOUND,
    tolerance: float = 1e-9,
) -> np.ndarray:
    """Orthonormal basis (columns) of the dark subspace; empty if none."""
    operator = operator if operator is not None else build_walk_operator(grid)
    n = operator.basis_size
    if n > eigen_bound:
        raise CapacityError(
            f"basis size {n} exceeds the dense-eigendecomposition bound {eigen_bound}"
        )
    eigenvalues, eigenvectors = _unitary_eigensystem(operator.dense())
    fs, fe = operator.final_slice
    columns = []
    for cluster in _cluster_indices(eigenvalues, tolerance):
        vectors = eigenvectors[:, cluster]
        final_coeffs = vectors.conj().T[:, fs:fe]
        u, singulars, _ = np.linalg.svd(final_coeffs, full_matrices=True)
        rank = int(np.sum(singulars > tolerance))
        if rank < len(cluster):
            columns.append(vectors @ u[:, rank:])
    if not columns:
        return np.zeros((n, 0), dtype=np.complex128)
    return np.concatenate(columns, axis=1)


def _unitary_eigensystem(U: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal eigendecomposition of a real orthogonal matrix.

    ``numpy.linalg.eig`` does not guarantee orthonormal eigenvectors inside
    degenerate eigenspaces, so split the symmetric part with ``eigh`` first
    and resolve each cos-degenerate block with a second ``eigh`` on the
    antisymmetric part; every transformation stays unitary.  For an
    eigenpair ``U w = exp(i theta) w`` the antisymmetric part acts as
    ``i sin(theta)``, which fixes the sign convention below.
    """
    symmetric = (U + U.T) / 2.0
    antisymmetric = (U - U.T) / 2.0
    cosines, V = np.linalg.eigh(symmetric)

    n = U.shape[0]
    eigenvalues = np.empty(n, dtype=np.complex128)
    eigenvectors = np.empty((n, n), dtype=np.complex128)
    position = 0
    for start, end in _runs(cosines, 1e-9):
        block = V[:, start:end]
        size = end - start
        c = float(np.mean(cosines[start:end]))
        if size == 1:
            # a lone cosine has no sine partner, so the eigenvalue is real
            eigenvalues[position] = complex(c, 0.0)
            eigenvectors[:, position] = block[:, 0]
            position += 1
            continue
        restricted = block.T @ antisymmetric @ block
        neg_sines, W = np.linalg.eigh(1j * restricted)
        resolved = block @ W
        for j in range(size):
            eigenvalues[position] = complex(c, -float(neg_sines[j]))
            eigenvectors[:, position] = resolved[:, j]
            position += 1
    return eigenvalues, eigenvectors


def _runs(sorted_values: np.ndarray, tol: float):
    """Index ranges of consecutive values within ``tol`` of each other."""
    start = 0
    for i in range(1, len(sorted_values) + 1):
        if i == len(sorted_values) or sorted_values[i] - sorted_values[i - 1] > tol:
            yield start, i
            start = i


def _cluster_indices(eigenvalues: np.ndarray, tol: float) -> list[list[int]]:
    """Group eigenvalue indices whose values sit within ``tol`` on the circle."""
    order = np.argsort(np.angle(eigenvalues))
    clusters: list[list[int]] = []
    for rank, idx in enumerate(order):
        if clusters and abs(eigenvalues[idx] - eigenvalues[order[rank - 1]]) <= tol:
            clusters[-1].append(int(idx))
        else:
            clusters.append([int(idx)])
    # the circle wraps at angle +-pi: merge the first and last cluster if close
    if len(clusters) > 1:
        first, last = clusters[0], clusters[-1]
        if abs(eigenvalues[first[0]] - eigenvalues[last[-1]]) <= tol:
            clusters[0] = last + first
            clusters.pop()
    return clusters
