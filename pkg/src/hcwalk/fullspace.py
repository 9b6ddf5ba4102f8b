"""Measured quantum walk on the explicit graph (brute-force validation path).

Identical dynamics to the reduced-space walk, but over the full
direction/position basis of roughly d * 2^d states: per-vertex Grover coins
of the vertex degree, and a shift exchanging the two half-edges of every
edge.  Exists purely to validate the reduced construction on small d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .fullgraph import DEFAULT_ORACLE_BOUND, FullGraph, build_full_graph
from .grid import PerturbationSpec
from .quantum import DEFAULT_RECORD_LIMIT, HitSeries, StopRule, _run_measured


@dataclass(frozen=True)
class FullWalkOperator:
    """Walk unitary over half-edge states ``(vertex, coin slot)``.

    ``offsets[v]`` is the basis index of vertex ``v``'s first coin slot;
    slots follow the graph's neighbor ordering.
    """

    graph: FullGraph
    offsets: np.ndarray
    matrix: sp.csr_matrix
    final_slice: tuple[int, int]

    @property
    def basis_size(self) -> int:
        return int(self.offsets[-1])


def build_full_walk_operator(graph: FullGraph) -> FullWalkOperator:
    adjacency = graph.adjacency
    degrees = [len(nbrs) for nbrs in adjacency]
    offsets = np.zeros(len(adjacency) + 1, dtype=np.int64)
    np.cumsum(degrees, out=offsets[1:])
    n = int(offsets[-1])

    # half-edge partners: slot s of v pairs with the slot of v inside adj[w]
    slot_of = [{w: s for s, w in enumerate(nbrs)} for nbrs in adjacency]
    partner = np.empty(n, dtype=np.int64)
    for v, nbrs in enumerate(adjacency):
        for s, w in enumerate(nbrs):
            partner[offsets[v] + s] = offsets[w] + slot_of[w][v]

    rows = np.empty(sum(p * p for p in degrees), dtype=np.int64)
    cols = np.empty_like(rows)
    vals = np.empty(len(rows), dtype=np.float64)
    k = 0
    for v, p in enumerate(degrees):
        base = offsets[v]
        off_diag = 2.0 / p
        for a in range(p):
            row = partner[base + a]
            for b in range(p):
                rows[k] = row
                cols[k] = base + b
                vals[k] = off_diag - 1.0 if a == b else off_diag
                k += 1

    matrix = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    fs = int(offsets[graph.final])
    fe = int(offsets[graph.final + 1])
    return FullWalkOperator(graph, offsets, matrix, (fs, fe))


def full_initial_state(operator: FullWalkOperator) -> np.ndarray:
    """Equal-weight launch along every edge of the start vertex."""
    graph = operator.graph
    psi = np.zeros(operator.basis_size, dtype=np.complex128)
    p0 = graph.degree(graph.start)
    base = operator.offsets[graph.start]
    psi[base : base + p0] = 1.0 / math.sqrt(p0)
    return psi


def run_full_space_walk(
    spec: PerturbationSpec,
    max_steps: int = 500,
    stop_rule: StopRule | None = None,
    *,
    oracle_bound: int = DEFAULT_ORACLE_BOUND,
    record_limit: int = DEFAULT_RECORD_LIMIT,
) -> HitSeries:
    """Measured walk on the full graph; same output shape as the reduced walk.

    Defaults to a fixed horizon, which is how the equivalence checks use it.

    Raises
    ------
    CapacityError
        If ``spec.d`` exceeds ``oracle_bound``.
    """
    graph = build_full_graph(spec, oracle_bound)
    operator = build_full_walk_operator(graph)
    psi = full_initial_state(operator)
    return _run_measured(
        operator.matrix,
        psi,
        operator.final_slice,
        spec.d,
        stop_rule,
        max_steps,
        record_limit,
    )
