"""Explicit perturbed-hypercube graphs.

These are the brute-force counterparts of the reduced grids: every one of
the 2^d bit-string vertices is materialized, so they only make sense for
small ``d`` and serve as validation oracles for the quotient construction
and the reduced-space walks.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CapacityError
from .grid import PerturbationSpec, Scenario

#: Largest dimension the explicit graphs (and full-space walks) accept by
#: default; d = 12 already means a walk basis of roughly d * 2^d = 49k states.
DEFAULT_ORACLE_BOUND = 12


@dataclass(frozen=True)
class FullGraph:
    """Adjacency lists over bit-string vertices, plus the optional tail vertex.

    Vertex ``v`` for ``0 <= v < 2^d`` is the bit string of ``v``; the tail
    vertex, when present, gets the extra index ``2^d``.  Neighbor lists are
    ordered by flipped-bit index with the tail edge last, which fixes the
    coin-slot layout of the full-space walk.
    """

    spec: PerturbationSpec
    adjacency: tuple[tuple[int, ...], ...]
    start: int
    final: int
    tail_vertex: int | None

    @property
    def n_vertices(self) -> int:
        return len(self.adjacency)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])


def build_full_graph(spec: PerturbationSpec, oracle_bound: int = DEFAULT_ORACLE_BOUND) -> FullGraph:
    """Materialize the scenario's graph with explicit adjacency lists.

    Raises
    ------
    CapacityError
        If ``spec.d`` exceeds ``oracle_bound``.
    """
    d, q = spec.d, spec.q_weight
    if d > oracle_bound:
        raise CapacityError(f"d={d} exceeds the full-graph oracle bound {oracle_bound}")

    n = 1 << d
    adjacency = [[v ^ (1 << b) for b in range(d)] for v in range(n)]

    tail_vertex = None
    if spec.kind is Scenario.TAIL:
        # the tail exists even at q = d, where it hangs off the absorbing
        # corner and the dynamics revert to the bare walk
        anchor = (1 << q) - 1
        tail_vertex = n
        adjacency[anchor].append(tail_vertex)
        adjacency.append([anchor])
    elif spec.kind is Scenario.REMOVED_EDGE:
        lo = (1 << q) - 1
        hi = lo | (1 << q)
        adjacency[lo].remove(hi)
        adjacency[hi].remove(lo)

    final = (1 << q) - 1 if spec.kind is Scenario.EMBEDDED_FINAL else n - 1
    return FullGraph(
        spec=spec,
        adjacency=tuple(tuple(nbrs) for nbrs in adjacency),
        start=0,
        final=final,
        tail_vertex=tail_vertex,
    )
