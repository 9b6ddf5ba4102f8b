"""Reduced grid models of perturbed hypercubes.

A walk on a d-dimensional hypercube whose perturbation distinguishes m
vertices only ever explores a polynomially large quotient of the graph:
vertices sharing the same Hamming weights relative to the distinguished bit
subsets are interchangeable and collapse onto a single grid vertex carrying
a multiplicity.  The walker then moves between grid vertices along a handful
of effective directions, each backed by ``N(J)`` original edges.  Those
per-direction counts are everything the classical and quantum machinery
downstream needs.

Supported scenarios:

* ``BARE``           - unperturbed hypercube; the grid is a line of d+1
                       vertices indexed by Hamming weight.
* ``TAIL``           - one extra vertex attached to a hypercube vertex of
                       Hamming weight q; a (q+1) x (d-q+1) grid plus a
                       dangling tail vertex below the (q, 0) corner.
* ``EMBEDDED_FINAL`` - the walk targets a vertex of Hamming weight q instead
                       of the opposite corner (a q-cube sitting inside the
                       d-cube); same 2D grid, no structural change.
* ``REMOVED_EDGE``   - one edge deleted between neighboring vertices of
                       Hamming weights q and q+1; the two endpoints both
                       become special, so the grid gains a third, binary
                       coordinate: 2 x (q+1) x (d-q) vertices.

Bit-subset convention: only the Hamming weight q of the distinguished vertex
matters, so we fix the distinguished vertex to the lowest q bit positions
(set ``X``), and for ``REMOVED_EDGE`` the removed edge flips bit q (set
``Z``).  This makes every mapping deterministic and directly comparable to
the brute-force graphs in :mod:`hcwalk.fullgraph`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from math import comb


class Scenario(enum.Enum):
    """Which perturbation is applied to the hypercube."""

    BARE = "bare"
    TAIL = "tail"
    EMBEDDED_FINAL = "embedded"
    REMOVED_EDGE = "removed-edge"


class Direction(enum.Enum):
    """Movement directions on the reduced grid.

    ``R``/``L`` change the x coordinate, ``U``/``D`` the y coordinate and
    ``F``/``B`` the z layer (removed-edge grids only).  ``TAIL_DOWN`` leads
    from the tailed vertex to the appended tail vertex, ``TAIL_UP`` back.
    """

    R = "R"
    L = "L"
    U = "U"
    D = "D"
    F = "F"
    B = "B"
    TAIL_DOWN = "TD"
    TAIL_UP = "TU"


#: Canonical per-vertex direction order; fixes the basis layout everywhere.
DIRECTION_ORDER: tuple[Direction, ...] = (
    Direction.R,
    Direction.L,
    Direction.U,
    Direction.D,
    Direction.F,
    Direction.B,
    Direction.TAIL_DOWN,
    Direction.TAIL_UP,
)

#: Reverse direction of each grid move (the far end of the same edge bundle).
OPPOSITE: dict[Direction, Direction] = {
    Direction.R: Direction.L,
    Direction.L: Direction.R,
    Direction.U: Direction.D,
    Direction.D: Direction.U,
    Direction.F: Direction.B,
    Direction.B: Direction.F,
    Direction.TAIL_DOWN: Direction.TAIL_UP,
    Direction.TAIL_UP: Direction.TAIL_DOWN,
}


@dataclass(frozen=True)
class PerturbationSpec:
    """Scenario selector: hypercube dimension ``d`` and Hamming weight ``q``.

    ``q`` is the Hamming weight of the distinguished vertex (the tailed
    vertex, the embedded final vertex, or the lower endpoint of the removed
    edge).  For ``BARE`` it may be omitted; it is implicitly ``d``.
    """

    kind: Scenario
    d: int
    q: int | None = None

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError(f"d must be a positive integer, got d={self.d}")
        kind, d, q = self.kind, self.d, self.q
        if kind is Scenario.BARE:
            if q is not None and q != d:
                raise ValueError(f"bare scenario requires q absent or q = d, got q={q}")
        elif kind is Scenario.TAIL:
            if q is None or not 0 <= q <= d:
                raise ValueError(f"tail scenario requires 0 <= q <= d, got q={q}")
        elif kind is Scenario.EMBEDDED_FINAL:
            if q is None or not 1 <= q <= d:
                raise ValueError(f"embedded final vertex requires 1 <= q <= d, got q={q}")
        elif kind is Scenario.REMOVED_EDGE:
            if d < 2:
                raise ValueError(
                    f"removed edge requires d >= 2 (removing the only edge of a"
                    f" 1-cube disconnects it), got d={d}"
                )
            if q is None or not 0 <= q <= d - 1:
                raise ValueError(f"removed edge requires 0 <= q <= d-1, got q={q}")

    @property
    def q_weight(self) -> int:
        """Hamming weight of the distinguished vertex (``d`` when unperturbed)."""
        return self.d if self.q is None else self.q


@dataclass(frozen=True)
class GridCoord:
    """Position on the reduced grid.

    ``x`` counts set bits inside the distinguished subset X, ``y`` inside Y.
    ``z`` is the removed-edge bit and stays ``None`` on 2D grids.
    """

    x: int
    y: int
    z: int | None = None

    def shifted(self, direction: Direction) -> "GridCoord":
        """Coordinate one step away; may fall outside the grid bounds."""
        x, y, z = self.x, self.y, self.z
        if direction is Direction.R:
            return GridCoord(x + 1, y, z)
        if direction is Direction.L:
            return GridCoord(x - 1, y, z)
        if direction is Direction.U:
            return GridCoord(x, y + 1, z)
        if direction is Direction.D:
            return GridCoord(x, y - 1, z)
        if direction is Direction.F:
            return GridCoord(x, y, None if z is None else z + 1)
        if direction is Direction.B:
            return GridCoord(x, y, None if z is None else z - 1)
        raise ValueError(f"direction {direction} has no grid displacement")


class TailMarker:
    """Sentinel coordinate of the appended tail vertex."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "TAIL"


TAIL = TailMarker()


@dataclass(frozen=True)
class GridVertex:
    """One quotient class of hypercube vertices.

    ``multiplicity`` is the exact number of hypercube vertices collapsed
    here (a product of binomials, kept as a Python integer so it never
    overflows).  ``dir_counts`` maps each available direction to the number
    ``N(J)`` of original edges leading that way; directions with zero count
    are omitted.  ``degree`` is the coin dimension, always ``sum(N(J))``.
    """

    id: int
    coord: GridCoord | TailMarker
    multiplicity: int
    degree: int
    dir_counts: dict[Direction, int]


class ReducedGrid:
    """The mapped grid graph for one scenario.

    Immutable after construction; instances are safe to share across
    threads.
    """

    def __init__(
        self,
        spec: PerturbationSpec,
        vertices: list[GridVertex],
        start: int,
        final: int,
        tail_link: tuple[int, int] | None = None,
    ):
        self.spec = spec
        self.vertices: tuple[GridVertex, ...] = tuple(vertices)
        self.start = start
        self.final = final
        self.tail_link = tail_link  # (anchor id, tail id) when a tail exists
        self.basis_size = sum(len(v.dir_counts) for v in self.vertices)
        self._ids: dict[tuple[int, int, int | None], int] = {
            (v.coord.x, v.coord.y, v.coord.z): v.id
            for v in self.vertices
            if isinstance(v.coord, GridCoord)
        }

    def __repr__(self) -> str:
        return (
            f"ReducedGrid({self.spec.kind.value}, d={self.spec.d},"
            f" q={self.spec.q_weight}, vertices={len(self.vertices)},"
            f" basis={self.basis_size})"
        )

    def vertex(self, vid: int) -> GridVertex:
        return self.vertices[vid]

    def id_of(self, coord: GridCoord | TailMarker) -> int:
        """Vertex id at a coordinate; raises ``ValueError`` if absent."""
        if isinstance(coord, TailMarker):
            if self.tail_link is None:
                raise ValueError("grid has no tail vertex")
            return self.tail_link[1]
        try:
            return self._ids[(coord.x, coord.y, coord.z)]
        except KeyError:
            raise ValueError(f"no grid vertex at {coord}") from None

    def direction_count(self, vid: int, direction: Direction) -> int:
        """``N(J)`` at a vertex; 0 for directions leaving the grid."""
        return self.vertices[vid].dir_counts.get(direction, 0)

    def neighbor(self, vid: int, direction: Direction) -> int | None:
        """Vertex reached by one grid move, or ``None`` if there is none."""
        if direction is Direction.TAIL_DOWN:
            if self.tail_link is not None and vid == self.tail_link[0]:
                return self.tail_link[1]
            return None
        if direction is Direction.TAIL_UP:
            if self.tail_link is not None and vid == self.tail_link[1]:
                return self.tail_link[0]
            return None
        coord = self.vertices[vid].coord
        if isinstance(coord, TailMarker):
            return None
        target = coord.shifted(direction)
        return self._ids.get((target.x, target.y, target.z))


def direction_count(grid: ReducedGrid, vid: int, direction: Direction) -> int:
    """``N(J)``: number of original edges leading from vertex ``vid`` in ``direction``."""
    return grid.direction_count(vid, direction)


def build_reduced_grid(spec: PerturbationSpec) -> ReducedGrid:
    """Construct the quotient grid for a scenario.

    The layout convention puts the start vertex (Hamming weight 0) at the
    origin and the distinguished vertex at ``(q, 0)``; the opposite corner
    of the hypercube ends up at the far corner of the grid.

    Parameters
    ----------
    spec:
        Validated scenario parameters.

    Returns
    -------
    ReducedGrid
        Vertices carry multiplicities, degrees and per-direction edge
        counts; ``start`` and ``final`` mark the walk endpoints.
    """
    if spec.kind is Scenario.REMOVED_EDGE:
        return _build_removed_edge_grid(spec)
    return _build_planar_grid(spec)


def _build_planar_grid(spec: PerturbationSpec) -> ReducedGrid:
    d, q = spec.d, spec.q_weight
    width, height = q + 1, d - q + 1
    has_tail = spec.kind is Scenario.TAIL and q < d

    vertices: list[GridVertex] = []
    for y in range(height):
        for x in range(width):
            counts = {
                Direction.R: q - x,
                Direction.L: x,
                Direction.U: d - q - y,
                Direction.D: y,
            }
            counts = {j: n for j, n in counts.items() if n > 0}
            if has_tail and x == q and y == 0:
                counts[Direction.TAIL_DOWN] = 1
            vertices.append(
                GridVertex(
                    id=x + width * y,
                    coord=GridCoord(x, y),
                    multiplicity=comb(q, x) * comb(d - q, y),
                    degree=sum(counts.values()),
                    dir_counts=counts,
                )
            )

    tail_link = None
    if has_tail:
        anchor = q  # id of (q, 0)
        tail_id = width * height
        vertices.append(
            GridVertex(
                id=tail_id,
                coord=TAIL,
                multiplicity=1,
                degree=1,
                dir_counts={Direction.TAIL_UP: 1},
            )
        )
        tail_link = (anchor, tail_id)

    if spec.kind is Scenario.EMBEDDED_FINAL:
        final = q  # the distinguished vertex (q, 0) absorbs the walker
    else:
        final = width * height - 1  # opposite corner (q, d-q)
    return ReducedGrid(spec, vertices, start=0, final=final, tail_link=tail_link)


def _build_removed_edge_grid(spec: PerturbationSpec) -> ReducedGrid:
    d, q = spec.d, spec.q_weight
    width, height = q + 1, d - q  # x in [0,q], y in [0,d-q-1], two z layers

    vertices: list[GridVertex] = []
    for z in (0, 1):
        for y in range(height):
            for x in range(width):
                counts = {
                    Direction.R: q - x,
                    Direction.L: x,
                    Direction.U: d - q - 1 - y,
                    Direction.D: y,
                    Direction.F: 1 - z,
                    Direction.B: z,
                }
                if x == q and y == 0:
                    # endpoints of the removed edge: no z move, degree d-1
                    counts[Direction.F] = 0
                    counts[Direction.B] = 0
                counts = {j: n for j, n in counts.items() if n > 0}
                vertices.append(
                    GridVertex(
                        id=x + width * (y + height * z),
                        coord=GridCoord(x, y, z),
                        multiplicity=comb(q, x) * comb(d - q - 1, y),
                        degree=sum(counts.values()),
                        dir_counts=counts,
                    )
                )

    final = 2 * width * height - 1  # opposite corner (q, d-q-1, 1)
    return ReducedGrid(spec, vertices, start=0, final=final)


def classify_vertex(spec: PerturbationSpec, bits: int) -> GridCoord:
    """Grid coordinate of a hypercube vertex given as a d-bit integer.

    Uses the canonical subsets: X is the lowest ``q`` bit positions, and for
    ``REMOVED_EDGE`` the z bit sits at position ``q`` with Y above it.
    """
    d, q = spec.d, spec.q_weight
    if not 0 <= bits < (1 << d):
        raise ValueError(f"vertex label {bits} is not a {d}-bit string")
    x = (bits & ((1 << q) - 1)).bit_count()
    if spec.kind is Scenario.REMOVED_EDGE:
        z = (bits >> q) & 1
        y = (bits >> (q + 1)).bit_count()
        return GridCoord(x, y, z)
    return GridCoord(x, (bits >> q).bit_count())
