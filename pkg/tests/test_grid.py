"""Reduced-grid construction, vertex classification, and quotient soundness."""

import pytest

from hcwalk import (
    Direction,
    GridCoord,
    PerturbationSpec,
    Scenario,
    TailMarker,
    build_full_graph,
    build_reduced_grid,
    classify_vertex,
    direction_count,
)

from conftest import all_specs


class TestSpecValidation:
    def test_rejects_nonpositive_d(self):
        with pytest.raises(ValueError, match="positive"):
            PerturbationSpec(Scenario.BARE, 0)

    def test_bare_rejects_other_q(self):
        with pytest.raises(ValueError, match="q absent or q = d"):
            PerturbationSpec(Scenario.BARE, 3, 1)
        PerturbationSpec(Scenario.BARE, 3, 3)  # allowed

    def test_tail_bounds(self):
        with pytest.raises(ValueError, match="0 <= q <= d"):
            PerturbationSpec(Scenario.TAIL, 3, 4)
        with pytest.raises(ValueError, match="0 <= q <= d"):
            PerturbationSpec(Scenario.TAIL, 3, -1)

    def test_embedded_bounds(self):
        with pytest.raises(ValueError, match="1 <= q <= d"):
            PerturbationSpec(Scenario.EMBEDDED_FINAL, 3, 0)

    def test_removed_edge_bounds(self):
        with pytest.raises(ValueError, match="0 <= q <= d-1"):
            PerturbationSpec(Scenario.REMOVED_EDGE, 3, 3)
        with pytest.raises(ValueError, match="d >= 2"):
            PerturbationSpec(Scenario.REMOVED_EDGE, 1, 0)


class TestBuildReducedGrid:
    def test_bare_line(self):
        grid = build_reduced_grid(PerturbationSpec(Scenario.BARE, 3))
        assert len(grid.vertices) == 4
        assert [v.multiplicity for v in grid.vertices] == [1, 3, 3, 1]
        assert grid.start == 0 and grid.final == 3

    def test_tail_grid(self):
        grid = build_reduced_grid(PerturbationSpec(Scenario.TAIL, 4, 2))
        assert len(grid.vertices) == 3 * 3 + 1
        tailed = grid.vertices[grid.id_of(GridCoord(2, 0))]
        assert tailed.degree == 5
        assert tailed.dir_counts[Direction.TAIL_DOWN] == 1
        tail = grid.vertices[grid.tail_link[1]]
        assert isinstance(tail.coord, TailMarker)
        assert tail.degree == 1 and tail.dir_counts == {Direction.TAIL_UP: 1}
        assert grid.vertex(grid.final).coord == GridCoord(2, 2)

    def test_tail_q_equals_d_is_bare_line(self):
        grid = build_reduced_grid(PerturbationSpec(Scenario.TAIL, 4, 4))
        assert grid.tail_link is None
        assert len(grid.vertices) == 5

    def test_removed_edge_grid(self):
        grid = build_reduced_grid(PerturbationSpec(Scenario.REMOVED_EDGE, 3, 1))
        assert len(grid.vertices) == 2 * 2 * 2
        assert grid.vertex(grid.final).coord == GridCoord(1, 1, 1)
        for z in (0, 1):
            perturbed = grid.vertex(grid.id_of(GridCoord(1, 0, z)))
            assert perturbed.degree == 2  # d - 1
            assert Direction.F not in perturbed.dir_counts
            assert Direction.B not in perturbed.dir_counts

    def test_embedded_grid(self):
        grid = build_reduced_grid(PerturbationSpec(Scenario.EMBEDDED_FINAL, 3, 2))
        assert len(grid.vertices) == 3 * 2
        assert grid.vertex(grid.final).coord == GridCoord(2, 0)
        assert all(v.degree == 3 for v in grid.vertices)

    @pytest.mark.parametrize("spec", all_specs(8), ids=str)
    def test_multiplicities_sum_to_hypercube(self, spec):
        grid = build_reduced_grid(spec)
        tail_extra = 1 if grid.tail_link is not None else 0
        total = sum(v.multiplicity for v in grid.vertices)
        assert total == 2**spec.d + tail_extra

    @pytest.mark.parametrize("spec", all_specs(8), ids=str)
    def test_dir_counts_sum_to_degree(self, spec):
        grid = build_reduced_grid(spec)
        for v in grid.vertices:
            assert sum(v.dir_counts.values()) == v.degree
            assert all(n > 0 for n in v.dir_counts.values())

    def test_grid_size_formulas(self):
        for d in range(2, 12):
            for q in range(0, d + 1):
                n = len(build_reduced_grid(PerturbationSpec(Scenario.TAIL, d, q)).vertices)
                expected = (q + 1) * (d - q + 1) + (1 if q < d else 0)
                assert n == expected
            for q in range(0, d):
                n = len(build_reduced_grid(PerturbationSpec(Scenario.REMOVED_EDGE, d, q)).vertices)
                assert n == 2 * (q + 1) * (d - q)
        # the 2D grid is largest at q = d/2 for even d
        for d in (4, 8, 10):
            grid = build_reduced_grid(PerturbationSpec(Scenario.EMBEDDED_FINAL, d, d // 2))
            assert len(grid.vertices) == (d + 2) ** 2 // 4


class TestDirectionCount:
    def test_tail_counts(self):
        grid = build_reduced_grid(PerturbationSpec(Scenario.TAIL, 4, 2))
        origin = grid.id_of(GridCoord(0, 0))
        assert direction_count(grid, origin, Direction.R) == 2
        assert direction_count(grid, origin, Direction.L) == 0
        assert direction_count(grid, origin, Direction.U) == 2
        assert direction_count(grid, origin, Direction.F) == 0

    def test_removed_edge_blocks_z_move(self):
        grid = build_reduced_grid(PerturbationSpec(Scenario.REMOVED_EDGE, 3, 1))
        perturbed = grid.id_of(GridCoord(1, 0, 0))
        assert direction_count(grid, perturbed, Direction.F) == 0
        other = grid.id_of(GridCoord(0, 0, 0))
        assert direction_count(grid, other, Direction.F) == 1
        assert direction_count(grid, other, Direction.B) == 0


class TestClassifyVertex:
    def test_embedded_examples(self):
        spec = PerturbationSpec(Scenario.EMBEDDED_FINAL, 4, 2)
        assert classify_vertex(spec, 0b0011) == GridCoord(2, 0)
        assert classify_vertex(spec, 0) == GridCoord(0, 0)
        assert classify_vertex(spec, 0b1100) == GridCoord(0, 2)

    def test_removed_edge_coords(self):
        spec = PerturbationSpec(Scenario.REMOVED_EDGE, 4, 1)
        assert classify_vertex(spec, 0) == GridCoord(0, 0, 0)
        assert classify_vertex(spec, 0b0001) == GridCoord(1, 0, 0)
        assert classify_vertex(spec, 0b0011) == GridCoord(1, 0, 1)
        assert classify_vertex(spec, 0b1111) == GridCoord(1, 2, 1)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError, match="3-bit"):
            classify_vertex(PerturbationSpec(Scenario.BARE, 3), 8)

    @pytest.mark.parametrize("spec", all_specs(8), ids=str)
    def test_partition_sizes_match_multiplicities(self, spec):
        grid = build_reduced_grid(spec)
        buckets: dict[int, int] = {}
        for bits in range(2**spec.d):
            coord = classify_vertex(spec, bits)
            buckets[grid.id_of(coord)] = buckets.get(grid.id_of(coord), 0) + 1
        for v in grid.vertices:
            if isinstance(v.coord, TailMarker):
                continue
            assert buckets.get(v.id, 0) == v.multiplicity


def quotient_soundness(spec, grid=None, graph=None):
    """Check the grid against the explicit graph; shared with the acceptance suite.

    Every constituent of grid vertex u must have exactly N_u(J) neighbors in
    the bucket that u's J-neighbor maps to, and degrees must agree (the
    absorbing vertex of the tail q=d case excepted: the unreachable tail
    hangs there in the full graph only).
    """
    grid = grid or build_reduced_grid(spec)
    graph = graph or build_full_graph(spec)
    buckets: dict[int, list[int]] = {v.id: [] for v in grid.vertices}
    for bits in range(2**spec.d):
        buckets[grid.id_of(classify_vertex(spec, bits))].append(bits)
    if grid.tail_link is not None:
        buckets[grid.tail_link[1]].append(graph.tail_vertex)

    bucket_of = {}
    for vid, members in buckets.items():
        for m in members:
            bucket_of[m] = vid

    final_exempt = spec.kind is Scenario.TAIL and spec.q_weight == spec.d
    for v in grid.vertices:
        for member in buckets[v.id]:
            if not (final_exempt and v.id == grid.final):
                assert graph.degree(member) == v.degree
            neighbor_buckets: dict[int, int] = {}
            for w in graph.adjacency[member]:
                if w in bucket_of:
                    b = bucket_of[w]
                    neighbor_buckets[b] = neighbor_buckets.get(b, 0) + 1
            for direction, count in v.dir_counts.items():
                target = grid.neighbor(v.id, direction)
                assert neighbor_buckets.get(target, 0) == count, (
                    spec,
                    v.coord,
                    direction,
                )


@pytest.mark.parametrize("spec", all_specs(7), ids=str)
def test_quotient_soundness_small(spec):
    quotient_soundness(spec)
