"""Walk operator structure, measured-walk dynamics, and engine cross-checks."""

import numpy as np
import pytest

from hcwalk import (
    DarkWindowRule,
    Direction,
    EpsilonRule,
    GridCoord,
    PerturbationSpec,
    Scenario,
    build_full_graph,
    build_reduced_grid,
    build_walk_operator,
    expected_hitting_time,
    hitting_moments,
    initial_state,
    run_doubled_walk,
    run_full_space_walk,
    run_measured_walk,
)
from hcwalk.quantum import ConvergenceMode, HitSeries, coin_block, enumerate_basis
from hcwalk import _kernel

from conftest import all_specs


def grover_matrix(p: int) -> np.ndarray:
    return (2.0 / p) * np.ones((p, p)) - np.eye(p)


class TestCoinBlocks:
    def test_bare_interior_block_is_bit_flip(self):
        grid = build_reduced_grid(PerturbationSpec(Scenario.BARE, 2))
        directions, block = coin_block(grid.vertex(1))
        assert directions == [Direction.R, Direction.L]
        assert np.allclose(block, [[0.0, 1.0], [1.0, 0.0]])

    def test_embedded_corner_diagonal(self):
        for d, q in ((4, 2), (6, 1), (7, 5)):
            grid = build_reduced_grid(PerturbationSpec(Scenario.EMBEDDED_FINAL, d, q))
            directions, block = coin_block(grid.vertex(grid.start))
            i = directions.index(Direction.R)
            assert block[i, i] == pytest.approx(2 * q / d - 1)

    @pytest.mark.parametrize("spec", all_specs(7), ids=str)
    def test_blocks_are_grouped_grover_coins(self, spec):
        # the block must equal V^T C_p V with V the isometry that groups the
        # p original directions into the grid directions
        grid = build_reduced_grid(spec)
        for v in grid.vertices:
            directions, block = coin_block(v)
            assert np.allclose(block, block.T)
            assert np.allclose(block @ block.T, np.eye(len(directions)), atol=1e-12)
            counts = [v.dir_counts[j] for j in directions]
            p = v.degree
            V = np.zeros((p, len(directions)))
            offset = 0
            for col, n in enumerate(counts):
                V[offset : offset + n, col] = 1.0 / np.sqrt(n)
                offset += n
            assert np.allclose(V.T @ grover_matrix(p) @ V, block, atol=1e-12)
            # Grover action on the weighted uniform vector: fixed point
            roots = np.sqrt(np.array(counts, dtype=float))
            assert np.allclose(block @ roots, roots, atol=1e-12)


class TestWalkOperator:
    @pytest.mark.parametrize(
        "spec",
        [
            PerturbationSpec(Scenario.BARE, 50),
            PerturbationSpec(Scenario.TAIL, 50, 17),
            PerturbationSpec(Scenario.EMBEDDED_FINAL, 50, 25),
            PerturbationSpec(Scenario.REMOVED_EDGE, 50, 30),
            PerturbationSpec(Scenario.TAIL, 7, 0),
        ],
        ids=str,
    )
    def test_unitarity(self, spec):
        op = build_walk_operator(build_reduced_grid(spec))
        rng = np.random.default_rng(3)
        v = rng.normal(size=op.basis_size) + 1j * rng.normal(size=op.basis_size)
        assert abs(np.linalg.norm(op.matrix @ v) - np.linalg.norm(v)) < 1e-12
        back = op.matrix.T @ (op.matrix @ v)
        assert np.abs(back - v).max() < 1e-12

    def test_final_slice_covers_final_vertex(self):
        grid = build_reduced_grid(PerturbationSpec(Scenario.EMBEDDED_FINAL, 5, 2))
        op = build_walk_operator(grid)
        fs, fe = op.final_slice
        assert all(op.basis[i].vertex == grid.final for i in range(fs, fe))
        assert {op.basis[i].vertex for i in range(op.basis_size)} >= {grid.final}

    def test_basis_enumeration_matches_grid(self):
        for spec in all_specs(6):
            grid = build_reduced_grid(spec)
            states, index, _ = enumerate_basis(grid)
            assert len(states) == grid.basis_size
            assert len(index) == grid.basis_size
            for state in states:
                assert grid.direction_count(state.vertex, state.direction) > 0


class TestInitialState:
    def test_bare_single_direction(self):
        grid = build_reduced_grid(PerturbationSpec(Scenario.BARE, 4))
        psi = initial_state(grid).amplitudes
        assert np.count_nonzero(psi) == 1
        assert psi[0] == pytest.approx(1.0)

    def test_embedded_split(self):
        grid = build_reduced_grid(PerturbationSpec(Scenario.EMBEDDED_FINAL, 4, 2))
        _, index, _ = enumerate_basis(grid)
        psi = initial_state(grid).amplitudes
        assert psi[index[(grid.start, Direction.R)]] == pytest.approx(np.sqrt(0.5))
        assert psi[index[(grid.start, Direction.U)]] == pytest.approx(np.sqrt(0.5))

    def test_tail_at_start_has_coin_dimension_d_plus_1(self):
        d = 5
        grid = build_reduced_grid(PerturbationSpec(Scenario.TAIL, d, 0))
        _, index, _ = enumerate_basis(grid)
        psi = initial_state(grid).amplitudes
        assert grid.vertex(grid.start).degree == d + 1
        assert psi[index[(grid.start, Direction.U)]] == pytest.approx(np.sqrt(d / (d + 1)))
        assert psi[index[(grid.start, Direction.TAIL_DOWN)]] == pytest.approx(
            np.sqrt(1 / (d + 1))
        )
        assert np.linalg.norm(psi) == pytest.approx(1.0)


class TestMeasuredWalk:
    def test_bare_d1_hits_in_one_step(self):
        grid = build_reduced_grid(PerturbationSpec(Scenario.BARE, 1))
        series = run_measured_walk(grid, stop_rule=EpsilonRule(1e-12))
        assert series.steps == 1
        assert series.p_tot == pytest.approx(1.0)
        assert expected_hitting_time(series).tau == pytest.approx(1.0)

    def test_matches_manual_stepping(self):
        # independent re-implementation of the step/measure/project loop
        grid = build_reduced_grid(PerturbationSpec(Scenario.TAIL, 5, 2))
        op = build_walk_operator(grid)
        fs, fe = op.final_slice
        psi = initial_state(grid).amplitudes.copy()
        manual = [0.0]
        absorbed = 0.0
        for _ in range(300):
            psi = op.matrix @ psi
            hit = float(np.sum(np.abs(psi[fs:fe]) ** 2))
            manual.append(hit)
            absorbed += hit
            psi[fs:fe] = 0
            # probability conservation at every step
            assert abs(np.linalg.norm(psi) ** 2 + absorbed - 1.0) < 1e-10
        series = run_measured_walk(grid, op, max_steps=300, stop_rule=None)
        assert np.abs(series.p - np.array(manual)).max() < 1e-14
        assert series.p_tot == pytest.approx(absorbed, abs=1e-12)

    def test_kernel_and_numpy_fallback_agree(self):
        grid = build_reduced_grid(PerturbationSpec(Scenario.REMOVED_EDGE, 5, 2))
        op = build_walk_operator(grid)
        m = op.matrix
        rng = np.random.default_rng(11)
        psi0 = rng.normal(size=op.basis_size) + 1j * rng.normal(size=op.basis_size)
        psi0 /= np.linalg.norm(psi0)
        fs, fe = op.final_slice
        outs = []
        for kernel in (_kernel.step_chunk, _kernel.step_chunk_numpy):
            psi = psi0.copy()
            scratch = np.empty_like(psi)
            p = np.empty(64)
            kernel(m.data, m.indices, m.indptr, psi, scratch, fs, fe, p)
            outs.append((psi.copy(), p.copy()))
        assert np.abs(outs[0][0] - outs[1][0]).max() < 1e-12
        assert np.abs(outs[0][1] - outs[1][1]).max() < 1e-14

    def test_epsilon_rule_stops_at_first_step(self):
        grid = build_reduced_grid(PerturbationSpec(Scenario.BARE, 6))
        series = run_measured_walk(grid, stop_rule=EpsilonRule(1e-3))
        # the rule must pick the first step where the target is reached
        cumulative = np.cumsum(series.p)
        assert cumulative[-1] >= 1 - 1e-3
        assert cumulative[-2] < 1 - 1e-3
        assert series.steps == len(series.p) - 1
        assert series.converged

    def test_max_steps_flags_non_converged(self):
        grid = build_reduced_grid(PerturbationSpec(Scenario.BARE, 8))
        series = run_measured_walk(grid, max_steps=5, stop_rule=EpsilonRule(1e-6))
        assert not series.converged
        assert series.steps == 5

    def test_dark_window_plateaus_below_one(self):
        grid = build_reduced_grid(PerturbationSpec(Scenario.EMBEDDED_FINAL, 6, 3))
        series = run_measured_walk(grid, stop_rule=DarkWindowRule(1e-7, 1e3))
        assert series.converged
        assert series.p_tot < 0.9
        summary = expected_hitting_time(series)
        assert summary.mode is ConvergenceMode.DARK_WINDOW
        assert summary.tau_c == pytest.approx(summary.tau / summary.p_tot)

    def test_record_limit_truncates_series_not_totals(self):
        grid = build_reduced_grid(PerturbationSpec(Scenario.BARE, 6))
        full = run_measured_walk(grid, max_steps=200, stop_rule=None)
        short = run_measured_walk(grid, max_steps=200, stop_rule=None, record_limit=50)
        assert short.truncated and not full.truncated
        assert short.recorded_steps == 50
        assert short.steps == 200
        assert short.p_tot == pytest.approx(full.p_tot, abs=1e-15)
        assert short.tau_num == pytest.approx(full.tau_num, abs=1e-12)
        assert np.allclose(short.p, full.p[:51])

    def test_tau_c_undefined_when_nothing_arrives(self):
        series = HitSeries(
            p=np.zeros(1), steps=0, p_tot=0.0, tau_num=0.0, converged=True, rule=None
        )
        summary = expected_hitting_time(series)
        assert summary.tau_c is None
        assert summary.mode is ConvergenceMode.FIXED_STEPS


class TestOracleEquivalence:
    @pytest.mark.parametrize(
        "spec",
        [
            PerturbationSpec(Scenario.BARE, 8),
            PerturbationSpec(Scenario.TAIL, 5, 2),
            PerturbationSpec(Scenario.TAIL, 5, 0),
            PerturbationSpec(Scenario.TAIL, 5, 5),
            PerturbationSpec(Scenario.EMBEDDED_FINAL, 5, 3),
            PerturbationSpec(Scenario.REMOVED_EDGE, 5, 2),
            PerturbationSpec(Scenario.REMOVED_EDGE, 5, 4),
        ],
        ids=str,
    )
    def test_reduced_matches_full_space(self, spec):
        steps = 400
        reduced = run_measured_walk(
            build_reduced_grid(spec), max_steps=steps, stop_rule=None
        )
        full = run_full_space_walk(spec, max_steps=steps)
        assert np.abs(reduced.p - full.p).max() < 1e-10

    def test_full_space_operator_unitary(self):
        graph = build_full_graph(PerturbationSpec(Scenario.TAIL, 5, 2))
        from hcwalk.fullspace import build_full_walk_operator

        op = build_full_walk_operator(graph)
        rng = np.random.default_rng(5)
        v = rng.normal(size=op.basis_size) + 1j * rng.normal(size=op.basis_size)
        assert abs(np.linalg.norm(op.matrix @ v) - np.linalg.norm(v)) < 1e-12


class TestDoubling:
    def test_moments_match_stepping_at_fixed_horizon(self):
        for spec, horizon in [
            (PerturbationSpec(Scenario.EMBEDDED_FINAL, 6, 3), 1000),
            (PerturbationSpec(Scenario.TAIL, 5, 1), 777),
            (PerturbationSpec(Scenario.BARE, 5), 64),
        ]:
            grid = build_reduced_grid(spec)
            op = build_walk_operator(grid)
            series = run_measured_walk(grid, op, max_steps=horizon, stop_rule=None)
            p_tot, tau_num = hitting_moments(op, horizon)
            assert p_tot == pytest.approx(series.p_tot, abs=1e-11)
            assert tau_num == pytest.approx(series.tau_num, rel=1e-10, abs=1e-9)

    def test_doubled_walk_agrees_with_stepping(self):
        grid = build_reduced_grid(PerturbationSpec(Scenario.EMBEDDED_FINAL, 6, 3))
        op = build_walk_operator(grid)
        rule = DarkWindowRule(1e-9, 2e3)
        stepped = run_measured_walk(grid, op, stop_rule=rule)
        doubled = run_doubled_walk(grid, op, stop_rule=rule)
        assert doubled.converged and stepped.converged
        assert doubled.p_tot == pytest.approx(stepped.p_tot, abs=1e-8)
        s1, s2 = expected_hitting_time(stepped), expected_hitting_time(doubled)
        assert s2.tau_c == pytest.approx(s1.tau_c, rel=1e-6)
