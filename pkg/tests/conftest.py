"""Shared helpers: scenario enumeration and the classical Monte Carlo oracle."""

from __future__ import annotations

import numpy as np

from hcwalk import FullGraph, PerturbationSpec, Scenario


def all_specs(max_d: int, scenarios=tuple(Scenario)) -> list[PerturbationSpec]:
    """Every valid (scenario, d, q) combination up to max_d."""
    specs = []
    for d in range(1, max_d + 1):
        for scenario in scenarios:
            if scenario is Scenario.BARE:
                specs.append(PerturbationSpec(scenario, d))
            elif scenario is Scenario.TAIL:
                specs.extend(PerturbationSpec(scenario, d, q) for q in range(0, d + 1))
            elif scenario is Scenario.EMBEDDED_FINAL:
                specs.extend(PerturbationSpec(scenario, d, q) for q in range(1, d + 1))
            elif d >= 2:
                specs.extend(PerturbationSpec(scenario, d, q) for q in range(0, d))
    return specs


def monte_carlo_hitting_time(
    graph: FullGraph, walkers: int = 20000, seed: int = 7, max_rounds: int = 2_000_000
) -> tuple[float, float]:
    """Empirical mean first-hit time and its standard error on the full graph.

    Vectorized batch of independent walkers; independent of both the closed
    forms and the grid solve, so it cross-checks either.
    """
    rng = np.random.default_rng(seed)
    degrees = np.array([graph.degree(v) for v in range(graph.n_vertices)])
    width = degrees.max()
    padded = np.zeros((graph.n_vertices, width), dtype=np.int64)
    for v, nbrs in enumerate(graph.adjacency):
        padded[v, : len(nbrs)] = nbrs

    position = np.full(walkers, graph.start, dtype=np.int64)
    steps = np.zeros(walkers, dtype=np.int64)
    active = np.arange(walkers)
    for _ in range(max_rounds):
        if len(active) == 0:
            break
        pos = position[active]
        choice = (rng.random(len(active)) * degrees[pos]).astype(np.int64)
        position[active] = padded[pos, choice]
        steps[active] += 1
        active = active[position[active] != graph.final]
    else:
        raise RuntimeError("Monte Carlo walkers failed to absorb")

    mean = float(steps.mean())
    sem = float(steps.std(ddof=1) / np.sqrt(walkers))
    return mean, sem
