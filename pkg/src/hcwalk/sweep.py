"""Parameter sweeps over (d, q) cells with deterministic CSV output.

Each cell runs one walk (classical or quantum) and becomes one CSV row; a
``both`` request expands every (d, q) cell into a classical row and a
quantum row.  Cells are independent, so sweeps optionally fan out over a
process pool; rows are ordered by (d, q, mode) regardless of completion
order, and identical requests always produce identical files.
"""

from __future__ import annotations

import csv
import enum
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import IO, Iterable

from .classical import classical_hitting_time
from .fullspace import run_full_space_walk
from .grid import PerturbationSpec, Scenario, build_reduced_grid
from .quantum import (
    DEFAULT_MAX_STEPS,
    DarkWindowRule,
    EpsilonRule,
    build_walk_operator,
    expected_hitting_time,
    run_doubled_walk,
    run_measured_walk,
)

log = logging.getLogger(__name__)

CSV_COLUMNS = [
    "scenario",
    "d",
    "q",
    "mode",
    "tau",
    "tau_c",
    "p_tot",
    "steps",
    "stop_rule",
    "threshold",
    "t_window",
    "converged",
]

#: Dark-window runs whose stepping cost (window [steps] x basis size) passes
#: this bound are evaluated by horizon doubling under ``engine="auto"``.
AUTO_DOUBLING_COST = 5e11


class RunMode(enum.Enum):
    CLASSICAL = "classical"
    QUANTUM = "quantum"
    BOTH = "both"


class Engine(enum.Enum):
    AUTO = "auto"
    STEPS = "steps"
    DOUBLING = "doubling"


@dataclass(frozen=True)
class RunRequest:
    """One sweep: scenario, (d, q) ranges, walk mode, and stopping thresholds.

    ``q_values=None`` means every q valid for the scenario at each d; given
    q values that are invalid for some d are skipped (and logged), not
    errors.  ``delta`` switches the quantum stop rule from the epsilon rule
    to the dark-window rule with window parameter ``t_window`` (default
    ``1/delta``).
    """

    scenario: Scenario
    d_values: tuple[int, ...]
    q_values: tuple[int, ...] | None = None
    mode: RunMode = RunMode.BOTH
    epsilon: float = 1e-4
    delta: float | None = None
    t_window: float | None = None
    max_steps: int = DEFAULT_MAX_STEPS
    oracle: bool = False
    engine: Engine = Engine.AUTO
    jobs: int = 1

    def __post_init__(self) -> None:
        if not self.d_values:
            raise ValueError("sweep needs at least one d value")
        if self.q_values is not None and not self.q_values:
            raise ValueError("empty q sweep; omit q to use all valid values")
        if self.jobs < 1:
            raise ValueError(f"jobs must be >= 1, got {self.jobs}")


@dataclass(frozen=True)
class _Cell:
    request: RunRequest
    d: int
    q: int | None
    mode: RunMode  # CLASSICAL or QUANTUM


def _valid_q_range(scenario: Scenario, d: int) -> range:
    if scenario is Scenario.TAIL:
        return range(0, d + 1)
    if scenario is Scenario.EMBEDDED_FINAL:
        return range(1, d + 1)
    if scenario is Scenario.REMOVED_EDGE:
        return range(0, d)
    return range(d, d + 1)  # bare: the implicit q = d


def expand_cells(request: RunRequest) -> list[_Cell]:
    """Validated (d, q, mode) cells in output order."""
    modes = (
        [RunMode.CLASSICAL, RunMode.QUANTUM]
        if request.mode is RunMode.BOTH
        else [request.mode]
    )
    cells = []
    for d in request.d_values:
        valid = _valid_q_range(request.scenario, d)
        if request.scenario is Scenario.BARE:
            qs: list[int | None] = [None]
        elif request.q_values is None:
            qs = list(valid)
        else:
            qs = []
            for q in request.q_values:
                if q in valid:
                    qs.append(q)
                else:
                    log.warning(
                        "skipping q=%d: outside the valid range %s for %s at d=%d",
                        q,
                        [valid.start, valid.stop - 1],
                        request.scenario.value,
                        d,
                    )
        for q in qs:
            for mode in modes:
                cells.append(_Cell(request, d, q, mode))
    return cells


def run_cell(cell: _Cell) -> dict:
    """Run one cell and format its CSV row."""
    request = cell.request
    spec = PerturbationSpec(request.scenario, cell.d, cell.q)
    row = {
        "scenario": request.scenario.value,
        "d": cell.d,
        "q": "" if cell.q is None else cell.q,
        "mode": cell.mode.value,
    }
    if cell.mode is RunMode.CLASSICAL:
        result = classical_hitting_time(spec)
        tau = float(result.tau)
        row.update(
            tau=_fmt(tau),
            tau_c=_fmt(tau),
            p_tot=_fmt(1.0),
            steps="",
            stop_rule=result.method.value,
            threshold="",
            t_window="",
            converged=True,
        )
        return row

    if request.delta is not None:
        rule = DarkWindowRule(request.delta, request.t_window)
    else:
        rule = EpsilonRule(request.epsilon)

    if request.oracle:
        series = run_full_space_walk(spec, max_steps=request.max_steps, stop_rule=rule)
    else:
        grid = build_reduced_grid(spec)
        operator = build_walk_operator(grid)
        if _use_doubling(request, rule, operator.basis_size, cell.d):
            series = run_doubled_walk(
                grid, operator, max_steps=request.max_steps, stop_rule=rule
            )
        else:
            series = run_measured_walk(
                grid, operator, max_steps=request.max_steps, stop_rule=rule
            )
    summary = expected_hitting_time(series)
    row.update(
        tau=_fmt(summary.tau),
        tau_c="" if summary.tau_c is None else _fmt(summary.tau_c),
        p_tot=_fmt(summary.p_tot),
        steps=summary.steps,
        stop_rule=summary.mode.value,
        threshold=_fmt(summary.threshold),
        t_window="" if summary.t_window is None else _fmt(summary.t_window),
        converged=summary.converged,
    )
    return row


def _use_doubling(request: RunRequest, rule, basis_size: int, d: int) -> bool:
    if not isinstance(rule, DarkWindowRule):
        return False
    if request.engine is Engine.DOUBLING:
        return True
    if request.engine is Engine.STEPS:
        return False
    return rule.window_steps(d) * basis_size > AUTO_DOUBLING_COST


def run_experiment(request: RunRequest) -> list[dict]:
    """Run every cell of the sweep and return ordered CSV rows.

    Cells run in parallel up to ``request.jobs``; ordering and content are
    independent of the parallelism.  Non-converged cells are emitted with
    ``converged=False``, never dropped.
    """
    cells = expand_cells(request)
    if request.jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=request.jobs) as pool:
            rows = list(pool.map(run_cell, cells))
    else:
        rows = [run_cell(cell) for cell in cells]
    return rows


def write_csv(rows: Iterable[dict], stream: IO[str]) -> None:
    writer = csv.DictWriter(stream, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)


def all_converged(rows: Iterable[dict]) -> bool:
    return all(row["converged"] in (True, "True") for row in rows)


def _fmt(value: float | None) -> str:
    # 17 significant digits: lossless round trip for doubles
    return "" if value is None else format(float(value), ".17g")
