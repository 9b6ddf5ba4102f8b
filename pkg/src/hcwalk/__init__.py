"""Classical and coined quantum walks on perturbed hypercubes.

The exponentially large walk space of a d-dimensional hypercube with a
constant number of perturbed vertices collapses onto a grid of polynomial
size; everything here (exact classical hitting times, measured quantum
walks, dark-state analysis, scaling sweeps) runs in that reduced space,
with explicit small-d full-space implementations kept around as oracles.
"""

from .classical import (
    ClassicalMethod,
    ClassicalResult,
    classical_bare,
    classical_embedded,
    classical_fundamental,
    classical_hitting_time,
    classical_tail,
    delta_sequence,
)
from .errors import CapacityError, SingularSystemError
from .fitting import FitModel, FitResult, fit_scaling
from .fullgraph import DEFAULT_ORACLE_BOUND, FullGraph, build_full_graph
from .fullspace import run_full_space_walk
from .grid import (
    DIRECTION_ORDER,
    OPPOSITE,
    TAIL,
    Direction,
    GridCoord,
    GridVertex,
    PerturbationSpec,
    ReducedGrid,
    Scenario,
    TailMarker,
    build_reduced_grid,
    classify_vertex,
    direction_count,
)
from .quantum import (
    BasisState,
    ConvergenceMode,
    DarkAnalysis,
    DarkWindowRule,
    EpsilonRule,
    HitSeries,
    WalkOperator,
    WalkState,
    WalkSummary,
    build_walk_operator,
    dark_basis,
    dark_overlap_eigen,
    expected_hitting_time,
    hitting_moments,
    initial_state,
    run_doubled_walk,
    run_measured_walk,
)
from .sweep import CSV_COLUMNS, Engine, RunMode, RunRequest, run_experiment, write_csv

__version__ = "0.1.0"

__all__ = [
    "BasisState",
    "CSV_COLUMNS",
    "CapacityError",
    "ClassicalMethod",
    "ClassicalResult",
    "ConvergenceMode",
    "DEFAULT_ORACLE_BOUND",
    "DIRECTION_ORDER",
    "DarkAnalysis",
    "DarkWindowRule",
    "Direction",
    "Engine",
    "EpsilonRule",
    "FitModel",
    "FitResult",
    "FullGraph",
    "GridCoord",
    "GridVertex",
    "HitSeries",
    "OPPOSITE",
    "PerturbationSpec",
    "ReducedGrid",
    "RunMode",
    "RunRequest",
    "Scenario",
    "SingularSystemError",
    "TAIL",
    "TailMarker",
    "WalkOperator",
    "WalkState",
    "WalkSummary",
    "build_full_graph",
    "build_reduced_grid",
    "build_walk_operator",
    "classical_bare",
    "classical_embedded",
    "classical_fundamental",
    "classical_hitting_time",
    "classical_tail",
    "classify_vertex",
    "dark_basis",
    "dark_overlap_eigen",
    "delta_sequence",
    "direction_count",
    "expected_hitting_time",
    "fit_scaling",
    "hitting_moments",
    "initial_state",
    "run_doubled_walk",
    "run_experiment",
    "run_full_space_walk",
    "run_measured_walk",
    "write_csv",
]
