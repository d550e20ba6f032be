"""Finite-difference solvers for 1D linear transport under a pointwise
slope cap, with a two-obstacle companion solver, a stationary solver, an
exact transported-sandpile reference solution, and study drivers."""

from .core import (
    Grid1D,
    LinearSolveFailure,
    NoSteadyState,
    PicardDivergence,
    ProblemData,
    Region,
    ScalarField,
    SolverError,
    SolverParams,
    StepDiagnostics,
    Trajectory,
    forward_diff,
    l2_norm,
    linf_norm,
    max_gradient,
    sample,
    sample_field,
)
from .sandpile import SandpileOracle, distance_field, initial_field, sandpile_problem
from .stationary import StationaryResult, solve_stationary
from .diagnostics import (
    FreeBoundaryTrace,
    SnapshotErrors,
    StabilizationReport,
    asymptotic_study,
    detect_stabilization,
    error_vs_oracle,
    extract_free_boundaries,
    rescale_into_constraint,
    stability_study,
    trace_free_boundaries,
)
from . import obstacle, penalty

__all__ = [
    "Grid1D", "ScalarField", "ProblemData", "SolverParams", "Trajectory",
    "StepDiagnostics", "Region", "SolverError", "PicardDivergence",
    "LinearSolveFailure", "NoSteadyState",
    "forward_diff", "max_gradient", "l2_norm", "linf_norm", "sample",
    "sample_field",
    "SandpileOracle", "sandpile_problem", "initial_field", "distance_field",
    "StationaryResult", "solve_stationary",
    "SnapshotErrors", "FreeBoundaryTrace", "StabilizationReport",
    "error_vs_oracle", "extract_free_boundaries", "trace_free_boundaries",
    "detect_stabilization", "rescale_into_constraint", "stability_study",
    "asymptotic_study",
    "penalty", "obstacle",
]
