"""Grids, nodal fields, problem data and the discrete operators shared by
every solver in the package.

The spatial discretization is a uniform 1D mesh with unknowns at the nodes.
Slope-type quantities (forward differences) live on cells, integral norms use
trapezoidal weights, so affine fields and constants are reproduced exactly.
Data functions b (velocity), c (reaction), f (source) and g (slope cap) are
callbacks of (x, t), sampled on demand; construction of a ``ProblemData``
spot-checks the structural assumptions on the grid because callbacks cannot
be verified symbolically.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Callable

import numpy as np
import scipy.linalg


class SolverError(RuntimeError):
    """Base class for failures inside a time-stepping run."""


class PicardDivergence(SolverError):
    """Lagged-diffusivity iteration blew up, or stalled with a growing residual."""


class LinearSolveFailure(SolverError):
    """Tridiagonal solve produced a singular or non-finite system."""


class NoSteadyState(SolverError):
    """Pseudo-time marching exhausted its horizon above the steady tolerance."""


class Region(IntEnum):
    """Contact label of a point against the band [-d, d]."""

    LOWER = -1
    OPEN = 0
    UPPER = 1


@dataclass(frozen=True)
class Grid1D:
    """Uniform mesh of the interval (x_left, x_right) with n_cells cells."""

    x_left: float
    x_right: float
    n_cells: int

    def __post_init__(self) -> None:
        if not self.x_right > self.x_left:
            raise ValueError("x_right must exceed x_left")
        if self.n_cells < 4:
            raise ValueError("grid needs at least 4 cells")

    @property
    def h(self) -> float:
        return (self.x_right - self.x_left) / self.n_cells

    @property
    def n_nodes(self) -> int:
        return self.n_cells + 1

    def nodes(self) -> np.ndarray:
        return np.linspace(self.x_left, self.x_right, self.n_cells + 1)

    def cell_midpoints(self) -> np.ndarray:
        x = self.nodes()
        return 0.5 * (x[:-1] + x[1:])

    def boundary_distance(self) -> np.ndarray:
        """Distance from each node to the nearer endpoint of the interval."""
        x = self.nodes()
        return np.minimum(x - self.x_left, self.x_right - x)


@dataclass
class ScalarField:
    """Nodal values of a function on a Grid1D at one time instant."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n_nodes,):
            raise ValueError(
                f"field has {self.values.shape} values, grid has {self.grid.n_nodes} nodes"
            )

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.values.copy())

    def has_zero_trace(self, tol: float = 0.0) -> bool:
        return abs(self.values[0]) <= tol and abs(self.values[-1]) <= tol

    def require_zero_trace(self) -> None:
        if not self.has_zero_trace():
            raise ValueError("field must vanish at both boundary nodes")


def sample(fn: Callable[[np.ndarray, float], object], x: np.ndarray, t: float) -> np.ndarray:
    """Evaluate a data callback at nodes x and time t, broadcasting scalars."""
    out = np.asarray(fn(x, t), dtype=float)
    if out.ndim == 0:
        return np.full(np.shape(x), float(out))
    if out.shape != np.shape(x):
        raise ValueError(f"callback returned shape {out.shape}, expected {np.shape(x)}")
    return out


def sample_field(grid: Grid1D, fn: Callable[[np.ndarray, float], object], t: float = 0.0) -> ScalarField:
    return ScalarField(grid, sample(fn, grid.nodes(), t))


def forward_diff(field: ScalarField) -> np.ndarray:
    """Per-cell forward difference quotient, entry i = (v[i+1] - v[i]) / h."""
    return np.diff(field.values) / field.grid.h


def max_gradient(field: ScalarField) -> float:
    """Largest cell-wise |forward difference|; the discrete slope magnitude."""
    return float(np.max(np.abs(forward_diff(field))))


def l2_norm(field: ScalarField) -> float:
    """Trapezoidal L2 norm: sqrt(h * sum_i w_i v_i^2), w = 1/2 at the ends."""
    v2 = field.values ** 2
    inner = v2.sum() - 0.5 * (v2[0] + v2[-1])
    return float(np.sqrt(field.grid.h * inner))


def linf_norm(field: ScalarField) -> float:
    return float(np.max(np.abs(field.values)))


@dataclass
class ProblemData:
    """The data tuple (b, c, f, g, u0) with its structural assumptions.

    b, c, f, g are callbacks of (nodes array, time); ``m`` is a strictly
    positive lower bound for the slope cap g and ``l`` a lower bound for
    c - b_x/2 (weak coercivity).  Construction samples the callbacks on the
    grid at ``N_TIME_SAMPLES`` instants in [0, check_horizon] and rejects:

    * m <= 0 or sampled g below m,
    * an initial state without zero trace or with cell slopes above the
      sampled cap at t = 0 (beyond a 1e-12 slack),
    * sampled c - b_x/2 below l (beyond rounding slack).
    """

    b: Callable[[np.ndarray, float], object]
    c: Callable[[np.ndarray, float], object]
    f: Callable[[np.ndarray, float], object]
    g: Callable[[np.ndarray, float], object]
    u0: ScalarField
    m: float
    l: float
    check_horizon: float = 2.0

    N_TIME_SAMPLES = 32
    FEASIBILITY_SLACK = 1e-12

    def __post_init__(self) -> None:
        if self.m <= 0.0:
            raise ValueError("slope cap lower bound m must be positive")
        if self.check_horizon <= 0.0:
            raise ValueError("check_horizon must be positive")
        self.u0.require_zero_trace()
        grid = self.grid
        x = grid.nodes()
        t_samples = np.linspace(0.0, self.check_horizon, self.N_TIME_SAMPLES)

        for t in t_samples:
            g_t = sample(self.g, x, t)
            if np.min(g_t) < self.m - self.FEASIBILITY_SLACK:
                raise ValueError(f"g drops below m = {self.m} at t = {t}")
            b_t = sample(self.b, x, t)
            c_t = sample(self.c, x, t)
            coercive = c_t - 0.5 * np.gradient(b_t, grid.h)
            if np.min(coercive) < self.l - 1e-9:
                raise ValueError(
                    f"c - b_x/2 = {np.min(coercive):.3e} falls below l = {self.l} at t = {t}"
                )

        du0 = np.abs(forward_diff(self.u0))
        g_cap = self._cell_cap_at(0.0)
        worst = np.max(du0 - g_cap)
        if worst > self.FEASIBILITY_SLACK:
            raise ValueError(f"initial slope exceeds the cap by {worst:.3e}")

    def _cell_cap_at(self, t: float) -> np.ndarray:
        # cell-wise upper envelope of g: max over both endpoints and the midpoint
        grid = self.grid
        x = grid.nodes()
        g_nodes = sample(self.g, x, t)
        g_mid = sample(self.g, grid.cell_midpoints(), t)
        return np.maximum(np.maximum(g_nodes[:-1], g_nodes[1:]), g_mid)

    @property
    def grid(self) -> Grid1D:
        return self.u0.grid


@dataclass(frozen=True)
class SolverParams:
    """Approximation-cascade knobs: penalty scale, diffusion scale, stepping."""

    epsilon: float
    delta: float
    dt: float
    t_end: float
    picard_tol: float = 1e-8
    picard_max: int = 100
    constraint_tol: float = 0.02

    def __post_init__(self) -> None:
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.t_end <= 0.0:
            raise ValueError("t_end must be positive")
        if self.picard_tol <= 0.0:
            raise ValueError("picard_tol must be positive")
        if self.picard_max < 1:
            raise ValueError("picard_max must be at least 1")

    def replace(self, **kwargs) -> "SolverParams":
        vals = dict(
            epsilon=self.epsilon, delta=self.delta, dt=self.dt, t_end=self.t_end,
            picard_tol=self.picard_tol, picard_max=self.picard_max,
            constraint_tol=self.constraint_tol,
        )
        vals.update(kwargs)
        return SolverParams(**vals)


@dataclass
class StepDiagnostics:
    """Per-step scalars: realized time, worst slope-cap violation, iteration
    count of the nonlinear solve, cumulative penalty mass and cumulative
    count of capped exponential evaluations."""

    times: np.ndarray
    constraint_violation: np.ndarray
    picard_iterations: np.ndarray
    penalty_mass: np.ndarray
    overflow_events: np.ndarray

    @staticmethod
    def empty() -> "StepDiagnostics":
        return StepDiagnostics(
            times=np.zeros(0), constraint_violation=np.zeros(0),
            picard_iterations=np.zeros(0, dtype=int), penalty_mass=np.zeros(0),
            overflow_events=np.zeros(0, dtype=int),
        )


@dataclass
class Trajectory:
    """Time-stamped snapshots of a run plus its per-step diagnostics."""

    times: np.ndarray
    snapshots: list[ScalarField]
    diagnostics: StepDiagnostics

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        if len(self.times) != len(self.snapshots):
            raise ValueError("times and snapshots must have equal length")
        if len(self.times) == 0 or self.times[0] != 0.0:
            raise ValueError("trajectories start at t = 0")
        if np.any(np.diff(self.times) <= 0.0):
            raise ValueError("snapshot times must be strictly increasing")

    @property
    def final(self) -> ScalarField:
        return self.snapshots[-1]


def solve_tridiagonal(diag: np.ndarray, lower: np.ndarray, upper: np.ndarray,
                      rhs: np.ndarray) -> np.ndarray:
    """Solve the tridiagonal system with the given diagonals.

    ``lower`` multiplies x[i-1] in row i (length n-1), ``upper`` multiplies
    x[i+1] (length n-1).  Raises LinearSolveFailure on a singular pivot.
    """
    n = diag.shape[0]
    ab = np.zeros((3, n))
    ab[0, 1:] = upper
    ab[1, :] = diag
    ab[2, :-1] = lower
    try:
        x = scipy.linalg.solve_banded((1, 1), ab, rhs, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise LinearSolveFailure(f"tridiagonal solve failed: {exc}") from exc
    if not np.all(np.isfinite(x)):
        raise LinearSolveFailure("tridiagonal solve returned non-finite values")
    return x
