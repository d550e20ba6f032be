"""Shared time-marching driver for the evolution solvers.

Both solvers advance nodal values step by step with their own kernels; the
bookkeeping (snapshot rounding, per-step diagnostics, error decoration with
the failing time) is identical and lives here.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .core import (
    ProblemData,
    ScalarField,
    SolverError,
    SolverParams,
    StepDiagnostics,
    Trajectory,
    sample,
)

# kernel signature: (values, t_new) -> (new_values, iterations, mass_inc, overflow_inc)
StepKernel = Callable[[np.ndarray, float], tuple[np.ndarray, int, float, int]]


def nearest_step(t: float, dt: float) -> int:
    """Index of the time step closest to t; exact half-step ties go earlier."""
    q = t / dt
    k = math.floor(q + 0.5)
    if k > 0 and abs(q + 0.5 - k) < 1e-9 * max(1.0, abs(q)):
        k -= 1
    return k


def _snapshot_indices(snapshot_times: np.ndarray, dt: float, n_steps: int) -> list[int]:
    if np.any(np.diff(snapshot_times) < 0.0):
        raise ValueError("snapshot_times must be sorted")
    if snapshot_times.size and (snapshot_times[0] < -1e-12 or
                                snapshot_times[-1] > (n_steps + 0.5) * dt):
        raise ValueError("snapshot_times must lie within [0, t_end]")
    indices = [nearest_step(float(s), dt) for s in snapshot_times]
    if len(set(indices)) != len(indices):
        raise ValueError("two snapshot times round to the same step")
    if indices and indices[0] != 0 or not indices:
        indices = [0] + indices
    return indices


def march(data: ProblemData, params: SolverParams, snapshot_times,
          kernel: StepKernel) -> Trajectory:
    """Run a kernel from t = 0 to t_end, recording snapshots and diagnostics."""
    grid = data.grid
    data.u0.require_zero_trace()
    snapshot_times = np.asarray(snapshot_times, dtype=float)
    n_steps = int(math.floor(params.t_end / params.dt + 0.5))
    indices = _snapshot_indices(snapshot_times, params.dt, n_steps)
    wanted = set(indices)

    mid = grid.cell_midpoints()
    u = data.u0.values.copy()
    times = [0.0]
    snapshots = [ScalarField(grid, u.copy())]

    step_times = np.zeros(n_steps)
    violations = np.zeros(n_steps)
    iterations = np.zeros(n_steps, dtype=int)
    mass = np.zeros(n_steps)
    overflow = np.zeros(n_steps, dtype=int)

    total_mass = 0.0
    total_overflow = 0
    for k in range(1, n_steps + 1):
        t_new = k * params.dt
        try:
            u, iters, mass_inc, overflow_inc = kernel(u, t_new)
        except SolverError as exc:
            raise type(exc)(f"{exc} (while stepping to t = {t_new:.10g})") from exc
        total_mass += mass_inc
        total_overflow += overflow_inc
        g_mid = sample(data.g, mid, t_new)
        du = np.diff(u) / grid.h
        step_times[k - 1] = t_new
        violations[k - 1] = max(0.0, float(np.max(np.abs(du) - g_mid)))
        iterations[k - 1] = iters
        mass[k - 1] = total_mass
        overflow[k - 1] = total_overflow
        if k in wanted:
            times.append(t_new)
            snapshots.append(ScalarField(grid, u.copy()))

    diagnostics = StepDiagnostics(
        times=step_times, constraint_violation=violations,
        picard_iterations=iterations, penalty_mass=mass, overflow_events=overflow,
    )
    return Trajectory(times=np.asarray(times), snapshots=snapshots, diagnostics=diagnostics)
