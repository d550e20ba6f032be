"""Error measurement against a reference profile, contact-edge extraction,
stabilization detection, the feasibility rescaling map, and the study
drivers for data perturbation and long-time behaviour."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import obstacle, penalty
from .core import (
    ProblemData,
    Region,
    ScalarField,
    SolverParams,
    Trajectory,
    l2_norm,
    max_gradient,
    sample,
)


@dataclass
class SnapshotErrors:
    """Per-snapshot max-norm and L2 distances to a reference evaluator."""

    times: np.ndarray
    linf: np.ndarray
    l2: np.ndarray


def error_vs_oracle(traj: Trajectory,
                    oracle_eval: Callable[[np.ndarray, float], np.ndarray]) -> SnapshotErrors:
    grid = traj.snapshots[0].grid
    x = grid.nodes()
    linf = np.zeros(len(traj.times))
    l2 = np.zeros(len(traj.times))
    for i, (t, snap) in enumerate(zip(traj.times, traj.snapshots)):
        diff = snap.values - np.asarray(oracle_eval(x, float(t)), dtype=float)
        linf[i] = float(np.max(np.abs(diff)))
        l2[i] = l2_norm(ScalarField(grid, diff))
    return SnapshotErrors(times=traj.times.copy(), linf=linf, l2=l2)


def extract_free_boundaries(field: ScalarField, obstacle_field: ScalarField,
                            tol: float) -> tuple[float | None, float | None]:
    """Locate the contact edges from the interior node labels.

    zeta: rightmost interface where the labels switch UPPER -> OPEN in a
    left-to-right scan, present only when the scan starts on UPPER.
    xi: leftmost interface where the open region ends on UPPER or LOWER.
    Interface positions are midpoints of the bracketing nodes; a missing
    edge is returned as None, never an error.
    """
    labels = obstacle.coincidence_partition(field, obstacle_field, tol)
    x = field.grid.nodes()[1:-1]

    zeta = None
    if labels[0] == Region.UPPER:
        switches = np.nonzero((labels[:-1] == Region.UPPER) & (labels[1:] == Region.OPEN))[0]
        if switches.size:
            j = switches[-1]
            zeta = 0.5 * (x[j] + x[j + 1])

    xi = None
    open_nodes = np.nonzero(labels == Region.OPEN)[0]
    if open_nodes.size:
        start = open_nodes[0]
        closing = np.nonzero((labels[start:-1] == Region.OPEN) & (labels[start + 1:] != Region.OPEN))[0]
        if closing.size:
            j = start + closing[0]
            xi = 0.5 * (x[j] + x[j + 1])
    return xi, zeta


@dataclass
class FreeBoundaryTrace:
    """Contact-edge positions over time; NaN marks an absent edge."""

    times: np.ndarray
    xi_numeric: np.ndarray
    zeta_numeric: np.ndarray


def trace_free_boundaries(traj: Trajectory, obstacle_field: ScalarField,
                          tol: float) -> FreeBoundaryTrace:
    xi = np.full(len(traj.times), np.nan)
    zeta = np.full(len(traj.times), np.nan)
    for i, snap in enumerate(traj.snapshots):
        xi_i, zeta_i = extract_free_boundaries(snap, obstacle_field, tol)
        if xi_i is not None:
            xi[i] = xi_i
        if zeta_i is not None:
            zeta[i] = zeta_i
    return FreeBoundaryTrace(times=traj.times.copy(), xi_numeric=xi, zeta_numeric=zeta)


@dataclass
class StabilizationReport:
    t_star_numeric: float
    target_error_at_end: float
    monotone_violation_max: float


def detect_stabilization(traj: Trajectory, target: ScalarField,
                         tol: float) -> StabilizationReport:
    """Earliest snapshot time after which the max-norm distance to the
    target stays within tol through the end (inf if it never does)."""
    if len(traj.snapshots) < 2:
        raise ValueError("need at least two snapshots")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    dist = np.array([float(np.max(np.abs(s.values - target.values)))
                     for s in traj.snapshots])
    undershoot = 0.0
    for earlier, later in zip(traj.snapshots[:-1], traj.snapshots[1:]):
        undershoot = max(undershoot, float(np.max(earlier.values - later.values)))

    t_star = math.inf
    within = dist <= tol
    for i in range(len(within) - 1, -1, -1):
        if not within[i]:
            break
        t_star = float(traj.times[i])
    return StabilizationReport(
        t_star_numeric=t_star,
        target_error_at_end=float(dist[-1]),
        monotone_violation_max=undershoot,
    )


def rescale_into_constraint(v: ScalarField, g1_max_diff: float, m: float) -> ScalarField:
    """Shrink v by 1/(1 + alpha/m), alpha the sup distance between two caps.

    A field with slopes under a cap g1 >= m lands under any cap g2 >= m with
    sup |g1 - g2| <= alpha, since g1/(1 + alpha/m) = m g1/(m + alpha) <= g2.
    """
    if m <= 0.0:
        raise ValueError("m must be positive")
    if g1_max_diff < 0.0:
        raise ValueError("g1_max_diff must be nonnegative")
    factor = 1.0 / (1.0 + g1_max_diff / m)
    return ScalarField(v.grid, v.values * factor)


def data_distance(base: ProblemData, other: ProblemData, t_end: float,
                  n_time_samples: int = 65) -> float:
    """Perturbation size: squared L2 distance of the initial states plus
    space-time L1 distances of b, c, f plus the sup distance of g, all
    measured by trapezoidal sampling on the grid."""
    grid = base.grid
    x = grid.nodes()
    h = grid.h
    ts = np.linspace(0.0, t_end, n_time_samples)
    wt = np.full(n_time_samples, t_end / (n_time_samples - 1))
    wt[0] *= 0.5
    wt[-1] *= 0.5
    wx = np.full(grid.n_nodes, h)
    wx[0] *= 0.5
    wx[-1] *= 0.5

    du0 = base.u0.values - other.u0.values
    total = float(np.sum(wx * du0 * du0))
    g_sup = 0.0
    for t, w in zip(ts, wt):
        for fn_base, fn_other in ((base.b, other.b), (base.c, other.c), (base.f, other.f)):
            diff = np.abs(sample(fn_base, x, t) - sample(fn_other, x, t))
            total += w * float(np.sum(wx * diff))
        g_sup = max(g_sup, float(np.max(np.abs(sample(base.g, x, t) - sample(other.g, x, t)))))
    return total + g_sup


def stability_study(base: ProblemData, perturbed: ProblemData,
                    params: SolverParams,
                    n_snapshots: int = 33) -> tuple[float, float]:
    """Run both problems and return (sup-over-snapshots squared L2 gap,
    perturbation size)."""
    if base.grid != perturbed.grid:
        raise ValueError("both problems must share the grid")
    times = np.linspace(0.0, params.t_end, n_snapshots)
    run_base = penalty.solve(base, params, times)
    run_pert = penalty.solve(perturbed, params, times)
    grid = base.grid
    sup_sq = 0.0
    for snap_b, snap_p in zip(run_base.snapshots, run_pert.snapshots):
        gap = l2_norm(ScalarField(grid, snap_b.values - snap_p.values))
        sup_sq = max(sup_sq, gap * gap)
    return sup_sq, data_distance(base, perturbed, params.t_end)


def asymptotic_study(data: ProblemData, params: SolverParams,
                     u_inf: ScalarField, sample_times) -> np.ndarray:
    """L2 distances of the evolving profile to a stationary one at the
    requested times."""
    sample_times = np.asarray(sample_times, dtype=float)
    traj = penalty.solve(data, params, sample_times)
    grid = data.grid
    want = [_nearest(traj.times, t) for t in sample_times]
    return np.array([
        l2_norm(ScalarField(grid, traj.snapshots[i].values - u_inf.values))
        for i in want
    ])


def _nearest(times: np.ndarray, t: float) -> int:
    return int(np.argmin(np.abs(times - t)))
