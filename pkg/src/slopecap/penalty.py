"""Evolution solver enforcing the slope cap through an exponential penalty
on the diffusion flux.

Each time step advances the backward-Euler scheme

    (u^{n+1} - u^n)/dt - (delta/h) * (q_i - q_{i-1}) + b * Dup u^{n+1}
        + c * u^{n+1} = f,      q_i = k_eps(s_i^2 - g_i^2) * s_i,

with s_i the forward difference of cell i, Dup first-order upwinding by the
sign of b, and b, c, f, g sampled at the new time level.  The penalty factor
k_eps is 1 wherever the cell slope respects the cap and grows like
exp(s/eps) with the squared-slope excess, so the flux throttles steepening
beyond g while feasible regions feel only the small delta-scaled smoothing.

The nonlinear step system is monotone (the flux is strictly increasing in
the slope), and is solved by a damped Newton iteration with a backtracking
line search on the residual norm.  Its root is exactly the fixed point of
the lagged-diffusivity (frozen-coefficient) iteration; the lagged iteration
itself is not used to drive the solve because its local convergence factor
|1 - alpha (1 + 2 s^2 / eps)| forces relaxation weights of order eps, which
is unusable at the penalty scales of interest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _timeloop
from .core import (
    PicardDivergence,
    ProblemData,
    ScalarField,
    SolverParams,
    Trajectory,
    sample,
    solve_tridiagonal,
)

EXP_CAP = 700.0           # cap on the exponent; ~1e304 keeps flux values finite
DFLUX_CAP = 1.0e280       # cap on the flux derivative; protects the Jacobian
ITERATE_BLOWUP = 1.0e6    # max-norm ceiling before declaring divergence
ARMIJO_SLOPE = 1.0e-4
ALPHA_MIN = 1.0e-12


def k_eps(s: float, epsilon: float) -> float:
    """Penalty factor: 1 for s <= 0, exp(s/epsilon) beyond.

    Arguments above EXP_CAP are clamped so transient over-constraint states
    cannot overflow; the solver counts clamp events in its diagnostics.
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    if s <= 0.0:
        return 1.0
    return math.exp(min(s / epsilon, EXP_CAP))


def _kappa_cells(du: np.ndarray, g_mid: np.ndarray, epsilon: float) -> tuple[np.ndarray, int]:
    arg = (du * du - g_mid * g_mid) / epsilon
    overflow = int(np.count_nonzero(arg > EXP_CAP))
    kappa = np.where(arg <= 0.0, 1.0, np.exp(np.minimum(arg, EXP_CAP)))
    return kappa, overflow


def constraint_violation(field: ScalarField, g_at_t) -> float:
    """Worst cell-wise excess of |slope| over the cap sampled at midpoints."""
    du = np.abs(np.diff(field.values)) / field.grid.h
    return max(0.0, float(np.max(du - np.asarray(g_at_t, dtype=float))))


@dataclass
class PenaltyState:
    """Solver state after a step: field, time, and running diagnostics."""

    current: ScalarField
    t: float
    picard_iterations_last: int = 0
    penalty_mass_accumulated: float = 0.0
    overflow_events: int = 0

    def __post_init__(self) -> None:
        self.current.require_zero_trace()


class _StepSystem:
    """Residual and Jacobian of one implicit step on a fixed grid."""

    def __init__(self, data: ProblemData, params: SolverParams, t_new: float,
                 u_old: np.ndarray):
        grid = data.grid
        self.h = grid.h
        self.dt = params.dt
        self.delta = params.delta
        self.epsilon = params.epsilon
        x = grid.nodes()
        self.b = sample(data.b, x, t_new)[1:-1]
        self.c = sample(data.c, x, t_new)[1:-1]
        self.f = sample(data.f, x, t_new)[1:-1]
        self.g_mid = sample(data.g, grid.cell_midpoints(), t_new)
        self.g2 = self.g_mid * self.g_mid
        self.b_plus = np.maximum(self.b, 0.0)
        self.b_minus = np.maximum(-self.b, 0.0)
        self.u_old = u_old
        self.overflow_events = 0

    def flux(self, slopes: np.ndarray, count: bool = False) -> np.ndarray:
        arg = (slopes * slopes - self.g2) / self.epsilon
        if count:
            self.overflow_events += int(np.count_nonzero(arg > EXP_CAP))
        kappa = np.where(arg <= 0.0, 1.0, np.exp(np.minimum(arg, EXP_CAP)))
        return kappa * slopes

    def dflux(self, slopes: np.ndarray) -> np.ndarray:
        s2 = slopes * slopes
        arg = (s2 - self.g2) / self.epsilon
        kappa = np.where(arg <= 0.0, 1.0, np.exp(np.minimum(arg, EXP_CAP)))
        deriv = kappa * (1.0 + np.where(arg > 0.0, 2.0 * s2 / self.epsilon, 0.0))
        return np.minimum(deriv, DFLUX_CAP)

    def residual(self, u: np.ndarray, count: bool = False) -> np.ndarray:
        h = self.h
        q = self.flux(np.diff(u) / h, count=count)
        upwind = (self.b_plus * (u[1:-1] - u[:-2]) - self.b_minus * (u[2:] - u[1:-1])) / h
        return ((u[1:-1] - self.u_old[1:-1]) / self.dt
                - (self.delta / h) * (q[1:] - q[:-1])
                + upwind + self.c * u[1:-1] - self.f)

    def newton_matrix(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        h = self.h
        fp = self.dflux(np.diff(u) / h)
        scale = self.delta / (h * h)
        diag = 1.0 / self.dt + self.c + (self.b_plus + self.b_minus) / h \
            + scale * (fp[1:] + fp[:-1])
        upper = -scale * fp[1:-1] - self.b_minus[:-1] / h
        lower = -scale * fp[1:-1] - self.b_plus[1:] / h
        return diag, lower, upper


def _advance(values: np.ndarray, t_new: float, data: ProblemData,
             params: SolverParams) -> tuple[np.ndarray, int, float, int]:
    system = _StepSystem(data, params, t_new, values)
    u = values.copy()
    with np.errstate(over="ignore", invalid="ignore"):
        residual = system.residual(u, count=True)
        norm_start = float(np.linalg.norm(residual))
        norm_now = norm_start
        iterations = 0
        for _ in range(params.picard_max):
            diag, lower, upper = system.newton_matrix(u)
            update = solve_tridiagonal(diag, lower, upper, -residual)
            iterations += 1
            if float(np.max(np.abs(update))) <= params.picard_tol:
                u[1:-1] += update
                break
            alpha = 1.0
            while True:
                trial = u.copy()
                trial[1:-1] += alpha * update
                trial_residual = system.residual(trial)
                trial_norm = float(np.linalg.norm(trial_residual))
                if np.isfinite(trial_norm) and trial_norm <= (1.0 - ARMIJO_SLOPE * alpha) * norm_now:
                    break
                alpha *= 0.5
                if alpha < ALPHA_MIN:
                    raise PicardDivergence(
                        f"line search stalled at residual {norm_now:.3e}")
            u = trial
            residual = trial_residual
            norm_now = trial_norm
            if float(np.max(np.abs(u))) > ITERATE_BLOWUP:
                raise PicardDivergence(
                    f"iterate max-norm exceeded {ITERATE_BLOWUP:.0e}")
        else:
            if norm_now > norm_start:
                raise PicardDivergence(
                    f"no convergence in {params.picard_max} iterations and the "
                    f"residual grew from {norm_start:.3e} to {norm_now:.3e}")

    du = np.diff(u) / system.h
    kappa, overflow = _kappa_cells(du, system.g_mid, params.epsilon)
    system.overflow_events += overflow
    mass_inc = float(np.sum(kappa)) * system.h * params.dt
    return u, iterations, mass_inc, system.overflow_events


def step(state: PenaltyState, data: ProblemData, params: SolverParams) -> PenaltyState:
    """Advance one time step; see the module docstring for the scheme."""
    if state.t + params.dt > params.t_end + 0.5 * params.dt:
        raise ValueError("step would pass t_end")
    t_new = state.t + params.dt
    values, iterations, mass_inc, overflow = _advance(
        state.current.values, t_new, data, params)
    return PenaltyState(
        current=ScalarField(data.grid, values),
        t=t_new,
        picard_iterations_last=iterations,
        penalty_mass_accumulated=state.penalty_mass_accumulated + mass_inc,
        overflow_events=state.overflow_events + overflow,
    )


def solve(data: ProblemData, params: SolverParams, snapshot_times) -> Trajectory:
    """March from 0 to t_end, recording snapshots at the requested times
    (nearest step, exact ties toward the earlier one)."""
    def kernel(values: np.ndarray, t_new: float):
        return _advance(values, t_new, data, params)

    return _timeloop.march(data, params, snapshot_times, kernel)


def coupled_schedule(n_cells: int, t_end: float, domain_length: float = 1.0,
                     **overrides) -> SolverParams:
    """Refinement-ladder parameter coupling: eps = h^2, delta = h, dt = h/2.

    Shrinking h drives the penalty scale down faster than the diffusion
    scale, mirroring the order of the limits (penalty first).
    """
    h = domain_length / n_cells
    values = dict(epsilon=h * h, delta=h, dt=0.5 * h, t_end=t_end)
    values.update(overrides)
    return SolverParams(**values)
