"""Evolution solver for the two-obstacle formulation: the state is confined
to the band [-d, d] around zero, d being the boundary distance.

Applicable under the restriction that makes the band formulation equivalent
to the slope-capped one: constant velocity b, no reaction (c = 0), slope cap
g = 1, and a source depending on time only.  Each step splits into

  (i)  an implicit transport-diffusion solve
         (z* - z^n)/dt - delta * D-D+ z* + b * Dup z* = f(t^{n+1}),
  (ii) a pointwise implicit penalty solve
         z^{n+1} + (delta*dt/eps) * (z^{n+1} - clamp(z^{n+1}, [-d, d])) = z*,

step (ii) being piecewise linear in z^{n+1} and solved in closed form, so the
splitting is exact in the penalty and the linear system stays tridiagonal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _timeloop
from .core import (
    ProblemData,
    Region,
    ScalarField,
    SolverParams,
    Trajectory,
    sample,
    solve_tridiagonal,
)


def clamp_to_obstacles(v, d):
    """Projection onto the band [-d, d]; d must be nonnegative."""
    return np.minimum(np.maximum(v, -np.asarray(d)), d)


def penalty_residual(v, d):
    """Signed distance of v to the band [-d, d]: zero inside, monotone in v."""
    return v - clamp_to_obstacles(v, d)


@dataclass
class ObstacleState:
    """Solver state: field, time, sampled obstacle, running penalty mass."""

    current: ScalarField
    t: float
    obstacle: ScalarField
    penalty_mass_accumulated: float = 0.0

    def __post_init__(self) -> None:
        self.current.require_zero_trace()
        d = self.obstacle.values
        if np.any(d < 0.0):
            raise ValueError("obstacle must be nonnegative")
        if d[0] != 0.0 or d[-1] != 0.0:
            raise ValueError("obstacle must vanish at the boundary nodes")


def check_band_restriction(data: ProblemData, t_end: float) -> None:
    """Reject data outside the constant-transport restriction (b constant,
    c = 0, g = 1, f a function of time only)."""
    x = data.grid.nodes()
    for t in np.linspace(0.0, t_end, 5):
        b = sample(data.b, x, t)
        if not np.allclose(b, b[0], rtol=0.0, atol=1e-12):
            raise ValueError("band solver requires spatially constant b")
        if np.any(sample(data.c, x, t) != 0.0):
            raise ValueError("band solver requires c = 0")
        if not np.allclose(sample(data.g, x, t), 1.0, rtol=0.0, atol=1e-12):
            raise ValueError("band solver requires g = 1")
        f = sample(data.f, x, t)
        if not np.allclose(f, f[0], rtol=0.0, atol=1e-12):
            raise ValueError("band solver requires f = f(t)")
    b0 = float(sample(data.b, x[:1], 0.0)[0])
    for t in np.linspace(0.0, t_end, 5):
        if abs(float(sample(data.b, x[:1], t)[0]) - b0) > 1e-12:
            raise ValueError("band solver requires b constant in time")


def _band_project(z_star: np.ndarray, d: np.ndarray, lam: float) -> np.ndarray:
    # closed-form solve of z + lam*(z - clamp(z, [-d, d])) = z*, by band of z*
    above = z_star > d
    below = z_star < -d
    out = np.where(above, (z_star + lam * d) / (1.0 + lam),
                   np.where(below, (z_star - lam * d) / (1.0 + lam), z_star))
    # each branch must land in the band it assumed
    assert np.all(out[above] >= d[above] - 1e-12)
    assert np.all(out[below] <= -d[below] + 1e-12)
    return out


def _advance(values: np.ndarray, t_new: float, data: ProblemData,
             params: SolverParams, d: np.ndarray) -> tuple[np.ndarray, int, float, int]:
    grid = data.grid
    h = grid.h
    x = grid.nodes()

    b = float(sample(data.b, x[:1], t_new)[0])
    f = float(sample(data.f, x[:1], t_new)[0])
    scale = params.delta / (h * h)
    n_int = grid.n_nodes - 2

    diag = np.full(n_int, 1.0 / params.dt + 2.0 * scale + abs(b) / h)
    upper = np.full(n_int - 1, -scale - max(-b, 0.0) / h)
    lower = np.full(n_int - 1, -scale - max(b, 0.0) / h)
    rhs = f + values[1:-1] / params.dt
    z_star = np.zeros_like(values)
    z_star[1:-1] = solve_tridiagonal(diag, lower, upper, rhs)

    lam = params.delta * params.dt / params.epsilon
    z_new = _band_project(z_star, d, lam)
    residual_l1 = float(np.sum(np.abs(penalty_residual(z_new, d))))
    mass_inc = (params.delta / params.epsilon) * residual_l1 * h * params.dt
    return z_new, 1, mass_inc, 0


def step(state: ObstacleState, data: ProblemData, params: SolverParams) -> ObstacleState:
    """One split step (transport-diffusion solve, then band projection)."""
    if state.t + params.dt > params.t_end + 0.5 * params.dt:
        raise ValueError("step would pass t_end")
    check_band_restriction(data, params.t_end)
    t_new = state.t + params.dt
    values, _, mass_inc, _ = _advance(
        state.current.values, t_new, data, params, state.obstacle.values)
    return ObstacleState(
        current=ScalarField(data.grid, values),
        t=t_new,
        obstacle=state.obstacle,
        penalty_mass_accumulated=state.penalty_mass_accumulated + mass_inc,
    )


def solve(data: ProblemData, params: SolverParams, snapshot_times) -> Trajectory:
    """March the split scheme from 0 to t_end; snapshot handling matches the
    slope-penalty solver."""
    check_band_restriction(data, params.t_end)
    d = data.grid.boundary_distance()

    def kernel(values: np.ndarray, t_new: float):
        return _advance(values, t_new, data, params, d)

    return _timeloop.march(data, params, snapshot_times, kernel)


def coincidence_partition(field: ScalarField, obstacle: ScalarField,
                          tol: float) -> np.ndarray:
    """Label each interior node by its contact with the band [-d, d].

    UPPER where v >= d - tol (taking precedence where the band is thinner
    than tol), LOWER where v <= -d + tol, OPEN otherwise.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    v = field.values[1:-1]
    d = obstacle.values[1:-1]
    return np.where(v >= d - tol, int(Region.UPPER),
                    np.where(v <= -d + tol, int(Region.LOWER), int(Region.OPEN)))
