"""Stationary solver: pseudo-time marching of the evolution kernel until the
update rate drops below a steady tolerance.

For time-constant data with strict coercivity (c - b_x/2 >= lambda > 0 with
the caller-supplied lambda recorded as ``ProblemData.l``), the evolution
contracts toward the unique stationary profile, so marching the validated
evolution kernel doubles as a stationary solver and avoids a second penalty
implementation.  Data with l <= 0 are accepted (some stabilize in finite
time regardless); if the march exhausts its horizon first, NoSteadyState is
raised.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import penalty
from .core import NoSteadyState, ProblemData, ScalarField, SolverParams, sample


@dataclass
class StationaryResult:
    solution: ScalarField
    pseudo_time_used: float
    steady_residual: float


def _require_time_constant(data: ProblemData) -> None:
    x = data.grid.nodes()
    probes = (0.0, 0.7, 1.9)
    for fn, name in ((data.b, "b"), (data.c, "c"), (data.f, "f"), (data.g, "g")):
        base = sample(fn, x, probes[0])
        for t in probes[1:]:
            if not np.allclose(sample(fn, x, t), base, rtol=0.0, atol=1e-12):
                raise ValueError(f"stationary data requires time-constant {name}")


def solve_stationary(data: ProblemData, params: SolverParams,
                     steady_tol: float = 1e-6,
                     t_max: float | None = None) -> StationaryResult:
    """March from u0 until max-norm update per unit time falls to steady_tol.

    t_max defaults to 50 / l for coercive data (l > 0), else 50.
    """
    if steady_tol <= 0.0:
        raise ValueError("steady_tol must be positive")
    _require_time_constant(data)
    if t_max is None:
        t_max = 50.0 / data.l if data.l > 0.0 else 50.0

    run_params = params.replace(t_end=t_max)
    state = penalty.PenaltyState(current=data.u0.copy(), t=0.0)
    n_steps = int(np.floor(t_max / params.dt + 0.5))
    residual = np.inf
    for _ in range(n_steps):
        new_state = penalty.step(state, data, run_params)
        residual = float(np.max(np.abs(new_state.current.values - state.current.values))) / params.dt
        state = new_state
        if residual <= steady_tol:
            return StationaryResult(
                solution=state.current, pseudo_time_used=state.t,
                steady_residual=residual,
            )
    raise NoSteadyState(
        f"residual {residual:.3e} still above {steady_tol:.3e} at t = {state.t:.6g}; "
        "the data may not be coercive or the stepping too coarse"
    )
