"""Stationary profiles and the long-time behaviour of the evolution.

Two studies: first, with b = 0, c = 1, f = 2 and unit cap, the stationary
profile is the boundary distance (the source saturates the cap everywhere);
second, with a source decaying to a constant, the evolving solution
approaches the stationary one exponentially fast in L2.
"""

import numpy as np

from slopecap import (
    Grid1D,
    ProblemData,
    ScalarField,
    SolverParams,
    solve_stationary,
)
from slopecap.diagnostics import asymptotic_study

grid = Grid1D(0.0, 1.0, 100)
zero = ScalarField(grid, np.zeros(grid.n_nodes))
params = SolverParams(epsilon=1e-4, delta=1e-3, dt=2e-3, t_end=1.0)

saturated = ProblemData(
    b=lambda x, t: 0.0, c=lambda x, t: 1.0, f=lambda x, t: 2.0,
    g=lambda x, t: 1.0, u0=zero, m=1.0, l=1.0)
result = solve_stationary(saturated, params, steady_tol=1e-6)
err = np.max(np.abs(result.solution.values - grid.boundary_distance()))
print("saturated source (b=0, c=1, f=2, cap 1):")
print(f"  settled at pseudo-time {result.pseudo_time_used:.2f} "
      f"with residual {result.steady_residual:.2e}")
print(f"  max distance to the boundary-distance profile: {err:.2e}\n")

evolving = ProblemData(
    b=lambda x, t: 0.5, c=lambda x, t: 1.0, f=lambda x, t: 1.0 + np.exp(-t),
    g=lambda x, t: 1.0, u0=zero.copy(), m=1.0, l=1.0)
frozen = ProblemData(
    b=lambda x, t: 0.5, c=lambda x, t: 1.0, f=lambda x, t: 1.0,
    g=lambda x, t: 1.0, u0=zero.copy(), m=1.0, l=1.0)
u_inf = solve_stationary(frozen, params, steady_tol=1e-8).solution

long_params = SolverParams(epsilon=1e-4, delta=1e-3, dt=2e-3, t_end=20.0)
sample_times = [1.0, 2.0, 5.0, 10.0, 20.0]
distances = asymptotic_study(evolving, long_params, u_inf, sample_times)
print("decaying source (b=0.5, c=1, f=1+exp(-t)): L2 distance to stationary")
for t, dist in zip(sample_times, distances):
    print(f"  t = {t:4.1f}:  {dist:.3e}")
