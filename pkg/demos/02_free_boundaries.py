"""Track the two moving contact points of the growing pile.

The first contact point xi(t) separates the open region (where the PDE
holds with equality) from the contact region; it moves right, touches the
wall at t = 1/2, then returns to the midpoint.  A second contact edge
zeta(t) = 2(t - 1) grows from the left wall after t = 1.  Both are located
from the numeric solution purely by classifying nodes against the band
[-d, d] and compared against the closed forms.
"""

import numpy as np

from slopecap import (
    Grid1D,
    SandpileOracle,
    SolverParams,
    penalty,
    sandpile_problem,
    trace_free_boundaries,
)
from slopecap.sandpile import distance_field

grid = Grid1D(0.0, 1.0, 400)
data = sandpile_problem(grid)
params = SolverParams(epsilon=1e-4, delta=1e-3, dt=5e-4, t_end=1.25)

times = np.round(np.linspace(0.0, 1.25, 26), 10)
trajectory = penalty.solve(data, params, times)
trace = trace_free_boundaries(trajectory, distance_field(grid), tol=1e-3)

oracle = SandpileOracle()
print("time    xi numeric   xi exact    zeta numeric  zeta exact")
for t, xi_n, zeta_n in zip(trace.times, trace.xi_numeric, trace.zeta_numeric):
    t = float(t)
    xi_e = oracle.xi(t)
    zeta_e = oracle.zeta(t) if t >= 1.0 else np.nan
    print(f"{t:5.3f}   {xi_n:10.4f}   {xi_e:8.4f}    {zeta_n:12.4f}  {zeta_e:10.4f}")

defined = ~np.isnan(trace.xi_numeric)
xi_errors = [abs(xi - oracle.xi(float(t)))
             for t, xi in zip(trace.times[defined], trace.xi_numeric[defined])]
print(f"\nworst xi error where detected: {max(xi_errors):.4f} (3h = {3 * grid.h:.4f})")
