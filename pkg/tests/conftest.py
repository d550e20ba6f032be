import numpy as np
import pytest

from slopecap import Grid1D, SolverParams, penalty, sandpile_problem


@pytest.fixture(scope="session")
def sandpile_grid():
    return Grid1D(0.0, 1.0, 400)


@pytest.fixture(scope="session")
def sandpile_params():
    # the reference-resolution parameter set used by the acceptance runs
    return SolverParams(epsilon=1e-4, delta=1e-3, dt=5e-4, t_end=2.0)


@pytest.fixture(scope="session")
def sandpile_snapshot_times():
    times = set(np.round(np.linspace(0.0, 2.0, 41), 10))
    times.update([0.25, 0.5, 1.125])
    return sorted(times)


@pytest.fixture(scope="session")
def sandpile_run(sandpile_grid, sandpile_params, sandpile_snapshot_times):
    """Reference-resolution run shared by the acceptance criteria; returns
    (trajectory, wall seconds)."""
    import time

    data = sandpile_problem(sandpile_grid)
    t0 = time.perf_counter()
    traj = penalty.solve(data, sandpile_params, sandpile_snapshot_times)
    wall = time.perf_counter() - t0
    return traj, wall


def _coupled_pair(n_cells):
    from slopecap import obstacle

    grid = Grid1D(0.0, 1.0, n_cells)
    data = sandpile_problem(grid)
    params = penalty.coupled_schedule(n_cells, t_end=1.25)
    snaps = [0.0, 0.75, 1.125, 1.25]
    return penalty.solve(data, params, snaps), obstacle.solve(data, params, snaps)


@pytest.fixture(scope="session")
def coupled_runs_n400():
    return _coupled_pair(400)


@pytest.fixture(scope="session")
def coupled_runs_n800():
    return _coupled_pair(800)
