"""Closed-form transported-sandpile solution on the unit interval.

The model problem is unit-speed transport with source f(t) = t on (0, 1),
slope capped at 1, started from the profile z0 that is the parabola -x^2/2
up to xi0 = sqrt(3) - 1 and the line x - 1 beyond it.  The solution grows
monotonically, carries two moving contact points, and freezes at the
boundary-distance profile d(x) = 1/2 - |x - 1/2| at time 5/4:

    z(x, t) = (-d(x)) v ((t x - x^2/2) ^ d(x)),

with contact points

    xi(t)   = t - 1 + sqrt((1-t)^2 + 2)   for 0 <= t <= 1/2,
    xi(t)   = t + 1 - sqrt((t+1)^2 - 2)   for 1/2 <  t <= 5/4,
    zeta(t) = 2 (t - 1)                   for 1 <=  t <= 5/4.

For t <= 1/2 the region right of xi sits on the lower bound x - 1; from
t = 1/2 on, xi returns from the right wall and the region right of it sits
on the upper bound 1 - x; zeta is the edge of the upper contact region that
grows from the left wall after t = 1.  Everything here is exact and serves
as ground truth for the discrete solvers.
"""

from __future__ import annotations

import math

import numpy as np

from .core import Grid1D, ProblemData, Region, ScalarField

XI_ZERO = math.sqrt(3.0) - 1.0
T_FREEZE = 1.25


def _check_range(name: str, value: float, lo: float, hi: float) -> None:
    if not lo <= value <= hi:
        raise ValueError(f"{name} = {value} outside [{lo}, {hi}]")


class SandpileOracle:
    """Exact evaluator of the transported-sandpile profile and its contact sets."""

    def xi(self, t: float) -> float:
        """First contact point; increases to the right wall at t = 1/2, then
        returns to the midpoint at t = 5/4."""
        _check_range("t", t, 0.0, T_FREEZE)
        if t <= 0.5:
            return t - 1.0 + math.sqrt((1.0 - t) ** 2 + 2.0)
        return t + 1.0 - math.sqrt((t + 1.0) ** 2 - 2.0)

    def zeta(self, t: float) -> float:
        """Edge of the upper contact region growing from the left wall."""
        _check_range("t", t, 1.0, T_FREEZE)
        return 2.0 * (t - 1.0)

    def distance(self, x: float) -> float:
        """Distance to the boundary of (0, 1); the maximal admissible profile."""
        _check_range("x", x, 0.0, 1.0)
        return 0.5 - abs(x - 0.5)

    def initial_profile(self, x: float) -> float:
        """Parabola -x^2/2 up to xi0, then the line x - 1."""
        _check_range("x", x, 0.0, 1.0)
        if x <= XI_ZERO:
            return -0.5 * x * x
        return x - 1.0

    def profile(self, x, t: float):
        """Profile value(s) at time t; accepts a scalar or an array of x."""
        if t < 0.0:
            raise ValueError(f"t = {t} must be nonnegative")
        xs = np.asarray(x, dtype=float)
        if np.any(xs < 0.0) or np.any(xs > 1.0):
            raise ValueError("x outside [0, 1]")
        out = self._profile_array(xs, t)
        if np.isscalar(x) or np.ndim(x) == 0:
            return float(out)
        return out

    def _profile_array(self, xs: np.ndarray, t: float) -> np.ndarray:
        d = 0.5 - np.abs(xs - 0.5)
        if t > T_FREEZE:
            return d
        parabola = t * xs - 0.5 * xs * xs
        xi_t = self.xi(t)
        if t <= 1.0:
            # right of xi: lower contact (x - 1) until the wall touch at
            # t = 1/2, upper contact (1 - x) afterwards
            right = xs - 1.0 if t <= 0.5 else 1.0 - xs
            return np.where(xs <= xi_t, parabola, right)
        zeta_t = self.zeta(t)
        return np.select(
            [xs <= zeta_t, xs <= xi_t],
            [xs, parabola],
            default=1.0 - xs,
        )

    def coincidence_label(self, x: float, t: float) -> Region:
        """Exact contact classification at an interior point."""
        if not 0.0 < x < 1.0:
            raise ValueError(f"x = {x} must lie strictly inside (0, 1)")
        if t < 0.0:
            raise ValueError(f"t = {t} must be nonnegative")
        if t > T_FREEZE:
            return Region.UPPER
        if t <= 0.5:
            return Region.LOWER if x >= self.xi(t) else Region.OPEN
        if t <= 1.0:
            return Region.UPPER if x >= self.xi(t) else Region.OPEN
        if x <= self.zeta(t) or x >= self.xi(t):
            return Region.UPPER
        return Region.OPEN


def distance_field(grid: Grid1D) -> ScalarField:
    """Boundary distance sampled at the nodes."""
    return ScalarField(grid, grid.boundary_distance())


def initial_field(grid: Grid1D) -> ScalarField:
    oracle = SandpileOracle()
    values = np.array([oracle.initial_profile(x) for x in grid.nodes()])
    # boundary values are 0 and 1 - 1 analytically; pin them exactly
    values[0] = 0.0
    values[-1] = 0.0
    return ScalarField(grid, values)


def sandpile_problem(grid: Grid1D, check_horizon: float = 2.0) -> ProblemData:
    """ProblemData of the transported-sandpile case: b = 1, c = 0, f = t, g = 1."""
    if not (grid.x_left == 0.0 and grid.x_right == 1.0):
        raise ValueError("the sandpile case lives on the unit interval")
    return ProblemData(
        b=lambda x, t: 1.0,
        c=lambda x, t: 0.0,
        f=lambda x, t: t,
        g=lambda x, t: 1.0,
        u0=initial_field(grid),
        m=1.0,
        l=0.0,
        check_horizon=check_horizon,
    )
