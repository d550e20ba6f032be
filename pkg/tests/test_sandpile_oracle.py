import math

import numpy as np
import pytest

from slopecap import Grid1D, Region, SandpileOracle, max_gradient, sandpile_problem
from slopecap.sandpile import XI_ZERO, initial_field

ORACLE = SandpileOracle()


def compact_profile(x, t):
    """Independent closed form: clamp the growing parabola into the band."""
    d = 0.5 - abs(x - 0.5)
    return max(-d, min(t * x - 0.5 * x * x, d))


class TestContactPointXi:
    def test_start_value(self):
        assert ORACLE.xi(0.0) == pytest.approx(math.sqrt(3.0) - 1.0, abs=1e-15)

    def test_wall_touch_from_both_branches(self):
        assert ORACLE.xi(0.5) == pytest.approx(1.0, abs=1e-15)
        # the second branch formula gives the same value at t = 1/2
        assert 1.5 - math.sqrt(2.25 - 2.0) == pytest.approx(1.0, abs=1e-15)

    def test_final_value_is_midpoint(self):
        # 9/4 - sqrt(49/16) = 1/2 exactly
        assert ORACLE.xi(1.25) == pytest.approx(0.5, abs=1e-15)

    def test_continuous_at_branch_switch(self):
        assert ORACLE.xi(0.5 - 1e-12) == pytest.approx(ORACLE.xi(0.5 + 1e-12), abs=1e-10)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            ORACLE.xi(-0.01)
        with pytest.raises(ValueError):
            ORACLE.xi(1.26)


class TestContactPointZeta:
    def test_appears_at_zero(self):
        assert ORACLE.zeta(1.0) == 0.0

    def test_linear_growth(self):
        assert ORACLE.zeta(9.0 / 8.0) == pytest.approx(0.25, abs=1e-15)

    def test_meets_xi_at_freeze(self):
        assert ORACLE.zeta(1.25) == pytest.approx(ORACLE.xi(1.25), abs=1e-15)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            ORACLE.zeta(0.99)
        with pytest.raises(ValueError):
            ORACLE.zeta(1.26)


class TestDistance:
    @pytest.mark.parametrize("x,expected", [(0.0, 0.0), (0.5, 0.5), (0.75, 0.25), (1.0, 0.0)])
    def test_values(self, x, expected):
        assert ORACLE.distance(x) == pytest.approx(expected, abs=1e-15)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            ORACLE.distance(1.5)


class TestInitialProfile:
    def test_boundary_values(self):
        assert ORACLE.initial_profile(0.0) == 0.0
        assert ORACLE.initial_profile(1.0) == 0.0

    def test_continuous_at_kink(self):
        # both branches equal sqrt(3) - 2 at xi0
        parabola = -0.5 * XI_ZERO * XI_ZERO
        line = XI_ZERO - 1.0
        assert parabola == pytest.approx(line, abs=1e-15)
        assert ORACLE.initial_profile(XI_ZERO) == pytest.approx(math.sqrt(3.0) - 2.0, abs=1e-15)


class TestProfile:
    def test_open_region_value(self):
        # xi(3/4) ~ 0.719 > 1/2, so the parabola branch applies
        assert ORACLE.profile(0.5, 0.75) == pytest.approx(0.25, abs=1e-15)

    def test_right_side_sits_on_upper_bound_after_wall_touch(self):
        # the 1 < t <= 5/4 branch right of xi continues the t > 1/2 contact
        # with the upper bound 1 - x; the lower-bound value -(1 - x) would
        # break continuity in both x and t and the freeze at distance(x)
        assert ORACLE.profile(0.9, 1.1) == pytest.approx(0.1, abs=1e-15)

    def test_frozen_state_is_distance(self):
        x = np.linspace(0.0, 1.0, 101)
        assert np.allclose(ORACLE.profile(x, 2.0), [ORACLE.distance(xi) for xi in x])

    def test_matches_clamped_parabola_everywhere(self):
        for t in np.linspace(0.0, 2.0, 81):
            x = np.linspace(0.0, 1.0, 301)
            expected = [compact_profile(xi, t) for xi in x]
            assert np.allclose(ORACLE.profile(x, float(t)), expected, atol=1e-14)

    def test_continuous_in_space(self):
        # include refinements near the contact points at each sampled time
        for t in (0.0, 0.3, 0.5, 0.75, 1.0, 1.1, 1.2, 1.25, 1.3):
            probes = [np.linspace(0.0, 1.0, 10_001)]
            if t <= 1.25:
                xi = ORACLE.xi(t)
                probes.append(np.clip(xi + np.linspace(-1e-9, 1e-9, 41), 0.0, 1.0))
            if 1.0 <= t <= 1.25:
                zeta = ORACLE.zeta(t)
                probes.append(np.clip(zeta + np.linspace(-1e-9, 1e-9, 41), 0.0, 1.0))
            x = np.unique(np.concatenate(probes))
            values = ORACLE.profile(x, t)
            jumps = np.abs(np.diff(values))
            gaps = np.diff(x)
            assert np.all(jumps <= 1.000001 * gaps + 1e-12)

    def test_slope_bounded_by_one(self):
        x = np.linspace(0.0, 1.0, 2001)
        for t in np.linspace(0.0, 1.5, 31):
            values = ORACLE.profile(x, float(t))
            assert np.max(np.abs(np.diff(values))) <= (x[1] - x[0]) * (1.0 + 1e-12)

    def test_zero_trace_all_times(self):
        for t in np.linspace(0.0, 3.0, 61):
            assert ORACLE.profile(0.0, float(t)) == 0.0
            assert ORACLE.profile(1.0, float(t)) == 0.0

    def test_nondecreasing_in_time(self):
        x = np.linspace(0.0, 1.0, 401)
        times = np.linspace(0.0, 1.6, 65)
        previous = ORACLE.profile(x, 0.0)
        for t in times[1:]:
            current = ORACLE.profile(x, float(t))
            assert np.min(current - previous) >= -1e-14
            previous = current

    def test_frozen_from_t_star_on(self):
        x = np.linspace(0.0, 1.0, 401)
        d = ORACLE.profile(x, 5.0)
        for t in (1.25, 1.2500001, 1.3, 2.0, 10.0):
            assert np.allclose(ORACLE.profile(x, t), d, atol=1e-14)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            ORACLE.profile(-0.1, 0.5)
        with pytest.raises(ValueError):
            ORACLE.profile(0.5, -0.1)


class TestCoincidenceLabel:
    def test_lower_contact_early(self):
        assert ORACLE.coincidence_label(0.9, 0.25) is Region.LOWER

    def test_upper_contact_left_wall_region(self):
        # zeta(1.2) = 0.4 > 0.1
        assert ORACLE.coincidence_label(0.1, 1.2) is Region.UPPER

    def test_open_interior(self):
        assert ORACLE.coincidence_label(0.3, 0.1) is Region.OPEN

    def test_everything_upper_after_freeze(self):
        for x in (0.1, 0.5, 0.9):
            assert ORACLE.coincidence_label(x, 1.3) is Region.UPPER

    def test_consistent_with_profile_values(self):
        rng = np.random.default_rng(11)
        for _ in range(500):
            x = float(rng.uniform(0.01, 0.99))
            t = float(rng.uniform(0.0, 1.6))
            label = ORACLE.coincidence_label(x, t)
            z = ORACLE.profile(x, t)
            d = ORACLE.distance(x)
            if label is Region.UPPER:
                assert z == pytest.approx(d, abs=1e-12)
            elif label is Region.LOWER:
                assert z == pytest.approx(-d, abs=1e-12)
            else:
                assert -d + 1e-14 < z < d - 1e-14

    def test_domain_error_on_boundary(self):
        with pytest.raises(ValueError):
            ORACLE.coincidence_label(0.0, 0.5)


class TestSandpileProblem:
    def test_initial_field_matches_profile_at_zero(self):
        grid = Grid1D(0.0, 1.0, 200)
        field = initial_field(grid)
        assert np.allclose(field.values, ORACLE.profile(grid.nodes(), 0.0), atol=1e-14)

    def test_data_is_feasible(self):
        data = sandpile_problem(Grid1D(0.0, 1.0, 128))
        assert max_gradient(data.u0) <= 1.0 + 1e-12

    def test_requires_unit_interval(self):
        with pytest.raises(ValueError):
            sandpile_problem(Grid1D(0.0, 2.0, 128))
