import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fockgen.errors import InfeasibleTargetError
from fockgen.mode_profile import (
    CavityParams,
    PulseWindow,
    coupling_at,
    pulse_area_closed,
    pulse_area_numeric,
    solve_symmetric_window,
)

P = CavityParams()
W = P.waist

# mpmath quadrature of the Gaussian profile at 30 digits, frozen.
FULL_TRANSIT = 6.28107398042616644948
AREA_PM_1352UM = 1.57041183829455271354
AREA_PM_3W = 6.28093522838025395214
HALF_WIDTH_PI_2 = 1.35234245426070328966e-3
DURATION_PI_2 = 5.40936981704281315863e-6
HALF_WIDTH_PI_2SQRT2 = 9.48134788374312130381e-4
DURATION_PI_2SQRT2 = 3.79253915349724852152e-6

positions = st.floats(min_value=-5 * W, max_value=5 * W, allow_nan=False)


class TestCavityParams:
    def test_defaults(self):
        assert P.omega0 == pytest.approx(2 * math.pi * 47e3)
        assert (P.waist, P.velocity, P.t_cav, P.t_switch, P.tau_bar) == (6e-3, 500.0, 123e-3, 1e-6, 10e-6)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"omega0": 0.0},
            {"waist": -1.0},
            {"velocity": 0.0},
            {"t_cav": 0.0},
            {"tau_bar": -1e-6},
            {"t_switch": -1e-9},
            {"omega0": math.inf},
            {"waist": math.nan},
        ],
    )
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(ValueError):
            CavityParams(**kwargs)

    def test_zero_switch_time_allowed(self):
        assert CavityParams(t_switch=0.0).t_switch == 0.0


class TestCoupling:
    def test_centre(self):
        assert coupling_at(P, 0.0) == P.omega0

    def test_at_waist(self):
        assert coupling_at(P, W) == pytest.approx(P.omega0 / math.e, rel=1e-15)
        assert coupling_at(P, W) / (2 * math.pi) == pytest.approx(17.29e3, abs=5.0)

    @given(positions)
    def test_even_and_positive(self, r):
        assert coupling_at(P, r) == coupling_at(P, -r)
        assert coupling_at(P, r) > 0


class TestPulseArea:
    def test_empty_interval(self):
        assert pulse_area_closed(P, 1e-3, 1e-3) == 0.0
        assert pulse_area_numeric(P, 1e-3, 1e-3) == 0.0

    def test_full_transit(self):
        assert pulse_area_closed(P, -math.inf, math.inf) == pytest.approx(FULL_TRANSIT, rel=1e-14)
        assert P.full_transit_area == pytest.approx(6.281, abs=5e-4)

    def test_symmetric_quarter_window(self):
        area = pulse_area_closed(P, -1.352e-3, 1.352e-3)
        assert area == pytest.approx(AREA_PM_1352UM, rel=1e-13)
        assert abs(area - math.pi / 2) < 1e-3

    def test_numeric_matches_closed_on_window(self):
        a, b = -1.35e-3, 1.35e-3
        assert pulse_area_numeric(P, a, b) == pytest.approx(pulse_area_closed(P, a, b), rel=1e-10)

    def test_three_waists_close_to_full(self):
        assert pulse_area_numeric(P, -3 * W, 3 * W) == pytest.approx(AREA_PM_3W, rel=1e-12)
        assert pulse_area_numeric(P, -3 * W, 3 * W) == pytest.approx(FULL_TRANSIT, rel=1e-4)

    def test_numeric_infinite_bounds(self):
        assert pulse_area_numeric(P, -math.inf, math.inf) == pytest.approx(FULL_TRANSIT, rel=1e-10)

    def test_reversed_interval_rejected(self):
        with pytest.raises(ValueError):
            pulse_area_closed(P, 1e-3, 0.0)
        with pytest.raises(ValueError):
            pulse_area_numeric(P, 1e-3, 0.0)
        with pytest.raises(ValueError):
            pulse_area_numeric(P, 0.0, 1e-3, abs_tol=0.0)

    @settings(max_examples=200)
    @given(positions, positions)
    def test_closed_form_vs_quadrature(self, a, b):
        a, b = min(a, b), max(a, b)
        closed = pulse_area_closed(P, a, b)
        assert abs(closed - pulse_area_numeric(P, a, b)) < 1e-10 * max(1.0, closed)

    @given(positions, positions, positions)
    def test_additive(self, a, b, c):
        a, b, c = sorted((a, b, c))
        whole = pulse_area_closed(P, a, c)
        parts = pulse_area_closed(P, a, b) + pulse_area_closed(P, b, c)
        assert abs(parts - whole) <= 1e-12 * max(whole, 1e-300) + 1e-15

    @given(positions, st.floats(min_value=1e-9, max_value=W))
    def test_monotone_in_end(self, a, step):
        assert pulse_area_closed(P, a, a + step) > 0
        assert pulse_area_closed(P, a - W, a + step) > pulse_area_closed(P, a - W, a)


class TestSymmetricWindow:
    def test_first_atom_matches_worked_example(self):
        win = solve_symmetric_window(P, 1, math.pi / 2)
        assert win.half_width == pytest.approx(HALF_WIDTH_PI_2, rel=1e-12)
        assert win.duration == pytest.approx(DURATION_PI_2, rel=1e-12)
        assert win.r_start == -win.r_end
        assert win.duration == pytest.approx((win.r_end - win.r_start) / P.velocity, rel=1e-15)
        # 5.4 us, 1.4 mm before the axis (the text rounds)
        assert abs(win.duration - 5.4e-6) < 0.05e-6
        assert abs(win.half_width - 1.4e-3) < 0.05e-3

    def test_second_atom(self):
        win = solve_symmetric_window(P, 2, math.pi / (2 * math.sqrt(2)))
        assert win.half_width == pytest.approx(HALF_WIDTH_PI_2SQRT2, rel=1e-12)
        assert win.duration == pytest.approx(DURATION_PI_2SQRT2, rel=1e-12)
        assert pulse_area_numeric(P, win.r_start, win.r_end) == pytest.approx(win.target_area, rel=1e-10)

    def test_infeasible(self):
        with pytest.raises(InfeasibleTargetError) as exc:
            solve_symmetric_window(P, 3, 7.0)
        assert exc.value.atom_index == 3
        with pytest.raises(InfeasibleTargetError):
            solve_symmetric_window(P, 1, P.full_transit_area)

    def test_just_below_full_transit(self):
        theta = P.full_transit_area * (1 - 1e-9)
        win = solve_symmetric_window(P, 1, theta)
        assert win.half_width > 4 * W
        assert pulse_area_closed(P, win.r_start, win.r_end) == pytest.approx(theta, rel=1e-12)

    @pytest.mark.parametrize("theta", [0.0, -1.0, math.nan])
    def test_invalid_target(self, theta):
        with pytest.raises(ValueError):
            solve_symmetric_window(P, 1, theta)

    @settings(max_examples=200)
    @given(st.floats(min_value=1e-8, max_value=0.9999))
    def test_round_trip(self, frac):
        theta = frac * P.full_transit_area
        win = solve_symmetric_window(P, 1, theta)
        assert abs(pulse_area_closed(P, win.r_start, win.r_end) - theta) <= 1e-12 * theta

    @given(st.floats(min_value=1e-6, max_value=0.99), st.floats(min_value=1e-4, max_value=0.5))
    def test_duration_increases_with_target(self, frac, bump):
        lo = solve_symmetric_window(P, 1, frac * P.full_transit_area)
        hi = solve_symmetric_window(P, 1, min(0.999, frac + bump) * P.full_transit_area)
        assert hi.duration > lo.duration

    def test_other_params(self):
        params = CavityParams(omega0=2 * math.pi * 10e3, waist=2e-3, velocity=100.0)
        for i in range(1, 6):
            theta = math.pi / (2 * math.sqrt(i))
            win = solve_symmetric_window(params, i, theta)
            assert pulse_area_numeric(params, win.r_start, win.r_end) == pytest.approx(theta, rel=1e-10)


def test_pulse_window_validation():
    with pytest.raises(ValueError):
        PulseWindow(0, -1.0, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        PulseWindow(1, 1.0, 1.0, 0.0, 1.0)
    assert np.isclose(PulseWindow(1, -2.0, 2.0, 1.0, 1.0).half_width, 2.0)
