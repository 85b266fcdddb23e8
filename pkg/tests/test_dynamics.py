import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from laborshare.data_io import TimeSeries
from laborshare.dynamics import SimConfig, analytic_solution, euler_error_bound, simulate, step
from laborshare.errors import DomainError, SingularityError, StabilityError
from laborshare.model import InnovationRates, ModelParams, equilibrium_labor_share

RATES = InnovationRates(0.3, 0.6)


class TestStep:
    def test_fixed_point(self):
        assert step(0.5, RATES, 0.1) == 0.5

    def test_from_zero(self):
        # 0 + 0.1*(0.3 - 0) = 0.03
        assert step(0.0, RATES, 0.1) == pytest.approx(0.03, abs=1e-15)

    def test_decay_without_supply(self):
        # 1 + 0.1*(0 - 0.5) = 0.95
        assert step(1.0, InnovationRates(0.0, 0.5), 0.1) == pytest.approx(0.95, abs=1e-15)

    @pytest.mark.parametrize("dt", [1 / 0.6, 2.0, 10.0])
    def test_stability_guard(self, dt):
        with pytest.raises(StabilityError):
            step(0.2, RATES, dt)


def closed_form(a0, sigma, delta, t):
    return sigma / delta + (a0 - sigma / delta) * math.exp(-delta * t)


class TestSimulate:
    def test_relaxes_to_ratio(self):
        traj = simulate(SimConfig(0.1, 0.01, 50.0, rates=RATES))
        assert abs(traj.final_a - 0.5) <= 1e-3
        assert traj.times[-1] == pytest.approx(50.0)

    def test_fixed_point_is_constant(self):
        traj = simulate(SimConfig(0.5, 0.05, 20.0, rates=RATES))
        assert np.all(traj.a_values == 0.5)

    @settings(max_examples=60, deadline=None)
    @given(
        a0=st.floats(0, 1),
        sigma=st.floats(0, 0.5),
        delta=st.floats(0.51, 2.0),
        dt_delta=st.floats(1e-3, 0.5),
        horizon=st.floats(0.5, 30),
    )
    def test_within_euler_bound_everywhere(self, a0, sigma, delta, dt_delta, horizon):
        rates = InnovationRates(sigma, delta)
        dt = dt_delta / delta
        traj = simulate(SimConfig(a0, dt, horizon, rates=rates))
        err = np.abs(traj.a_values - analytic_solution(a0, rates, traj.times))
        assert np.all(err <= euler_error_bound(rates, a0, dt, traj.times))

    @settings(max_examples=40, deadline=None)
    @given(a0=st.floats(0, 1), sigma=st.floats(0, 0.5), delta=st.floats(0.51, 2.0), horizon=st.floats(0.5, 30))
    def test_fine_step_within_1e3(self, a0, sigma, delta, horizon):
        dt = 0.005 / delta
        rates = InnovationRates(sigma, delta)
        traj = simulate(SimConfig(a0, dt, horizon, rates=rates))
        err = np.abs(traj.a_values - analytic_solution(a0, rates, traj.times))
        assert err.max() <= 1e-3

    def test_coarse_step_is_not_within_1e3(self):
        # dt*delta = 0.1 leaves a transient error near 2%; 1e-3 needs finer steps
        rates = InnovationRates(0.0, 1.0)
        traj = simulate(SimConfig(1.0, 0.1, 1.0, rates=rates))
        assert traj.final_a == pytest.approx(0.9**10, rel=1e-12)
        assert abs(traj.final_a - math.exp(-1)) > 1e-2

    def test_relative_error_tight_case(self):
        traj = simulate(SimConfig(0.1, 0.001, 10.0, rates=RATES))
        exact = closed_form(0.1, 0.3, 0.6, 10.0)
        assert abs(traj.final_a - exact) / exact <= 1e-3

    def test_analytic_helper(self):
        assert float(analytic_solution(0.1, RATES, 0.0)) == pytest.approx(0.1)
        assert float(analytic_solution(0.1, RATES, 1e3)) == pytest.approx(0.5)

    def test_exponential_envelope(self):
        a0, dt, horizon = 0.9, 0.01, 5.0
        traj = simulate(SimConfig(a0, dt, horizon, rates=RATES))
        envelope = abs(a0 - 0.5) * math.exp(-0.6 * horizon)
        assert abs(traj.final_a - 0.5) <= envelope + float(euler_error_bound(RATES, a0, dt, traj.times[-1]))

    def test_dt_refinement(self):
        coarse = simulate(SimConfig(0.05, 0.1, 3.0, rates=RATES)).final_a
        fine = simulate(SimConfig(0.05, 0.05, 3.0, rates=RATES)).final_a
        assert abs(coarse - fine) <= float(euler_error_bound(RATES, 0.05, 0.1, 3.0))

    def test_constant_age_converges_to_r0(self):
        params = ModelParams(0.786, 0.424, 0.0175, 30.0)
        path = TimeSeries("age", (2000, 2001, 2002), (30.0, 30.0, 30.0))
        traj = simulate(SimConfig(0.2, 0.05, 60.0, age_path=path, params=params, delta_ref=0.5))
        assert traj.final_a == pytest.approx(0.424, abs=1e-6)

    @pytest.mark.parametrize("mu", [25.0, 30.0, 38.0, 45.0])
    def test_long_horizon_matches_closed_form(self, mu):
        params = ModelParams(0.786, 0.424, 0.0175, 30.0)
        path = TimeSeries("age", (2000, 2001), (mu, mu))
        traj = simulate(SimConfig(0.05, 0.02, 80.0, age_path=path, params=params, delta_ref=0.4))
        assert abs(traj.final_labor_share - equilibrium_labor_share(params, mu)) <= 1e-3

    def test_tracks_rising_age(self, us_age):
        params = ModelParams(0.786, 0.424, 0.0175, 30.0)
        traj = simulate(SimConfig(0.424, 0.05, 71.0, age_path=us_age, params=params, delta_ref=2.0))
        # fast relaxation keeps the trajectory close to the instantaneous equilibrium
        assert abs(traj.final_labor_share - equilibrium_labor_share(params, us_age.values[-1])) <= 5e-3

    def test_singular_age_path(self):
        params = ModelParams(0.786, 0.2, 0.05, 30.0)
        path = TimeSeries("age", (2000, 2010), (30.0, 55.0))
        with pytest.raises(SingularityError):
            simulate(SimConfig(0.2, 0.1, 10.0, age_path=path, params=params, delta_ref=0.5))

    def test_stability_in_simulation(self):
        with pytest.raises(StabilityError):
            simulate(SimConfig(0.2, 2.0, 10.0, rates=RATES))

    def test_clamp_is_counted(self):
        # sigma > delta pushes a past 1
        traj = simulate(SimConfig(0.9, 0.5, 5.0, rates=InnovationRates(2.0, 1.0), n=1.0))
        assert traj.clamp_events > 0
        assert traj.warnings
        assert np.all((traj.a_values >= 0) & (traj.a_values <= 1))

    def test_trajectory_shape_and_immutability(self):
        traj = simulate(SimConfig(0.1, 0.5, 5.0, rates=RATES, n=0.5))
        assert len(traj.times) == len(traj.a_values) == len(traj.labor_share_values) == 11
        assert np.all(np.diff(traj.times) > 0)
        np.testing.assert_allclose(traj.labor_share_values, 1 - traj.a_values**0.5)
        with pytest.raises(ValueError):
            traj.a_values[0] = 0.3

    @pytest.mark.parametrize(
        "kwargs",
        [dict(a_init=1.5, dt=0.1, horizon=1.0, rates=RATES), dict(a_init=0.1, dt=0.0, horizon=1.0, rates=RATES),
         dict(a_init=0.1, dt=0.1, horizon=-1.0, rates=RATES), dict(a_init=0.1, dt=0.1, horizon=1.0)],
    )
    def test_config_invariants(self, kwargs):
        with pytest.raises(DomainError):
            SimConfig(**kwargs)
