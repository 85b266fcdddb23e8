import math

import mpmath
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from laborshare.errors import DomainError, RangeError, SingularityError
from laborshare.model import (
    InnovationRates,
    ModelParams,
    ProductLine,
    attenuated_ratio,
    cumulative_output_share,
    equilibrium_labor_share,
    mixture_labor_share,
)

mpmath.mp.dps = 40

US = ModelParams(n=0.786, r0=0.424, k=0.0175, mu0=30.0)


def hp_share(n, r0, k, mu, mu0):
    """High-precision closed form, independent of the float path."""
    n, r0, k, mu, mu0 = (mpmath.mpf(str(v)) for v in (n, r0, k, mu, mu0))
    return 1 - (r0 / (1 - k * (mu - mu0))) ** n


class TestCumulativeOutputShare:
    def test_boundaries(self):
        assert cumulative_output_share(1.0, 0.786) == 1.0
        assert cumulative_output_share(0.0, 0.786) == 0.0

    def test_interior_matches_high_precision(self):
        oracle = mpmath.mpf("0.424") ** mpmath.mpf("0.786")
        assert float(oracle) == pytest.approx(0.5094593806372041, abs=1e-15)
        assert cumulative_output_share(0.424, 0.786) == pytest.approx(float(oracle), rel=1e-14)

    @pytest.mark.parametrize("r,n", [(-0.1, 1.0), (1.1, 1.0), (0.5, 0.0), (0.5, -2.0)])
    def test_domain_errors(self, r, n):
        with pytest.raises(DomainError):
            cumulative_output_share(r, n)

    @pytest.mark.parametrize("n", [0.1, 0.5, 0.786, 0.99])
    def test_concave_below_one(self, n):
        h = 1e-3
        grid = [i * h for i in range(1001)]
        vals = [cumulative_output_share(r, n) for r in grid]
        second = [vals[i - 1] - 2 * vals[i] + vals[i + 1] for i in range(1, len(vals) - 1)]
        assert max(second) <= 1e-9

    @given(st.floats(0, 1), st.floats(0, 1), st.floats(0.01, 5))
    def test_monotone(self, a, b, n):
        lo, hi = sorted((a, b))
        assert cumulative_output_share(lo, n) <= cumulative_output_share(hi, n)


class TestAttenuatedRatio:
    def test_at_baseline_age(self):
        assert attenuated_ratio(US, 30.0) == 0.424

    def test_k_zero(self):
        assert attenuated_ratio(ModelParams(0.786, 0.424, 0.0, 30.0), 45.0) == 0.424

    def test_eight_years_older(self):
        assert attenuated_ratio(US, 38.0) == pytest.approx(0.4930232558139535, rel=1e-14)
        assert attenuated_ratio(US, 38.0) == pytest.approx(0.424 / 0.86, rel=1e-15)

    def test_singularity(self):
        p = ModelParams(0.786, 0.424, 0.1, 30.0)
        with pytest.raises(SingularityError):
            attenuated_ratio(p, 40.0)
        with pytest.raises(SingularityError):
            attenuated_ratio(p, 45.0)


class TestEquilibriumLaborShare:
    def test_us_parameters_at_baseline(self):
        oracle = float(hp_share(0.786, 0.424, 0.0175, 30, 30))
        assert oracle == pytest.approx(0.4905406193627959, abs=1e-15)
        assert equilibrium_labor_share(US, 30.0) == pytest.approx(oracle, rel=1e-14)

    def test_full_automation(self):
        p = ModelParams(1.0, 1.0, 0.0, 30.0)
        for mu in (20.0, 30.0, 55.0):
            assert equilibrium_labor_share(p, mu) == 0.0

    def test_square_root_case(self):
        assert equilibrium_labor_share(ModelParams(0.5, 0.25, 0.0, 30.0), 41.0) == 0.5

    def test_range_error_above_one(self):
        p = ModelParams(0.786, 0.9, 0.02, 30.0)
        with pytest.raises(RangeError):
            equilibrium_labor_share(p, 40.0)

    def test_singularity_propagates(self):
        with pytest.raises(SingularityError):
            equilibrium_labor_share(ModelParams(0.786, 0.1, 0.1, 30.0), 41.0)

    @settings(max_examples=300)
    @given(
        n=st.floats(0.05, 5),
        r0=st.floats(0.01, 0.95),
        k=st.floats(1e-4, 0.05),
        mu0=st.floats(20, 40),
        d1=st.floats(-10, 20),
        d2=st.floats(-10, 20),
    )
    def test_strictly_decreasing_in_median_age(self, n, r0, k, mu0, d1, d2):
        lo, hi = sorted((d1, d2))
        assume(hi - lo > 1e-3)
        p = ModelParams(n, r0, k, mu0)
        denom = 1 - k * hi
        assume(denom > 0 and r0 / denom <= 1)
        assert equilibrium_labor_share(p, mu0 + hi) < equilibrium_labor_share(p, mu0 + lo)

    @given(n=st.floats(0.05, 5), r0=st.floats(0.01, 1), mu=st.floats(10, 60))
    def test_k_zero_is_constant(self, n, r0, mu):
        p = ModelParams(n, r0, 0.0, 30.0)
        assert equilibrium_labor_share(p, mu) == 1 - r0**n

    @given(n=st.floats(0.1, 3), r_lo=st.floats(0.05, 0.9), r_hi=st.floats(0.05, 0.9))
    def test_decreasing_in_r0(self, n, r_lo, r_hi):
        lo, hi = sorted((r_lo, r_hi))
        assume(hi - lo > 1e-6)
        assert equilibrium_labor_share(ModelParams(n, hi, 0.01, 30), 35) < equilibrium_labor_share(
            ModelParams(n, lo, 0.01, 30), 35
        )

    def test_vanishes_as_ratio_approaches_one(self):
        # mu at which r0/(1 - k*dmu) == 1 is mu0 + (1 - r0)/k
        p = ModelParams(0.786, 0.424, 0.0175, 30.0)
        edge = 30.0 + (1 - 0.424) / 0.0175
        shares = [equilibrium_labor_share(p, edge - eps) for eps in (1.0, 0.1, 0.01, 1e-4, 1e-8)]
        assert shares == sorted(shares, reverse=True)
        assert shares[-1] < 1e-9


class TestMixture:
    def test_equal_mix(self):
        lines = [ProductLine(4, 0.2, 0.5), ProductLine(8, 0.4, 0.5)]
        assert mixture_labor_share(lines) == pytest.approx(1 / 3, abs=1e-9)

    def test_older_mix(self):
        # (0.6*0.2*4 + 0.4*0.4*8) / (0.6*4 + 0.4*8) = 1.76 / 5.6
        lines = [ProductLine(4, 0.2, 0.6), ProductLine(8, 0.4, 0.4)]
        assert mixture_labor_share(lines) == pytest.approx(1.76 / 5.6, abs=1e-9)
        assert round(mixture_labor_share(lines), 2) == 0.31

    @given(st.floats(0.01, 1e6), st.floats(0, 1))
    def test_single_product(self, price, share):
        assert mixture_labor_share([ProductLine(price, share, 1.0)]) == pytest.approx(share, abs=1e-15)

    def test_errors(self):
        with pytest.raises(DomainError):
            mixture_labor_share([])
        with pytest.raises(DomainError):
            mixture_labor_share([ProductLine(4, 0.2, 0.5), ProductLine(8, 0.4, 0.4)])

    @given(
        st.lists(st.tuples(st.floats(0.1, 100), st.floats(0, 1), st.floats(0.01, 1)), min_size=1, max_size=6)
    )
    def test_between_min_and_max(self, raw):
        total = math.fsum(w for _, _, w in raw)
        lines = [ProductLine(p, s, w / total) for p, s, w in raw]
        assume(abs(math.fsum(l.demand_weight for l in lines) - 1) <= 1e-9)
        value = mixture_labor_share(lines)
        shares = [l.unit_labor_share for l in lines]
        assert min(shares) - 1e-12 <= value <= max(shares) + 1e-12


class TestTypes:
    @pytest.mark.parametrize(
        "kwargs",
        [dict(n=0, r0=0.5, k=0, mu0=30), dict(n=1, r0=0, k=0, mu0=30), dict(n=1, r0=1.2, k=0, mu0=30),
         dict(n=1, r0=0.5, k=-0.1, mu0=30)],
    )
    def test_params_invariants(self, kwargs):
        with pytest.raises(DomainError):
            ModelParams(**kwargs)

    def test_rates_invariants(self):
        assert InnovationRates(0.3, 0.6).ratio == 0.5
        with pytest.raises(DomainError):
            InnovationRates(0.3, 0.0)
        with pytest.raises(DomainError):
            InnovationRates(-0.1, 0.5)
