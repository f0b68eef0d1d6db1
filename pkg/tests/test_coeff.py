import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from erwlab import coeff


class TestGamma:
    def test_integers(self):
        assert coeff.gamma(1.0) == pytest.approx(1.0, abs=1e-12)
        assert coeff.gamma(2.0) == pytest.approx(1.0, abs=1e-12)

    def test_half(self):
        assert coeff.gamma(1.5) == pytest.approx(math.sqrt(math.pi) / 2.0, rel=1e-12)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            coeff.gamma(0.0)
        with pytest.raises(ValueError):
            coeff.gamma(-1.3)

    def test_relative_error_on_contract_range(self):
        xs = np.linspace(1e-3, 4.0, 4001)
        worst = max(abs(coeff.gamma(float(x)) - math.gamma(float(x))) / math.gamma(float(x))
                    for x in xs)
        assert worst <= 1e-10


class TestCoeffTable:
    def test_half_p_is_all_ones(self):
        tab = coeff.build_coeffs(0.5, 200)
        assert np.all(tab.log_a[1:] == 0.0)
        assert np.all(tab.a(np.arange(1, 201)) == 1.0)

    def test_single_factor(self):
        tab = coeff.build_coeffs(0.75, 4)
        assert tab.a(2) == pytest.approx(2.0 / 3.0, rel=1e-15)

    def test_p_one_telescopes(self):
        tab = coeff.build_coeffs(1.0, 500)
        ks = np.arange(1, 501)
        assert np.allclose(tab.a(ks), 1.0 / ks, rtol=1e-12)

    def test_p_zero_is_infinite_with_zero_inverse(self):
        tab = coeff.build_coeffs(0.0, 10)
        assert tab.log_a[1] == 0.0
        assert np.all(np.isinf(tab.log_a[2:]))
        assert np.all(tab.inv_a(np.arange(2, 11)) == 0.0)

    @given(p=st.floats(0.0, 1.0), m=st.integers(1, 300))
    def test_invariants(self, p, m):
        tab = coeff.build_coeffs(p, m)
        assert tab.log_a[1] == 0.0
        assert np.all(tab.a(np.arange(1, m + 1)) > 0.0)
        if m > 1:
            k = np.arange(1, m, dtype=np.float64)
            with np.errstate(divide="ignore"):
                steps = np.log1p((2.0 * p - 1.0) / k)
            # recurrence holds exactly in log space
            assert np.array_equal(tab.log_a[2:], tab.log_a[1:-1] - steps)

    def test_gamma_form_consistency(self):
        ks = np.arange(1, 10_001, dtype=np.float64)
        lg = np.vectorize(math.lgamma)
        for p in (0.3, 0.75, 0.9):
            tab = coeff.build_coeffs(p, 10_000)
            ref = math.lgamma(2.0 * p) + lg(ks) - lg(ks + 2.0 * p - 1.0)
            rel = np.abs(np.expm1(ref - tab.log_a[1:]))
            assert np.max(rel) <= 1e-8

    def test_stirling_ratio_at_large_k(self):
        k = 1_000_000
        for p in (0.3, 0.9):
            tab = coeff.build_coeffs(p, k)
            ratio = float(tab.a(k)) * k ** (2.0 * p - 1.0) / coeff.gamma(2.0 * p)
            assert abs(ratio - 1.0) <= 1e-3

    def test_index_errors(self):
        tab = coeff.build_coeffs(0.6, 10)
        with pytest.raises(IndexError):
            tab.a(0)
        with pytest.raises(IndexError):
            tab.a(11)
        with pytest.raises(ValueError):
            coeff.build_coeffs(0.6, 0)
        with pytest.raises(ValueError):
            coeff.build_coeffs(1.2, 10)


class TestSNorm:
    def test_boundary_p_one(self):
        # Gamma(2) = 1 and 4p-3 = 1, so s_n = n^{-1/2}
        assert coeff.s_norm(1.0, 4) == pytest.approx(0.5, rel=1e-12)

    def test_value_via_reference_gamma(self):
        assert coeff.s_norm(0.9, 1) == pytest.approx(
            math.gamma(1.8) / math.sqrt(0.6), rel=1e-10)

    def test_pure_power_scaling(self):
        p = 0.9
        ratio = coeff.s_norm(p, 4 * 50) / coeff.s_norm(p, 50)
        assert ratio == pytest.approx(4.0 ** (1.5 - 2.0 * p), rel=1e-12)

    def test_domain(self):
        for bad in (0.75, 0.5, 1.1):
            with pytest.raises(ValueError):
                coeff.s_norm(bad, 10)


class TestRatioGap:
    def test_p_half_is_zero(self):
        assert coeff.ratio_gap(0.5, 17, 2.0) == 0.0

    def test_p_one_hand_bound(self):
        # a-ratio is n/(n+[nt]); |n/(n+[nt]) - 1/(1+t)| <= 1/n on [0, T]
        assert coeff.ratio_gap(1.0, 100, 2.0) <= 1.0 / 100

    def test_scaled_gap_bounded_in_n(self):
        p, T = 0.9, 2.0
        base = 100 * coeff.ratio_gap(p, 100, T)
        for n in (1_000, 10_000):
            assert n * coeff.ratio_gap(p, n, T) <= 1.5 * base

    def test_uniform_grid_brackets_exact(self):
        p, n, T = 0.3, 50, 1.5
        step = 1.0 / (2 * n)
        exact = coeff.ratio_gap(p, n, T)
        gridded = coeff.ratio_gap(p, n, T, grid_step=step)
        # the grid hits every breakpoint but can miss the one-sided limit
        # at interval right ends by at most sup|f'| * step
        assert gridded <= exact + 1e-15
        assert gridded >= exact - abs(1.0 - 2.0 * p) * step - 1e-15

    @given(p=st.floats(0.0, 1.0), n=st.integers(2, 200))
    def test_nonnegative_and_finite(self, p, n):
        g = coeff.ratio_gap(p, n, 1.0)
        assert g >= 0.0 and math.isfinite(g)


class TestLogClockGap:
    def test_exact_value_at_t_one(self):
        for n in (100, 10**4):
            tau_1 = math.log(n + coeff.floor_power(n, 1.0)) / math.log(n)
            assert tau_1 == pytest.approx(1.0 + math.log(2) / math.log(n), rel=1e-14)

    def test_value_at_t_zero(self):
        n = 1000
        tau_0 = math.log(n + coeff.floor_power(n, 0.0)) / math.log(n)
        assert 1.0 < tau_0 < 1.0 + math.log(2) / math.log(n)

    def test_explicit_bound_at_desk_sizes(self):
        for n in (100, 10**4):
            gap = coeff.log_clock_gap(n, 2.0)
            bound = max(math.log(2) / math.log(n),
                        abs(math.log(1.0 - n**-2.0)) / math.log(n))
            assert gap <= bound + 1e-12

    def test_gap_at_1e4(self):
        assert coeff.log_clock_gap(10**4, 2.0) <= 0.0753

    def test_monotone_decreasing_in_n(self):
        gaps = [coeff.log_clock_gap(n, 2.0) for n in (100, 1_000, 10_000)]
        assert gaps[0] > gaps[1] > gaps[2]

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            coeff.log_clock_gap(1, 2.0)


class TestFloorPower:
    def test_exact_integer_powers(self):
        assert coeff.floor_power(1000, 2.0) == 1_000_000
        assert coeff.floor_power(10, 6.0) == 1_000_000
        assert coeff.floor_power(7, 0.0) == 1

    def test_known_values(self):
        assert coeff.floor_power(1000, 1.5) == 31_622
        assert coeff.floor_power(10, 0.5) == 3
        assert coeff.floor_power(2, 0.9) == 1

    @given(n=st.integers(2, 40), t=st.integers(0, 6))
    def test_integer_exponents_exact(self, n, t):
        assert coeff.floor_power(n, float(t)) == n**t

    @given(n=st.integers(2, 5000), t=st.floats(0.0, 3.0))
    def test_bracketing(self, n, t):
        k = coeff.floor_power(n, t)
        # log-space bracketing with a rounding allowance
        assert math.log(k) <= t * math.log(n) + 1e-9
        assert math.log(k + 1) >= t * math.log(n) - 1e-9
