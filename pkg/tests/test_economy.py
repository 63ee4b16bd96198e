import pytest
from hypothesis import given, settings, strategies as st

from epigrowth.economy import EconParams, EconState, capital_step, hospital_cost, production, tfp_step


class TestStateAndParams:
    def test_valid_state(self):
        EconState(A=1.88, K=2.775e14).validate()

    def test_nonpositive_tfp_rejected(self):
        with pytest.raises(ValueError):
            EconState(A=0.0, K=1.0).validate()

    def test_negative_capital_rejected(self):
        with pytest.raises(ValueError):
            EconState(A=1.0, K=-1.0).validate()

    def test_valid_params(self):
        EconParams(alpha=0.3, g_daily=3.55e-5, delta_daily=1.25e-4, u=5722.078, h=0.147).validate()

    @pytest.mark.parametrize("field,value", [
        ("alpha", 1.0), ("g_daily", -1e-5), ("delta_daily", 0.0), ("u", -1.0), ("h", 1.5),
    ])
    def test_out_of_range_params_rejected(self, field, value):
        good = dict(alpha=0.3, g_daily=3.55e-5, delta_daily=1.25e-4, u=5722.078, h=0.147)
        good[field] = value
        with pytest.raises(ValueError):
            EconParams(**good).validate()


class TestProduction:
    def test_unit_inputs(self):
        assert production(A=1.0, K=1.0, labor=1.0, p=0.0) == 1.0

    def test_policy_scales_linearly(self):
        assert production(A=1.0, K=1.0, labor=1.0, p=0.1) == pytest.approx(0.9)

    def test_closed_form(self):
        assert production(A=2.0, K=16.0, labor=1.0, p=0.0, alpha=0.25) == pytest.approx(4.0)

    def test_zero_labor_means_zero_output(self):
        assert production(A=3.0, K=100.0, labor=0.0, p=0.0) == 0.0

    def test_invalid_inputs_rejected(self):
        with pytest.raises(ValueError):
            production(A=1.0, K=1.0, labor=1.0, p=1.0)
        with pytest.raises(ValueError):
            production(A=1.0, K=1.0, labor=-1.0, p=0.0)

    @given(
        A=st.floats(0.1, 10.0), K=st.floats(0.1, 1e6), L=st.floats(0.1, 1e6),
        p=st.floats(0.0, 0.9), lam=st.floats(0.1, 10.0),
    )
    @settings(max_examples=150, deadline=None)
    def test_constant_returns_to_scale(self, A, K, L, p, lam):
        scaled = production(A, lam * K, lam * L, p)
        assert scaled == pytest.approx(lam * production(A, K, L, p), rel=1e-9)

    @given(A=st.floats(0.1, 10.0), K=st.floats(0.1, 1e6), L=st.floats(0.1, 1e6), p=st.floats(0.0, 0.8))
    @settings(max_examples=100, deadline=None)
    def test_monotonicity(self, A, K, L, p):
        base = production(A, K, L, p)
        assert production(A * 1.1, K, L, p) > base
        assert production(A, K * 1.1, L, p) > base
        assert production(A, K, L * 1.1, p) > base
        assert production(A, K, L, p + 0.05) < base


class TestTfpStep:
    def test_zero_growth(self):
        assert tfp_step(1.0, 0.0) == 1.0

    def test_single_step(self):
        assert tfp_step(1.880, 3.55e-5) == pytest.approx(1.8800667, rel=1e-7)

    def test_compounding_identity(self):
        A, g = 1.3, 3.55e-5
        for _ in range(365):
            A = tfp_step(A, g)
        assert A == pytest.approx(1.3 * (1 + g) ** 365, rel=1e-12)

    def test_nonpositive_rejected(self):
        with pytest.raises(ValueError):
            tfp_step(0.0, 0.1)


class TestHospitalCost:
    def test_no_new_cases(self):
        assert hospital_cost(u=5722.0, h=0.147, b=0.0, S=1e9, I=1e6) == 0.0

    def test_one_case_per_day(self):
        assert hospital_cost(u=5722.0, h=0.147, b=1e-4, S=1000.0, I=10.0) == pytest.approx(841.134)

    def test_calibrated_magnitudes(self):
        cost = hospital_cost(u=5722.078, h=0.147, b=2.041e-11, S=7e9, I=1e6)
        assert cost == pytest.approx(1.2017e8, rel=1e-4)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            hospital_cost(u=-1.0, h=0.1, b=0.0, S=1.0, I=1.0)

    @given(u=st.floats(0, 1e4), h=st.floats(0, 1), b=st.floats(0, 1e-9),
           S=st.floats(0, 1e9), I=st.floats(0, 1e9))
    @settings(max_examples=100, deadline=None)
    def test_multilinear(self, u, h, b, S, I):
        base = hospital_cost(u, h, b, S, I)
        assert hospital_cost(u, h, 2 * b, S, I) == pytest.approx(2 * base, rel=1e-12, abs=1e-300)
        assert hospital_cost(u, h, b, 2 * S, I) == pytest.approx(2 * base, rel=1e-12, abs=1e-300)
        assert hospital_cost(u, h, b, S, 2 * I) == pytest.approx(2 * base, rel=1e-12, abs=1e-300)


class TestCapitalStep:
    def test_replacement_consumption(self):
        assert capital_step(K=100.0, delta_daily=0.0, Y=10.0, C=10.0, H=0.0) == 100.0

    def test_pure_depreciation(self):
        assert capital_step(K=100.0, delta_daily=0.01, Y=0.0, C=0.0, H=0.0) == pytest.approx(99.0)

    def test_arithmetic(self):
        assert capital_step(K=100.0, delta_daily=0.02, Y=20.0, C=5.0, H=3.0) == pytest.approx(110.0)

    def test_infeasible_rejected(self):
        with pytest.raises(ValueError):
            capital_step(K=10.0, delta_daily=0.1, Y=1.0, C=15.0, H=0.0)

    @given(K=st.floats(1.0, 1e12), delta=st.floats(0.0, 0.99),
           Y=st.floats(0.0, 1e10), C=st.floats(0.0, 1e9), H=st.floats(0.0, 1e9))
    @settings(max_examples=150, deadline=None)
    def test_exact_accumulation_identity(self, K, delta, Y, C, H):
        if C + H > (1 - delta) * K + Y:
            with pytest.raises(ValueError):
                capital_step(K, delta, Y, C, H)
        else:
            K_next = capital_step(K, delta, Y, C, H)
            scale = max(K, Y, C, H, 1.0)
            assert K_next + C + H - Y == pytest.approx((1 - delta) * K, rel=1e-12, abs=1e-9 * scale)
