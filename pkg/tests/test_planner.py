import math
from datetime import date

import numpy as np
import pytest

from epigrowth import scenarios
from epigrowth.planner import (
    InfeasiblePlanError,
    PlannerInputs,
    PlannerSolution,
    euler_residual,
    solve,
    welfare,
)


def flat_inputs(T, A=1.0, L=1.0, N=1.0, K0=1.0, beta=0.96, alpha=0.3, delta=0.1,
                hcost=None, shortfall=None, terminal=None):
    return PlannerInputs(
        labor_path=np.full(T, float(L)),
        pop_path=np.full(T, float(N)),
        tfp_path=np.full(T, float(A)),
        hcost_path=np.zeros(T) if hcost is None else np.asarray(hcost, dtype=float),
        shortfall_path=np.zeros(T) if shortfall is None else np.asarray(shortfall, dtype=float),
        K0=K0,
        beta_daily=beta,
        alpha=alpha,
        delta_daily=delta,
        terminal_capital=terminal,
        start_date=date(2020, 1, 1),
    )


def modified_golden_rule_capital(beta, delta, alpha, A=1.0, L=1.0):
    mpk = 1.0 / beta - (1.0 - delta)
    return L * (alpha * A / mpk) ** (1.0 / (1.0 - alpha))


class TestSteadyState:
    def test_holds_fixed_point(self):
        beta, delta, alpha = 0.96, 0.1, 0.3
        K_star = modified_golden_rule_capital(beta, delta, alpha)
        C_star = K_star ** alpha - delta * K_star
        inputs = flat_inputs(T=400, K0=K_star, beta=beta, alpha=alpha, delta=delta,
                             terminal=K_star)
        sol = solve(inputs)
        assert np.max(np.abs(sol.capital_path - K_star)) <= 1e-10 * K_star
        assert np.max(np.abs(sol.consumption_path - C_star)) <= 1e-10 * C_star
        assert np.max(sol.euler_residuals) <= 1e-10
        assert euler_residual(sol, inputs, 5) <= 1e-12

    def test_terminal_condition_met(self):
        inputs = flat_inputs(T=100, K0=2.0, terminal=1.5)
        sol = solve(inputs)
        assert sol.capital_path[-1] == pytest.approx(1.5, rel=1e-6)


class TestSinglePeriod:
    def test_exhausts_everything(self):
        inputs = flat_inputs(T=1, K0=1.0, delta=1.0, terminal=0.0)
        sol = solve(inputs)
        Y0 = 1.0  # A*K0^alpha*L^(1-alpha) with unit inputs
        assert sol.consumption_path[0] == pytest.approx(Y0, rel=1e-9)
        assert sol.welfare == pytest.approx(math.log(Y0), abs=1e-9)


class TestWelfare:
    def test_consumption_equal_to_population_is_zero(self):
        assert welfare([5.0, 6.0, 7.0], [5.0, 6.0, 7.0], 0.99) == 0.0

    def test_unit_discount_log_e(self):
        assert welfare([math.e, math.e], [1.0, 1.0], 1.0) == pytest.approx(2.0, rel=1e-12)

    def test_nonpositive_consumption_rejected(self):
        with pytest.raises(ValueError):
            welfare([1.0, 0.0], [1.0, 1.0], 0.99)


def growing_inputs(T=600, terminal=None):
    g = 2e-4
    n = 5e-5
    t = np.arange(T)
    return PlannerInputs(
        labor_path=900.0 * np.exp(n * t),
        pop_path=1000.0 * np.exp(n * t),
        tfp_path=1.5 * (1 + g) ** t,
        hcost_path=np.full(T, 0.05),
        shortfall_path=np.where((t > 50) & (t <= 100), 0.1, 0.0),
        K0=4000.0,
        beta_daily=0.9995,
        alpha=0.3,
        delta_daily=3e-4,
        terminal_capital=terminal,
        start_date=date(2020, 1, 1),
    )


class TestOptimality:
    def test_interior_euler_residuals_small(self):
        sol = solve(growing_inputs())
        assert np.max(sol.euler_residuals) < 1e-6
        assert np.max(sol.euler_residuals) < 1e-12  # shooting satisfies the FOC exactly

    def test_budget_identity(self):
        inputs = growing_inputs()
        sol = solve(inputs)
        K, C = sol.capital_path, sol.consumption_path
        t = np.arange(inputs.horizon)
        Y = ((1 - inputs.shortfall_path) * inputs.tfp_path * K[:-1] ** inputs.alpha
             * inputs.labor_path ** (1 - inputs.alpha))
        lhs = K[1:] - ((1 - inputs.delta_daily) * K[:-1] + Y - C - inputs.hcost_path)
        assert np.max(np.abs(lhs)) <= 1e-12 * np.max(K)

    def test_perturbed_path_detected_by_residual(self):
        inputs = growing_inputs()
        sol = solve(inputs)
        t = 150
        C = sol.consumption_path.copy()
        K = sol.capital_path.copy()
        C[t] *= 1.01
        # rebalance through capital so later dates are unchanged
        Y_t = ((1 - inputs.shortfall_path[t]) * inputs.tfp_path[t] * K[t] ** inputs.alpha
               * inputs.labor_path[t] ** (1 - inputs.alpha))
        K[t + 1] = (1 - inputs.delta_daily) * K[t] + Y_t - C[t] - inputs.hcost_path[t]
        Y_t1 = ((1 - inputs.shortfall_path[t + 1]) * inputs.tfp_path[t + 1] * K[t + 1] ** inputs.alpha
                * inputs.labor_path[t + 1] ** (1 - inputs.alpha))
        C[t + 1] = (1 - inputs.delta_daily) * K[t + 1] + Y_t1 - inputs.hcost_path[t + 1] - K[t + 2]
        perturbed = PlannerSolution(
            consumption_path=C, capital_path=K, welfare=float("nan"),
            euler_residuals=sol.euler_residuals,
        )
        assert euler_residual(perturbed, inputs, t) > 1e-3
        assert euler_residual(sol, inputs, t) < 1e-12

    def test_welfare_dominates_random_feasible_perturbations(self):
        inputs = growing_inputs()
        sol = solve(inputs)
        T = inputs.horizon
        W = sol.welfare
        rng = np.random.default_rng(7)
        tried = 0
        while tried < 100:
            t = int(rng.integers(0, T - 2))
            eps = float(rng.uniform(-0.02, 0.02))
            if eps == 0.0:
                continue
            C = sol.consumption_path.copy()
            K = sol.capital_path.copy()
            C[t] *= 1 + eps
            Y_t = ((1 - inputs.shortfall_path[t]) * inputs.tfp_path[t] * K[t] ** inputs.alpha
                   * inputs.labor_path[t] ** (1 - inputs.alpha))
            K[t + 1] = (1 - inputs.delta_daily) * K[t] + Y_t - C[t] - inputs.hcost_path[t]
            if K[t + 1] <= 0:
                continue
            Y_t1 = ((1 - inputs.shortfall_path[t + 1]) * inputs.tfp_path[t + 1]
                    * K[t + 1] ** inputs.alpha * inputs.labor_path[t + 1] ** (1 - inputs.alpha))
            C[t + 1] = (1 - inputs.delta_daily) * K[t + 1] + Y_t1 - inputs.hcost_path[t + 1] - K[t + 2]
            if C[t + 1] <= 0:
                continue
            tried += 1
            W_perturbed = welfare(C, inputs.pop_path, inputs.beta_daily)
            assert W_perturbed <= W + 1e-9 * abs(W)

    def test_higher_tfp_weakly_raises_welfare(self):
        base = growing_inputs()
        sol = solve(base)
        richer = PlannerInputs(
            labor_path=base.labor_path, pop_path=base.pop_path,
            tfp_path=base.tfp_path * 1.01, hcost_path=base.hcost_path,
            shortfall_path=base.shortfall_path, K0=base.K0,
            beta_daily=base.beta_daily, alpha=base.alpha, delta_daily=base.delta_daily,
            terminal_capital=None, start_date=base.start_date,
        )
        assert solve(richer).welfare >= sol.welfare


class TestErrors:
    def test_boundary_dates_rejected(self):
        inputs = flat_inputs(T=10, K0=1.0, terminal=None)
        sol = solve(inputs)
        with pytest.raises(ValueError):
            euler_residual(sol, inputs, 9)
        with pytest.raises(ValueError):
            euler_residual(sol, inputs, -1)

    def test_infeasible_cost_spike_reports_first_date(self):
        hcost = np.zeros(5)
        hcost[1] = 50.0  # far beyond anything output plus capital can cover
        inputs = flat_inputs(T=5, K0=1.0, hcost=hcost, terminal=0.0)
        with pytest.raises(InfeasiblePlanError) as err:
            solve(inputs)
        assert err.value.day_index == 1
        assert err.value.day == date(2020, 1, 2)

    def test_unreachable_terminal_capital(self):
        inputs = flat_inputs(T=5, K0=1.0, terminal=1e9)
        with pytest.raises(InfeasiblePlanError) as err:
            solve(inputs)
        assert err.value.day_index == 5

    def test_path_length_mismatch_rejected(self):
        inputs = PlannerInputs(
            labor_path=np.ones(5), pop_path=np.ones(4), tfp_path=np.ones(5),
            hcost_path=np.zeros(5), shortfall_path=np.zeros(5),
            K0=1.0, beta_daily=0.99, alpha=0.3, delta_daily=0.1,
        )
        with pytest.raises(ValueError):
            solve(inputs)


class TestTruncationSensitivity:
    def test_2030_consumption_insensitive_to_horizon(self, params):
        short = scenarios.run_scenario(
            scenarios.no_pandemic_scenario(horizon=date(2050, 12, 31)), params
        )
        long = scenarios.run_scenario(
            scenarios.no_pandemic_scenario(horizon=date(2060, 12, 31)), params
        )
        idx = short.index_of(date(2030, 12, 31))
        assert long.C[idx] == pytest.approx(short.C[idx], rel=1e-3)
