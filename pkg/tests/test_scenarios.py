import dataclasses
from datetime import date

import numpy as np
import pytest

from epigrowth import scenarios
from epigrowth.planner import InfeasiblePlanError
from epigrowth.scenarios import (
    BacktestData,
    PolicySchedule,
    Scenario,
    backtest,
    no_intervention_scenario,
    no_pandemic_scenario,
    run_scenario,
    summarize,
    sweep_duration,
    sweep_intensity,
    sweep_start_dates,
    _epidemic_pass,
)


def short_scenario(schedule=None, name="short"):
    """No-intervention initial conditions with a reduced horizon, for tests
    that exercise mechanics rather than published numbers."""
    return no_intervention_scenario(
        schedule=schedule, name=name,
        end_of_interest=date(2022, 12, 31), horizon=date(2024, 12, 31),
    )


class TestNoPandemic:
    def test_no_infections_no_deaths(self, baselines):
        trajectory = baselines[0]
        assert np.all(trajectory.I == 0.0)
        assert np.all(trajectory.D == 0.0)
        assert trajectory.S[0] == trajectory.N[0]

    def test_steady_growth(self, baselines):
        trajectory = baselines[0]
        y2020 = trajectory.Y[trajectory.index_of(date(2020, 1, 22))]
        y2030 = trajectory.Y[trajectory.index_of(date(2030, 12, 31))]
        assert y2030 > y2020
        assert trajectory.N[-1] > trajectory.N[0]


class TestPolicyNoOpEquivalence:
    def test_zero_intensity_matches_no_intervention_exactly(self, params, baselines):
        schedule = PolicySchedule(start_date=date(2020, 3, 12), intensity_p=0.0, duration_days=182)
        run = run_scenario(no_intervention_scenario(schedule=schedule, name="noop"), params)
        reference = baselines[1]
        for name, col in run.columns().items():
            assert np.array_equal(col, reference.columns()[name]), name

    def test_zero_duration_matches_no_intervention_exactly(self, params, baselines):
        schedule = PolicySchedule(start_date=date(2020, 3, 12), intensity_p=0.10, duration_days=0)
        run = run_scenario(no_intervention_scenario(schedule=schedule, name="noop"), params)
        reference = baselines[1]
        for name, col in run.columns().items():
            assert np.array_equal(col, reference.columns()[name]), name


class TestDecoupling:
    def test_epidemic_path_ignores_economic_parameters(self, params):
        scenario = short_scenario()
        base = _epidemic_pass(scenario, params)
        richer = dataclasses.replace(params, beta_daily=0.9999, g_daily=1e-4)
        other_k = dataclasses.replace(scenario, K0=scenario.K0 * 2.0, A0=scenario.A0 * 1.5)
        alt = _epidemic_pass(other_k, richer)
        for a, b in zip(base[1:7], alt[1:7]):  # N, S, I, R, D, b
            assert np.array_equal(a, b)


class TestDeterminism:
    def test_identical_runs_are_bit_identical(self, params):
        scenario = short_scenario()
        one = run_scenario(scenario, params)
        two = run_scenario(scenario, params)
        for name, col in one.columns().items():
            assert np.array_equal(col, two.columns()[name]), name
        assert one.welfare == two.welfare

    def test_parallel_sweep_matches_serial(self, params):
        base = short_scenario()
        serial = sweep_duration(params, [4, 8], base=base, reference=run_scenario(base, params))
        parallel = sweep_duration(params, [4, 8], base=base, jobs=2,
                                  reference=run_scenario(base, params))
        for a, b in zip(serial, parallel):
            assert a.scenario.name == b.scenario.name
            assert np.array_equal(a.trajectory.D, b.trajectory.D)
            assert a.metrics.total_deaths == b.metrics.total_deaths
            assert a.metrics.welfare == b.metrics.welfare


class TestSummarize:
    def test_self_comparison(self, baselines):
        trajectory = baselines[1]
        metrics = summarize(trajectory, trajectory)
        assert metrics.max_output_drop_pct == pytest.approx(0.0, abs=1e-12)
        assert all(v == pytest.approx(1.0) for v in metrics.output_ratio_at.values())

    def test_total_deaths_is_terminal_minus_initial(self, baselines):
        trajectory = baselines[1]
        metrics = summarize(trajectory, baselines[0])
        assert metrics.total_deaths == trajectory.D[-1] - trajectory.D[0]

    def test_disjoint_ranges_rejected(self, params, baselines):
        early = run_scenario(
            no_pandemic_scenario(end_of_interest=date(2019, 6, 1), horizon=date(2019, 12, 31)),
            params,
        )
        late = baselines[1]  # starts 2020-01-22
        with pytest.raises(ValueError, match="overlap"):
            summarize(late, early)

    def test_ratio_date_outside_range_rejected(self, baselines):
        with pytest.raises(ValueError, match="outside"):
            summarize(baselines[1], baselines[0], ratio_dates=[date(2031, 6, 1)])


class TestSweeps:
    def test_start_july_matches_no_intervention_until_policy_begins(self, params, baselines, start_date_sweep):
        run = next(r for r in start_date_sweep if r.scenario.name == "start-2020-07-02")
        reference = baselines[1]
        cut = reference.index_of(date(2020, 7, 2))
        np.testing.assert_array_equal(run.trajectory.I[:cut], reference.I[:cut])
        np.testing.assert_array_equal(run.trajectory.D[:cut], reference.D[:cut])

    def test_may_start_minimizes_deaths(self, start_date_sweep):
        deaths = {r.scenario.name: r.metrics.total_deaths for r in start_date_sweep}
        assert min(deaths, key=deaths.get) == "start-2020-05-21"

    def test_start_after_extinction_changes_only_consumption(self, params, baselines):
        runs = sweep_start_dates(params, [date(2024, 1, 1)], reference=baselines[0])
        run = runs[0]
        reference = summarize(baselines[1], baselines[0])
        assert run.metrics.total_deaths == pytest.approx(reference.total_deaths, rel=1e-12)
        assert run.metrics.peak_date == reference.peak_date
        # the production shortfall still binds, so consumption and welfare move
        assert run.metrics.welfare < reference.welfare

    def test_intensity_window_shape(self, intensity_sweep):
        run = next(r for r in intensity_sweep if r.scenario.name == "intensity-00.0500")
        t = run.trajectory
        active = t.p > 0
        assert t.p.max() == 0.05
        assert int(active.sum()) == 182
        first = t.dates[int(np.argmax(active))]
        assert first == date(2020, 3, 12)
        # half-open window: the end day itself is inactive
        assert t.p[t.index_of(date(2020, 9, 9))] == 0.05
        assert t.p[t.index_of(date(2020, 9, 10))] == 0.0

    def test_intensity_delays_peak_but_deaths_similar(self, baselines, intensity_sweep):
        reference_peak = summarize(baselines[1], baselines[0]).peak_date
        deaths = []
        for run in intensity_sweep:
            assert run.metrics.peak_date > reference_peak
            deaths.append(run.metrics.total_deaths)
        assert (max(deaths) - min(deaths)) / min(deaths) < 0.10
        peaks = [r.metrics.peak_date for r in intensity_sweep]
        assert peaks == sorted(peaks)  # higher intensity pushes the wave later

    def test_full_coverage_duration_has_lowest_peak(self, duration_sweep):
        peaks = [r.metrics.peak_active_infections for r in duration_sweep]
        assert peaks[-1] == min(peaks)
        assert peaks[-1] < 0.5 * peaks[0]

    def test_duration_tail_strictly_reduces_deaths(self, duration_sweep):
        deaths = [r.metrics.total_deaths for r in duration_sweep]
        # 28 -> 52 -> 76 weeks: once the window reaches the reduced-rate
        # peak, longer interventions save lives dramatically
        assert deaths[1] > deaths[2] > deaths[3]
        assert deaths[3] < 0.65 * deaths[0]

    def test_per_run_errors_collected_not_fatal(self, params):
        base = short_scenario()
        reference = run_scenario(base, params)
        runs = sweep_intensity(params, [0.05, 1.2], base=base, reference=reference,
                               start_date=date(2020, 3, 12))
        by_name = {r.scenario.name: r for r in runs}
        good = by_name["intensity-00.0500"]
        bad = by_name["intensity-01.2000"]
        assert good.error is None and good.metrics is not None
        assert bad.error is not None and bad.trajectory is None

    def test_results_ordered_by_scenario_key(self, params):
        base = short_scenario()
        reference = run_scenario(base, params)
        runs = sweep_duration(params, [12, 4, 8], base=base, reference=reference)
        names = [r.scenario.name for r in runs]
        assert names == sorted(names)


class TestBacktest:
    def test_fit_within_tolerance_each_year(self, backtest_result):
        _, report = backtest_result
        assert report["max_abs_gdp_error"] <= 0.10
        assert len(report["rows"]) == 21
        assert not report["systematic_drift"]

    def test_zero_growth_control_flags_drift(self, params, datasets):
        observed = BacktestData(
            population=datasets["population"], gdp=datasets["gdp"], gcf=datasets["gcf"]
        )
        slow = dataclasses.replace(params, g_daily=0.0)
        _, report = backtest(slow, observed)
        assert report["systematic_drift"]
        assert report["mean_gdp_error"] < -0.05

    def test_empty_observed_series_rejected(self, params, datasets):
        import numpy as np
        from epigrowth.calibration import AnnualSeries

        empty = BacktestData(
            population=datasets["population"],
            gdp=AnnualSeries(np.array([], dtype=int), np.array([])),
            gcf=datasets["gcf"],
        )
        with pytest.raises(ValueError, match="empty"):
            backtest(params, empty)


class TestInfeasibility:
    def test_ruinous_hospital_costs_reported_with_scenario_context(self, params):
        ruinous = dataclasses.replace(params, u=1e30)
        with pytest.raises(InfeasiblePlanError) as err:
            run_scenario(short_scenario(name="ruinous"), ruinous)
        assert "ruinous" in str(err.value)
        assert err.value.day is not None


class TestScenarioValidation:
    def test_horizon_must_exceed_end_of_interest(self, params):
        with pytest.raises(ValueError, match="horizon"):
            run_scenario(
                no_intervention_scenario(end_of_interest=date(2030, 12, 31),
                                         horizon=date(2030, 12, 31)),
                params,
            )

    def test_invalid_schedule_rejected(self, params):
        schedule = PolicySchedule(start_date=date(2020, 3, 12), intensity_p=1.5, duration_days=7)
        with pytest.raises(ValueError, match="intensity"):
            run_scenario(short_scenario(schedule=schedule), params)
