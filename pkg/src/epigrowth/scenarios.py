"""Scenario runs: baselines, policy sweeps, the historical backtest, and
summary metrics.

A scenario executes in two passes.  The epidemic is simulated first (it
does not depend on consumption choices), producing daily paths for the
compartments, the working population, the policy shortfall and the direct
hospital costs.  The planner then solves the consumption problem against
those exogenous paths.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import date, timedelta

import numpy as np

from . import calibration, planner
from .epidemic import (
    EpiState,
    MortalityModel,
    PopGrowthParams,
    TradeoffModel,
    effective_rates,
    epi_step,
    policy_to_infection_reduction,
)
from .params import DAYS_PER_YEAR, ModelParams

NO_PANDEMIC = "no-pandemic"
NO_INTERVENTION = "no-intervention"


@dataclass(frozen=True)
class PolicySchedule:
    """A temporary intervention: a GDP shortfall of ``intensity_p`` on the
    half-open window [start_date, start_date + duration_days)."""

    start_date: date
    intensity_p: float
    duration_days: int

    def validate(self) -> None:
        if not (0.0 <= self.intensity_p < 1.0):
            raise ValueError(f"intensity_p must lie in [0, 1), got {self.intensity_p!r}")
        if self.duration_days < 0:
            raise ValueError(f"duration_days must be >= 0, got {self.duration_days!r}")

    def shortfall_on(self, day: date) -> float:
        end = self.start_date + timedelta(days=self.duration_days)
        return self.intensity_p if self.start_date <= day < end else 0.0


@dataclass(frozen=True)
class Scenario:
    """Initial conditions plus an optional intervention schedule."""

    name: str
    start_date: date
    N0: float
    I0: float
    R0: float
    D0: float
    b0: float
    A0: float
    K0: float
    schedule: PolicySchedule | None
    end_of_interest: date
    horizon: date

    def validate(self) -> None:
        if self.horizon <= self.end_of_interest:
            raise ValueError("solver horizon must lie beyond the end of interest")
        if self.end_of_interest <= self.start_date:
            raise ValueError("end of interest must lie beyond the start date")
        self.initial_epi_state().validate()
        if self.A0 <= 0 or self.K0 <= 0 or self.b0 < 0:
            raise ValueError("initial A and K must be positive and b0 nonnegative")
        if self.schedule is not None:
            self.schedule.validate()

    def initial_epi_state(self) -> EpiState:
        # the deceased are already excluded from the living population N0
        return EpiState(
            date=self.start_date,
            N=self.N0,
            S=self.N0 - self.I0 - self.R0,
            I=self.I0,
            R=self.R0,
            D=self.D0,
        )

    def n_days(self) -> int:
        return (self.horizon - self.start_date).days + 1


@dataclass(frozen=True)
class Trajectory:
    """Aligned daily series for one scenario run."""

    scenario_name: str
    params_digest: str
    dates: list
    N: np.ndarray
    S: np.ndarray
    I: np.ndarray
    R: np.ndarray
    D: np.ndarray
    A: np.ndarray
    K: np.ndarray
    Y: np.ndarray
    C: np.ndarray
    H: np.ndarray
    p: np.ndarray
    welfare: float

    def __len__(self) -> int:
        return len(self.dates)

    def index_of(self, day: date) -> int:
        offset = (day - self.dates[0]).days
        if not (0 <= offset < len(self.dates)):
            raise KeyError(f"{day.isoformat()} outside trajectory range")
        return offset

    def columns(self) -> dict:
        return {
            "N": self.N, "S": self.S, "I": self.I, "R": self.R, "D": self.D,
            "A": self.A, "K": self.K, "Y": self.Y, "C": self.C, "H": self.H,
            "p": self.p,
        }


@dataclass(frozen=True)
class SummaryMetrics:
    scenario_name: str
    reference_name: str
    peak_active_infections: float
    peak_date: date
    total_deaths: float
    max_output_drop_pct: float
    output_ratio_at: dict
    welfare: float

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario_name,
            "reference": self.reference_name,
            "peak_active_infections": self.peak_active_infections,
            "peak_date": self.peak_date.isoformat(),
            "total_deaths": self.total_deaths,
            "max_output_drop_pct": self.max_output_drop_pct,
            "output_ratio_at": {k: v for k, v in self.output_ratio_at.items()},
            "welfare": self.welfare,
        }


def no_pandemic_scenario(
    end_of_interest: date = date(2030, 12, 31), horizon: date = date(2060, 12, 31)
) -> Scenario:
    return Scenario(
        name=NO_PANDEMIC,
        start_date=date(2019, 1, 1),
        N0=7.634e9, I0=0.0, R0=0.0, D0=0.0,
        b0=0.0, A0=1.880, K0=2.775e14,
        schedule=None,
        end_of_interest=end_of_interest,
        horizon=horizon,
    )


def no_intervention_scenario(
    schedule: PolicySchedule | None = None,
    name: str = NO_INTERVENTION,
    end_of_interest: date = date(2030, 12, 31),
    horizon: date = date(2060, 12, 31),
) -> Scenario:
    return Scenario(
        name=name,
        start_date=date(2020, 1, 22),
        N0=7.718e9, I0=510.0, R0=28.0, D0=17.0,
        b0=2.041e-11, A0=1.906, K0=2.827e14,
        schedule=schedule,
        end_of_interest=end_of_interest,
        horizon=horizon,
    )


def _epidemic_pass(scenario: Scenario, params: ModelParams):
    """Forward-simulate the epidemic; returns per-day compartment, policy
    shortfall, infection-rate and new-infection arrays."""
    T = scenario.n_days()
    pop = PopGrowthParams(a1=params.a1, a2=params.a2)
    mm = MortalityModel(log_k1=params.log_k1, k2=params.k2)
    tm = TradeoffModel(log_q1=params.log_q1, q2=params.q2)

    base_rates = effective_rates(scenario.b0, 0.0, mm, params.r)
    active_rates = base_rates
    if scenario.schedule is not None and scenario.schedule.intensity_p > 0:
        reduction = policy_to_infection_reduction(scenario.schedule.intensity_p * 100.0, tm)
        active_rates = effective_rates(scenario.b0, reduction, mm, params.r)

    N = np.empty(T); S = np.empty(T); I = np.empty(T); R = np.empty(T); D = np.empty(T)
    b = np.empty(T); p = np.empty(T); F = np.empty(T)
    dates = [scenario.start_date + timedelta(days=k) for k in range(T)]

    state = scenario.initial_epi_state()
    for t in range(T):
        shortfall = scenario.schedule.shortfall_on(dates[t]) if scenario.schedule else 0.0
        rates = active_rates if shortfall > 0 else base_rates
        N[t], S[t], I[t], R[t], D[t] = state.N, state.S, state.I, state.R, state.D
        b[t] = rates.b
        p[t] = shortfall
        F[t] = min(rates.b * state.S * state.I, state.S)
        if t < T - 1:
            state = epi_step(state, rates, pop)
    return dates, N, S, I, R, D, b, p, F


def run_scenario(scenario: Scenario, params: ModelParams) -> Trajectory:
    """Simulate the epidemic, then solve the planner against it.

    The planner works over the full solver horizon so the terminal
    condition cannot distort the reported window, but the returned
    trajectory is cut at ``end_of_interest``: beyond it the continuum
    approximation lets vanishingly small infection levels reignite from
    regrown susceptibles, which is an artifact, not a result.  The stored
    welfare is the planner objective over the full horizon.
    """
    scenario.validate()
    T = scenario.n_days()
    dates, N, S, I, R, D, b, p, F = _epidemic_pass(scenario, params)

    A = scenario.A0 * (1.0 + params.g_daily) ** np.arange(T)
    labor = S + R
    H = params.u * params.h * F

    inputs = planner.PlannerInputs(
        labor_path=labor,
        pop_path=N,
        tfp_path=A,
        hcost_path=H,
        shortfall_path=p,
        K0=scenario.K0,
        beta_daily=params.beta_daily,
        alpha=params.alpha,
        delta_daily=params.delta_daily,
        start_date=scenario.start_date,
    )
    try:
        solution = planner.solve(
            inputs, rel_tol=params.bisection_rel_tol, max_iter=params.max_bisection_iter
        )
    except planner.InfeasiblePlanError as exc:
        raise planner.InfeasiblePlanError(
            exc.day_index, exc.day, f"scenario {scenario.name!r}: {exc.args[0]}"
        ) from exc

    K = solution.capital_path[:T]
    Y = (1.0 - p) * A * K ** params.alpha * labor ** (1.0 - params.alpha)
    n = (scenario.end_of_interest - scenario.start_date).days + 1
    return Trajectory(
        scenario_name=scenario.name,
        params_digest=params.digest(),
        dates=dates[:n],
        N=N[:n], S=S[:n], I=I[:n], R=R[:n], D=D[:n],
        A=A[:n], K=K[:n], Y=Y[:n],
        C=solution.consumption_path[:n],
        H=H[:n], p=p[:n],
        welfare=solution.welfare,
    )


def run_baselines(params: ModelParams) -> tuple[Trajectory, Trajectory]:
    """The two reference runs: pandemic-free growth, and the unchecked
    pandemic from the observed initial conditions."""
    return (
        run_scenario(no_pandemic_scenario(), params),
        run_scenario(no_intervention_scenario(), params),
    )


def summarize(
    trajectory: Trajectory, reference: Trajectory, ratio_dates: list | None = None
) -> SummaryMetrics:
    """Peak, mortality and output-gap metrics against a reference run."""
    first = max(trajectory.dates[0], reference.dates[0])
    last = min(trajectory.dates[-1], reference.dates[-1])
    if first > last:
        raise ValueError(
            f"trajectories do not overlap: {trajectory.dates[0]}..{trajectory.dates[-1]} vs "
            f"{reference.dates[0]}..{reference.dates[-1]}"
        )
    i0, i1 = trajectory.index_of(first), trajectory.index_of(last)
    j0 = reference.index_of(first)
    Y = trajectory.Y[i0 : i1 + 1]
    Y_ref = reference.Y[j0 : j0 + (i1 - i0) + 1]

    peak_idx = int(np.argmax(trajectory.I))
    if ratio_dates is None:
        ratio_dates = [last]
    ratios = {}
    for d in ratio_dates:
        if not (first <= d <= last):
            raise ValueError(f"ratio date {d.isoformat()} outside the common range")
        ratios[d.isoformat()] = float(
            trajectory.Y[trajectory.index_of(d)] / reference.Y[reference.index_of(d)]
        )
    return SummaryMetrics(
        scenario_name=trajectory.scenario_name,
        reference_name=reference.scenario_name,
        peak_active_infections=float(trajectory.I[peak_idx]),
        peak_date=trajectory.dates[peak_idx],
        total_deaths=float(trajectory.D[-1] - trajectory.D[0]),
        max_output_drop_pct=float(np.max(1.0 - Y / Y_ref) * 100.0),
        output_ratio_at=ratios,
        welfare=trajectory.welfare,
    )


@dataclass(frozen=True)
class SweepRun:
    scenario: Scenario
    trajectory: Trajectory | None
    metrics: SummaryMetrics | None
    error: str | None = None


def _run_sweep_member(args):
    scenario, params = args
    return run_scenario(scenario, params)


def _execute_sweep(
    scenarios: list,
    params: ModelParams,
    reference: Trajectory | None,
    ratio_dates: list | None,
    jobs: int,
) -> list:
    if reference is None:
        reference = run_scenario(no_pandemic_scenario(), params)
    runs: list[SweepRun] = []
    trajectories: list = [None] * len(scenarios)
    errors: list = [None] * len(scenarios)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_run_sweep_member, (sc, params)) for sc in scenarios]
            for i, fut in enumerate(futures):
                try:
                    trajectories[i] = fut.result()
                except Exception as exc:  # collected, not fatal to the sweep
                    errors[i] = str(exc)
    else:
        for i, sc in enumerate(scenarios):
            try:
                trajectories[i] = run_scenario(sc, params)
            except Exception as exc:
                errors[i] = str(exc)
    for sc, traj, err in zip(scenarios, trajectories, errors):
        if err is not None:
            runs.append(SweepRun(scenario=sc, trajectory=None, metrics=None, error=err))
        else:
            runs.append(
                SweepRun(scenario=sc, trajectory=traj, metrics=summarize(traj, reference, ratio_dates))
            )
    return sorted(runs, key=lambda run: run.scenario.name)


def sweep_start_dates(
    params: ModelParams,
    dates: list,
    intensity: float = 0.10,
    duration_weeks: int = 26,
    reference: Trajectory | None = None,
    ratio_dates: list | None = None,
    jobs: int = 1,
    base: Scenario | None = None,
) -> list:
    """One run per intervention start date, intensity and duration fixed."""
    template = base if base is not None else no_intervention_scenario()
    scenarios = []
    for d in sorted(dates):
        schedule = PolicySchedule(start_date=d, intensity_p=intensity, duration_days=duration_weeks * 7)
        scenarios.append(
            _with_schedule(template, schedule, f"start-{d.isoformat()}")
        )
    return _execute_sweep(scenarios, params, reference, ratio_dates, jobs)


def sweep_intensity(
    params: ModelParams,
    intensities: list,
    start_date: date = date(2020, 3, 12),
    duration_weeks: int = 26,
    reference: Trajectory | None = None,
    ratio_dates: list | None = None,
    jobs: int = 1,
    base: Scenario | None = None,
) -> list:
    """One run per intervention intensity, start date and duration fixed."""
    template = base if base is not None else no_intervention_scenario()
    scenarios = []
    for p in intensities:
        schedule = PolicySchedule(start_date=start_date, intensity_p=p, duration_days=duration_weeks * 7)
        scenarios.append(_with_schedule(template, schedule, f"intensity-{p:07.4f}"))
    return _execute_sweep(scenarios, params, reference, ratio_dates, jobs)


def sweep_duration(
    params: ModelParams,
    durations_weeks: list,
    start_date: date = date(2020, 3, 12),
    intensity: float = 0.10,
    reference: Trajectory | None = None,
    ratio_dates: list | None = None,
    jobs: int = 1,
    base: Scenario | None = None,
) -> list:
    """One run per intervention duration, start date and intensity fixed."""
    template = base if base is not None else no_intervention_scenario()
    scenarios = []
    for weeks in durations_weeks:
        schedule = PolicySchedule(start_date=start_date, intensity_p=intensity, duration_days=weeks * 7)
        scenarios.append(_with_schedule(template, schedule, f"duration-{weeks:03d}wk"))
    return _execute_sweep(scenarios, params, reference, ratio_dates, jobs)


def _with_schedule(template: Scenario, schedule: PolicySchedule, name: str) -> Scenario:
    return Scenario(
        name=name,
        start_date=template.start_date,
        N0=template.N0, I0=template.I0, R0=template.R0, D0=template.D0,
        b0=template.b0, A0=template.A0, K0=template.K0,
        schedule=schedule,
        end_of_interest=template.end_of_interest,
        horizon=template.horizon,
    )


@dataclass(frozen=True)
class BacktestData:
    """Observed annual series used to initialise and score the backtest."""

    population: calibration.AnnualSeries
    gdp: calibration.AnnualSeries
    gcf: calibration.AnnualSeries


def backtest(
    params: ModelParams,
    observed: BacktestData,
    start_year: int = 1990,
    end_year: int = 2010,
    horizon: date | None = None,
) -> tuple[Trajectory, dict]:
    """Pandemic-free run from historical initial conditions, scored
    against observed annual output.

    The initial capital stock is imputed by perpetual inventory and the
    initial TFP level matches observed output in the starting year.
    """
    for name in ("population", "gdp", "gcf"):
        series = getattr(observed, name)
        if len(series) == 0:
            raise ValueError(f"observed {name} series is empty")
    if horizon is None:
        horizon = date(start_year + 50, 12, 31)

    delta_annual = 1.0 - (1.0 - params.delta_daily) ** DAYS_PER_YEAR
    k_init = calibration.steady_state_k_init(observed.gcf, delta_annual)
    capital = calibration.impute_capital(observed.gcf, delta_annual, k_init)
    tfp_series, _ = calibration.estimate_tfp(observed.gdp, capital, observed.population, params.alpha)

    scenario = Scenario(
        name=f"backtest-{start_year}",
        start_date=date(start_year, 1, 1),
        N0=observed.population.value_at(start_year),
        I0=0.0, R0=0.0, D0=0.0,
        b0=0.0,
        A0=tfp_series.value_at(start_year),
        K0=capital.value_at(start_year),
        schedule=None,
        end_of_interest=date(end_year, 12, 31),
        horizon=horizon,
    )
    trajectory = run_scenario(scenario, params)

    years = [y for y in range(start_year, end_year + 1)]
    missing = [y for y in years if y not in observed.gdp.years]
    if missing:
        raise ValueError(f"observed GDP is missing years {missing}")

    year_index = np.array([d.year for d in trajectory.dates])
    rows = []
    for y in years:
        sim_gdp = float(trajectory.Y[year_index == y].sum())
        obs_gdp = observed.gdp.value_at(y)
        row = {"year": y, "simulated_gdp": sim_gdp, "observed_gdp": obs_gdp,
               "gdp_relative_error": sim_gdp / obs_gdp - 1.0}
        jan1 = trajectory.index_of(date(y, 1, 1))
        if y in observed.population.years:
            row["population_relative_error"] = float(
                trajectory.N[jan1] / observed.population.value_at(y) - 1.0
            )
        if y in capital.years:
            row["capital_relative_error"] = float(trajectory.K[jan1] / capital.value_at(y) - 1.0)
        if y in observed.gcf.years:
            inv = float((trajectory.Y - trajectory.C - trajectory.H)[year_index == y].sum())
            row["investment_relative_error"] = inv / observed.gcf.value_at(y) - 1.0
        rows.append(row)

    errs = np.array([row["gdp_relative_error"] for row in rows])
    drift = float(np.polyfit(np.array(years, dtype=float), errs, 1)[0])
    report = {
        "start_year": start_year,
        "end_year": end_year,
        "rows": rows,
        "max_abs_gdp_error": float(np.max(np.abs(errs))),
        "mean_gdp_error": float(np.mean(errs)),
        "gdp_error_drift_per_year": drift,
        "systematic_drift": bool(abs(float(np.mean(errs))) > 0.05 or abs(drift) > 0.005),
    }
    return trajectory, report
