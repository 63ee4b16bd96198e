"""Finite-horizon social planner: optimal consumption against exogenous paths.

The epidemic does not respond to consumption, so a scenario reduces to a
deterministic one-state problem: choose daily consumption C_t to maximise

    sum_t beta**t * N_t * ln(C_t / N_t)

subject to K_{t+1} = (1 - delta)*K_t + Y_t - C_t - H_t, K_0 given, and a
pinned terminal capital stock.  Y_t is Cobb-Douglas in K_t and the given
labor path, scaled by the policy shortfall.

The two-point boundary problem is solved by shooting on initial
consumption: the interior first-order condition

    (C_{t+1}/N_{t+1}) / (C_t/N_t) = beta * (1 - delta + MPK_{t+1})

propagates the whole path from C_0, the terminal stock is strictly
decreasing in C_0, and bisection closes the boundary condition to machine
precision.  Paths produced this way satisfy the Euler condition exactly by
construction, so the residual diagnostics sit at rounding level.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date as _date
from datetime import timedelta

import numpy as np


class InfeasiblePlanError(RuntimeError):
    """Positive consumption is impossible from some day onward."""

    def __init__(self, day_index: int, day: _date | None, reason: str):
        self.day_index = day_index
        self.day = day
        when = f"{day.isoformat()} (day {day_index})" if day is not None else f"day {day_index}"
        super().__init__(f"infeasible at {when}: {reason}")


@dataclass(frozen=True)
class PlannerInputs:
    """Exogenous daily paths (all length T) and scalar problem data."""

    labor_path: np.ndarray      # working persons, S_t + R_t
    pop_path: np.ndarray        # living persons, N_t
    tfp_path: np.ndarray        # A_t
    hcost_path: np.ndarray      # direct pandemic cost, USD/day
    shortfall_path: np.ndarray  # active policy shortfall p_t
    K0: float
    beta_daily: float
    alpha: float
    delta_daily: float
    terminal_capital: float | None = None  # None: balanced-path level at the horizon
    start_date: _date | None = None

    @property
    def horizon(self) -> int:
        return len(self.labor_path)

    def validate(self) -> None:
        T = self.horizon
        for name in ("pop_path", "tfp_path", "hcost_path", "shortfall_path"):
            if len(getattr(self, name)) != T:
                raise ValueError(f"{name} has length {len(getattr(self, name))}, expected {T}")
        if T < 1:
            raise ValueError("horizon must be at least one day")
        if not (0.0 < self.beta_daily < 1.0):
            raise ValueError(f"beta_daily must lie in (0, 1), got {self.beta_daily!r}")
        if self.K0 <= 0:
            raise ValueError(f"K0 must be > 0, got {self.K0!r}")
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        # delta == 1 is allowed for degenerate single-period setups
        if not (0.0 <= self.delta_daily <= 1.0):
            raise ValueError(f"delta_daily must lie in [0, 1], got {self.delta_daily!r}")
        if np.any(np.asarray(self.labor_path) < 0):
            raise ValueError("labor path must be nonnegative")
        if np.any(np.asarray(self.pop_path) <= 0):
            raise ValueError("population path must be positive")
        if np.any(np.asarray(self.hcost_path) < 0):
            raise ValueError("cost path must be nonnegative")
        sp = np.asarray(self.shortfall_path)
        if np.any((sp < 0) | (sp >= 1)):
            raise ValueError("shortfall path must lie in [0, 1)")

    def _date_at(self, index: int) -> _date | None:
        if self.start_date is None:
            return None
        return self.start_date + timedelta(days=index)


@dataclass(frozen=True)
class PlannerSolution:
    consumption_path: np.ndarray   # length T
    capital_path: np.ndarray       # length T + 1, includes terminal stock
    welfare: float
    euler_residuals: np.ndarray    # length T - 1, interior dates


def welfare(consumption_path, pop_path, beta_daily: float) -> float:
    """Truncated discounted sum of population-weighted log utility."""
    C = np.asarray(consumption_path, dtype=float)
    N = np.asarray(pop_path, dtype=float)
    if np.any(C <= 0):
        raise ValueError("consumption must be positive everywhere")
    t = np.arange(len(C))
    return float(np.sum(beta_daily ** t * N * np.log(C / N)))


def balanced_path_terminal_capital(inputs: PlannerInputs) -> float:
    """Capital level at the horizon on the no-shock balanced path.

    Uses the modified golden rule with the horizon's labor, TFP and
    per-capita consumption growth: MPK* = (1 + gx)/beta - (1 - delta).
    """
    T = inputs.horizon
    alpha = inputs.alpha
    A_end = float(inputs.tfp_path[T - 1])
    L_end = float(inputs.labor_path[T - 1])
    p_end = float(inputs.shortfall_path[T - 1])
    if T >= 2 and inputs.tfp_path[T - 2] > 0:
        g = float(inputs.tfp_path[T - 1]) / float(inputs.tfp_path[T - 2]) - 1.0
    else:
        g = 0.0
    gx = (1.0 + g) ** (1.0 / (1.0 - alpha)) - 1.0
    mpk_star = (1.0 + gx) / inputs.beta_daily - (1.0 - inputs.delta_daily)
    if L_end == 0.0:
        return 0.0
    return L_end * (alpha * (1.0 - p_end) * A_end / mpk_star) ** (1.0 / (1.0 - alpha))


def _propagate(C0: float, inputs: PlannerInputs, prodc: list, growu: list):
    """Shoot the Euler/budget recursion forward from C_0.

    Returns (consumption list, capital list incl. terminal, fail index or
    None).  A fail index marks the first day the stock would be exhausted.
    """
    T = inputs.horizon
    alpha = inputs.alpha
    omd = 1.0 - inputs.delta_daily
    H = inputs.hcost_path if isinstance(inputs.hcost_path, list) else list(inputs.hcost_path)

    C_path = [0.0] * T
    K_path = [0.0] * (T + 1)
    K = float(inputs.K0)
    K_path[0] = K
    C = float(C0)
    Kpow = K ** alpha
    for t in range(T):
        C_path[t] = C
        Y = prodc[t] * Kpow
        K_next = omd * K + Y - H[t] - C
        if K_next <= 0.0 and not (t == T - 1 and K_next == 0.0):
            return C_path, K_path, t
        K_path[t + 1] = K_next
        if t < T - 1:
            Kpow = K_next ** alpha
            mpk = alpha * prodc[t + 1] * Kpow / K_next
            C = C * growu[t] * (omd + mpk)
            K = K_next
    return C_path, K_path, None


def solve(inputs: PlannerInputs, *, rel_tol: float = 0.0, max_iter: int = 200) -> PlannerSolution:
    """Solve the consumption problem; see the module docstring for the method.

    By default the bisection runs until the bracket cannot shrink any
    further in double precision; rel_tol > 0 allows an earlier stop.
    """
    inputs.validate()
    T = inputs.horizon
    alpha = inputs.alpha
    beta = inputs.beta_daily
    omd = 1.0 - inputs.delta_daily

    K_target = inputs.terminal_capital
    if K_target is None:
        K_target = balanced_path_terminal_capital(inputs)

    A = np.asarray(inputs.tfp_path, dtype=float)
    L = np.asarray(inputs.labor_path, dtype=float)
    N = np.asarray(inputs.pop_path, dtype=float)
    p = np.asarray(inputs.shortfall_path, dtype=float)
    prodc = ((1.0 - p) * A * L ** (1.0 - alpha)).tolist()
    growu = (beta * N[1:] / N[:-1]).tolist()

    resources0 = omd * inputs.K0 + prodc[0] * inputs.K0 ** alpha - float(inputs.hcost_path[0])
    if resources0 <= 0:
        raise InfeasiblePlanError(0, inputs._date_at(0), "day-0 resources are exhausted by direct costs")

    # Feasibility probe: near-zero consumption maximises the capital path.
    C_lo = 1e-12 * resources0
    C_path, K_path, fail = _propagate(C_lo, inputs, prodc, growu)
    if fail is not None:
        raise InfeasiblePlanError(
            fail, inputs._date_at(fail), "direct costs exceed available resources even at zero consumption"
        )
    if K_path[T] < K_target:
        raise InfeasiblePlanError(
            T, inputs._date_at(T), f"terminal capital target {K_target:.6g} is unreachable"
        )

    C_hi = resources0  # consumes the entire stock on day 0; always overshoots
    for _ in range(max_iter):
        C_mid = 0.5 * (C_lo + C_hi)
        if not (C_lo < C_mid < C_hi):
            break
        _, K_mid, fail = _propagate(C_mid, inputs, prodc, growu)
        if fail is not None or K_mid[T] < K_target:
            C_hi = C_mid
        else:
            C_lo = C_mid
        if rel_tol > 0.0 and (C_hi - C_lo) <= rel_tol * C_hi:
            break

    C_path, K_path, fail = _propagate(C_lo, inputs, prodc, growu)
    assert fail is None

    consumption = np.array(C_path)
    capital = np.array(K_path)
    residuals = _euler_residuals(consumption, capital, inputs, prodc)
    W = welfare(consumption, N, beta)
    return PlannerSolution(
        consumption_path=consumption,
        capital_path=capital,
        welfare=W,
        euler_residuals=residuals,
    )


def _euler_residuals(C: np.ndarray, K: np.ndarray, inputs: PlannerInputs, prodc: list) -> np.ndarray:
    T = inputs.horizon
    if T < 2:
        return np.zeros(0)
    N = np.asarray(inputs.pop_path, dtype=float)
    omd = 1.0 - inputs.delta_daily
    Kn = K[1:T]
    mpk = inputs.alpha * np.asarray(prodc[1:T]) * Kn ** (inputs.alpha - 1.0)
    cpc = C / N
    return np.abs(cpc[1:] / cpc[:-1] / (inputs.beta_daily * (omd + mpk)) - 1.0)


def euler_residual(solution: PlannerSolution, inputs: PlannerInputs, t: int) -> float:
    """First-order-condition diagnostic at an interior day t."""
    T = inputs.horizon
    if not (0 <= t < T - 1):
        raise ValueError(f"t must lie in [0, {T - 1}), got {t!r}")
    C = solution.consumption_path
    K = solution.capital_path
    N = inputs.pop_path
    mpk = (
        inputs.alpha
        * (1.0 - float(inputs.shortfall_path[t + 1]))
        * float(inputs.tfp_path[t + 1])
        * K[t + 1] ** (inputs.alpha - 1.0)
        * float(inputs.labor_path[t + 1]) ** (1.0 - inputs.alpha)
    )
    growth = (C[t + 1] / N[t + 1]) / (C[t] / N[t])
    return abs(growth / (inputs.beta_daily * (1.0 - inputs.delta_daily + mpk)) - 1.0)
