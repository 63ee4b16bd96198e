"""Daily SIR dynamics with logistic population growth and a deceased class.

State transitions (one day):

    births = (a1 - 1)*N + a2*N**2
    F      = min(b*S*I, S)              new infections, clamped at S
    N' = N + births - m*I
    S' = S + births - F
    I' = I + F - r*I - m*I
    R' = R + r*I
    D' = D + m*I

The clamp on F keeps S nonnegative for extreme infection rates; it never
binds at calibrated magnitudes.  N - (S + I + R) is invariant under the
step.  Policy enters through ``policy_to_infection_reduction`` (output
shortfall -> percentage cut in b) and ``effective_rates`` (reduced b ->
mortality via the fitted log-log model).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date, timedelta


@dataclass(frozen=True)
class EpiState:
    """Compartment counts (persons) on one calendar day.  N is the living
    population; D is cumulative deaths and is excluded from N."""

    date: date
    N: float
    S: float
    I: float
    R: float
    D: float

    def validate(self) -> None:
        for name in ("N", "S", "I", "R", "D"):
            if getattr(self, name) < 0:
                raise ValueError(f"EpiState.{name} must be >= 0, got {getattr(self, name)!r}")


@dataclass(frozen=True)
class EpiRates:
    """Per-day transition rates: b per (person*day), r and m are fractions."""

    b: float
    r: float
    m: float

    def validate(self) -> None:
        if self.b < 0:
            raise ValueError(f"infection rate b must be >= 0, got {self.b!r}")
        if not (0.0 <= self.r <= 1.0 and 0.0 <= self.m <= 1.0):
            raise ValueError(f"r and m must lie in [0, 1], got r={self.r!r}, m={self.m!r}")
        if self.r + self.m > 1.0:
            raise ValueError(f"r + m must not exceed 1, got {self.r + self.m!r}")


@dataclass(frozen=True)
class PopGrowthParams:
    """Daily logistic growth coefficients: births = (a1-1)*N + a2*N**2."""

    a1: float
    a2: float

    def validate(self) -> None:
        # a1 == 1, a2 == 0 is the degenerate no-growth case used in tests
        if self.a1 < 1.0:
            raise ValueError(f"a1 must be >= 1, got {self.a1!r}")
        if self.a2 > 0.0:
            raise ValueError(f"a2 must be <= 0, got {self.a2!r}")


@dataclass(frozen=True)
class MortalityModel:
    """Log-log mortality response m = exp(log_k1 + k2*ln(b))."""

    log_k1: float
    k2: float

    def validate(self) -> None:
        if not (0.0 < self.k2 <= 1.0):
            raise ValueError(f"k2 must lie in (0, 1], got {self.k2!r}")

    def mortality(self, b: float) -> float:
        """Daily mortality fraction for infection rate b; 0 when b is 0."""
        if b < 0:
            raise ValueError(f"infection rate must be >= 0, got {b!r}")
        if b == 0.0:
            return 0.0
        return math.exp(self.log_k1 + self.k2 * math.log(b))


@dataclass(frozen=True)
class TradeoffModel:
    """Concave response of the infection rate to foregone output:
    db% = exp(log_q1) * dGDP%**q2, capped at 100."""

    log_q1: float
    q2: float

    def validate(self) -> None:
        if not (0.0 < self.q2 < 1.0):
            raise ValueError(f"q2 must lie in (0, 1), got {self.q2!r}")


def epi_step(state: EpiState, rates: EpiRates, pop: PopGrowthParams) -> EpiState:
    """Advance the epidemic one day."""
    state.validate()
    rates.validate()
    pop.validate()

    births = (pop.a1 - 1.0) * state.N + pop.a2 * state.N * state.N
    infections = min(rates.b * state.S * state.I, state.S)
    recoveries = rates.r * state.I
    deaths = rates.m * state.I

    nxt = EpiState(
        date=state.date + timedelta(days=1),
        N=state.N + births - deaths,
        S=state.S + births - infections,
        I=state.I + infections - recoveries - deaths,
        R=state.R + recoveries,
        D=state.D + deaths,
    )
    if nxt.S < 0 or nxt.N < 0:
        # only reachable far beyond the logistic carrying capacity
        raise ValueError("population shrank below zero; state outside the model's domain")
    return nxt


def policy_to_infection_reduction(gdp_shortfall_pct: float, t: TradeoffModel) -> float:
    """Percentage reduction in the infection rate bought by a GDP shortfall
    of ``gdp_shortfall_pct`` percent.  Returns 0 at 0 and never exceeds 100."""
    t.validate()
    if gdp_shortfall_pct < 0:
        raise ValueError(f"GDP shortfall must be >= 0, got {gdp_shortfall_pct!r}")
    if gdp_shortfall_pct == 0.0:
        return 0.0
    reduction = math.exp(t.log_q1) * gdp_shortfall_pct ** t.q2
    return min(reduction, 100.0)


def effective_rates(b0: float, reduction_pct: float, mm: MortalityModel, r: float) -> EpiRates:
    """Rates in force given a base infection rate and a percentage reduction.

    Mortality follows the reduced infection rate; recovery passes through.
    """
    if not (0.0 <= reduction_pct <= 100.0):
        raise ValueError(f"reduction_pct must lie in [0, 100], got {reduction_pct!r}")
    b = b0 * (1.0 - reduction_pct / 100.0)
    return EpiRates(b=b, r=r, m=mm.mortality(b))
