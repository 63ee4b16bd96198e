"""Production, TFP growth, direct pandemic costs, and capital accumulation.

Output is Cobb-Douglas in capital and the working population (susceptible
plus recovered), scaled down by the active policy shortfall p:

    Y = (1 - p) * A * K**alpha * L**(1 - alpha)

Capital accumulates as K' = (1 - delta)*K + Y - C - H, where H is the
hospital-admission cost of the day's new infections.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class EconState:
    """Technology level and capital stock at one date."""

    A: float
    K: float

    def validate(self) -> None:
        if self.A <= 0:
            raise ValueError(f"TFP must be > 0, got {self.A!r}")
        if self.K < 0:
            raise ValueError(f"capital must be >= 0, got {self.K!r}")


@dataclass(frozen=True)
class EconParams:
    alpha: float        # output elasticity of capital
    g_daily: float      # daily TFP growth rate
    delta_daily: float  # daily capital depreciation fraction
    u: float            # USD per hospital admission
    h: float            # admissions per confirmed case

    def validate(self) -> None:
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if self.g_daily < 0:
            raise ValueError(f"g_daily must be >= 0, got {self.g_daily!r}")
        if not (0.0 < self.delta_daily < 1.0):
            raise ValueError(f"delta_daily must lie in (0, 1), got {self.delta_daily!r}")
        if self.u < 0 or not (0.0 <= self.h <= 1.0):
            raise ValueError(f"u must be >= 0 and h in [0, 1], got u={self.u!r}, h={self.h!r}")


def production(A: float, K: float, labor: float, p: float, alpha: float = 0.3) -> float:
    """Daily output (1-p)*A*K**alpha*labor**(1-alpha); zero when labor is zero."""
    if not (0.0 <= p < 1.0):
        raise ValueError(f"shortfall p must lie in [0, 1), got {p!r}")
    if labor < 0:
        raise ValueError(f"labor must be >= 0, got {labor!r}")
    if labor == 0.0:
        return 0.0
    return (1.0 - p) * A * K ** alpha * labor ** (1.0 - alpha)


def tfp_step(A: float, g_daily: float) -> float:
    """One day of constant-rate technology growth."""
    if A <= 0:
        raise ValueError(f"TFP must be > 0, got {A!r}")
    return A * (1.0 + g_daily)


def hospital_cost(u: float, h: float, b: float, S: float, I: float) -> float:
    """Direct daily cost of hospitalising new cases: u*h*b*S*I."""
    for name, v in (("u", u), ("h", h), ("b", b), ("S", S), ("I", I)):
        if v < 0:
            raise ValueError(f"{name} must be >= 0, got {v!r}")
    return u * h * b * S * I


def capital_step(K: float, delta_daily: float, Y: float, C: float, H: float) -> float:
    """Next-day capital (1-delta)*K + Y - C - H; rejects infeasible C + H."""
    resources = (1.0 - delta_daily) * K + Y
    if C + H > resources:
        raise ValueError(
            f"consumption {C!r} plus direct costs {H!r} exceed available resources {resources!r}"
        )
    return resources - C - H
