"""Model parameter bundle and annual/daily rate conversions.

The simulator runs at daily resolution, so every annually quoted rate is
converted with geometric compounding, except the logistic population
coefficients which use the linear day-count scaling (see
``calibration.to_daily``).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, fields

DAYS_PER_YEAR = 365


def annual_to_daily_growth(g_annual: float) -> float:
    """Daily growth rate whose 365-fold compounding equals the annual rate."""
    return (1.0 + g_annual) ** (1.0 / DAYS_PER_YEAR) - 1.0


def daily_to_annual_growth(g_daily: float) -> float:
    return (1.0 + g_daily) ** DAYS_PER_YEAR - 1.0


def annual_to_daily_depreciation(delta_annual: float) -> float:
    """Daily depreciation fraction compounding to the annual fraction."""
    return 1.0 - (1.0 - delta_annual) ** (1.0 / DAYS_PER_YEAR)


def discount_factor_from_annual_rate(rho_annual: float) -> float:
    """Per-day discount factor implied by an annual utility discount rate."""
    return (1.0 + rho_annual) ** (-1.0 / DAYS_PER_YEAR)


@dataclass(frozen=True)
class ModelParams:
    """Calibrated constants at daily resolution, plus solver settings.

    a1, a2        logistic population growth coefficients (daily)
    delta_daily   capital depreciation fraction per day
    alpha         output elasticity of capital
    g_daily       TFP growth rate per day
    beta_daily    utility discount factor per day
    u             USD per hospital admission
    h             hospital admissions per confirmed case
    r             recovery fraction per day per active infection
    b0            base infection rate, per (person*day), absent intervention
    log_k1, k2    mortality model m = exp(log_k1 + k2*ln(b))
    log_q1, q2    infection-reduction model db% = exp(log_q1) * dGDP%**q2
    """

    a1: float
    a2: float
    delta_daily: float
    alpha: float
    g_daily: float
    beta_daily: float
    u: float
    h: float
    r: float
    b0: float
    log_k1: float
    k2: float
    log_q1: float
    q2: float
    # solver settings; a zero bisection tolerance means machine resolution
    euler_tol: float = 1e-6
    bisection_rel_tol: float = 0.0
    max_bisection_iter: int = 200

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ModelParams":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ValueError(f"unknown ModelParams fields: {unknown}")
        return cls(**d)

    def digest(self) -> str:
        """Short deterministic hash of the parameter values, for provenance."""
        canonical = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(canonical.encode()).hexdigest()[:12]


def default_params() -> ModelParams:
    """Published global calibration, converted to daily resolution."""
    return ModelParams(
        a1=1.0 + (1.028 - 1.0) / DAYS_PER_YEAR,
        a2=-2.282e-12 / DAYS_PER_YEAR,
        delta_daily=annual_to_daily_depreciation(0.0446),
        alpha=0.3,
        g_daily=3.55e-5,
        beta_daily=discount_factor_from_annual_rate(0.08),
        u=5722.078,
        h=0.147,
        r=0.02099,
        b0=2.041e-11,
        log_k1=12.561,
        k2=0.717,
        log_q1=3.677,
        q2=0.238,
    )
