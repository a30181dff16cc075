"""Back-of-envelope extrapolations: national CO2 and cycling health benefit.

The health estimate is linear: a fraction of the recommended weekly
MET-hours earns the same fraction of the full risk reduction. Nothing is
clamped; exceeding the recommendation only logs a warning.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass

import numpy as np

from ecomode.modes import TransportMeans

log = logging.getLogger(__name__)

WHO_RECOMMENDATION_METH = 11.25
FULL_BENEFIT_PCT = 10.0
DEFAULT_MET = 4.0
CHINA_TRANSPORT_CO2_MT = 843.9
DENOMINATORS = ("sessions", "users")


class ImpactError(ValueError):
    pass


def _check_finite(**values):
    for name, v in values.items():
        if not math.isfinite(v):
            raise ImpactError(f"{name} must be finite, got {v}")


def extrapolate_national(reduction_fraction: float, national_transport_co2_mt: float = CHINA_TRANSPORT_CO2_MT) -> float:
    """Megatonnes saved if the simulated reduction held nationwide."""
    _check_finite(reduction_fraction=reduction_fraction, national_transport_co2_mt=national_transport_co2_mt)
    if not 0 <= reduction_fraction <= 1:
        raise ImpactError(f"reduction fraction must be in [0, 1], got {reduction_fraction}")
    if national_transport_co2_mt <= 0:
        raise ImpactError(f"national emissions must be positive, got {national_transport_co2_mt}")
    return reduction_fraction * national_transport_co2_mt


def compute_meth(cycling_min_per_day: float, met_factor: float = DEFAULT_MET) -> float:
    _check_finite(cycling_min_per_day=cycling_min_per_day, met_factor=met_factor)
    if cycling_min_per_day < 0 or met_factor < 0:
        raise ImpactError("cycling minutes and MET factor must be non-negative")
    return cycling_min_per_day * met_factor / 60


def risk_reduction(meth: float, recommendation: float = WHO_RECOMMENDATION_METH, full_benefit_pct: float = FULL_BENEFIT_PCT):
    """Return ``(percent of recommendation, percent mortality risk reduction)``."""
    _check_finite(meth=meth, recommendation=recommendation, full_benefit_pct=full_benefit_pct)
    if recommendation <= 0:
        raise ImpactError(f"recommendation must be positive, got {recommendation}")
    pct = 100 * meth / recommendation
    risk = full_benefit_pct * pct / 100
    if meth > recommendation:
        log.warning("%.3f MET-h exceeds the %.2f MET-h recommendation; linear estimate not capped", meth, recommendation)
    return pct, risk


def mean_cycling_duration(instance, assignment, mapping, days: int, denominator: str = "sessions", uids=None):
    """Average optimized cycling minutes per day.

    The summed cycling ETA is divided by the number of cycling sessions, or
    by the number of distinct users behind them (``uids`` gives one user ID
    per instance row), then by ``days``.
    """
    if days <= 0:
        raise ImpactError(f"days must be positive, got {days}")
    if denominator not in DENOMINATORS:
        raise ImpactError(f"denominator must be one of {DENOMINATORS}")
    chosen = np.asarray(assignment.chosen)
    cycling_cols = [j for j, mode_id in enumerate(instance.mode_ids) if mapping[mode_id] is TransportMeans.CYCLING]
    rows = np.flatnonzero(np.isin(chosen, cycling_cols))
    if rows.size == 0:
        return 0.0
    seconds = math.fsum(instance.Q[rows, chosen[rows]].tolist())
    if denominator == "sessions":
        population = rows.size
    else:
        if uids is None or any(uids[i] is None for i in rows):
            raise ImpactError("per-user averaging needs a uid on every cycling session")
        population = len({uids[i] for i in rows})
    return seconds / population / days / 60


@dataclass(frozen=True)
class ImpactEstimate:
    national_reduction_mt: float
    meth_per_week: float
    pct_of_recommendation: float
    mortality_risk_reduction_pct: float

    def to_json(self) -> dict:
        return asdict(self)


def estimate(
    reduction_fraction: float,
    cycling_min_per_day: float,
    national_transport_co2_mt: float = CHINA_TRANSPORT_CO2_MT,
    met_factor: float = DEFAULT_MET,
    recommendation: float = WHO_RECOMMENDATION_METH,
    full_benefit_pct: float = FULL_BENEFIT_PCT,
) -> ImpactEstimate:
    meth = compute_meth(cycling_min_per_day, met_factor)
    pct, risk = risk_reduction(meth, recommendation, full_benefit_pct)
    return ImpactEstimate(
        national_reduction_mt=extrapolate_national(reduction_fraction, national_transport_co2_mt),
        meth_per_week=meth,
        pct_of_recommendation=pct,
        mortality_risk_reduction_pct=risk,
    )
