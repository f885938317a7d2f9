"""Measurement schedules derived from the closed-form success probability."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .analytic import ProbabilityProfile, SpectralParams
from .errors import HopelessInstance

SLOWDOWN_BOUND = 4
# below this P_max the search can never be expected to succeed
HOPELESS_P = 1e-20


class Strategy(str, Enum):
    KNOWN_MOMENTS = "KnownMoments"
    TWO_TIME = "TwoTime"
    HOPELESS = "Hopeless"


@dataclass(frozen=True)
class MeasurementPlan:
    t_real: list[float]
    t_int: list[int]
    p_at_t_int: list[float]
    expected_repetitions: float
    strategy: Strategy
    periods_shifted: int = 0
    p_constant: float | None = None


@dataclass(frozen=True)
class TwoTimePlan:
    t1: int
    t2: int
    guarantee: float | None
    rounding_slack: float | None
    realized: float | None
    hopeless: bool = False
    slowdown_bound: int = field(default=SLOWDOWN_BOUND)


def _p_at(spectral: SpectralParams, profile: ProbabilityProfile, t: float) -> float:
    if not spectral.regime.oscillates:
        return profile.p_av
    return profile.p_av - profile.delta_p * math.cos(2 * (spectral.omega * t + spectral.phi.real))


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def expected_repetitions(profile: ProbabilityProfile, strategy: Strategy = Strategy.KNOWN_MOMENTS) -> float:
    """``1/P_max``, or its worst-case multiple for the two-time strategy."""
    if profile.p_max <= HOPELESS_P:
        raise HopelessInstance("P_max is zero; no number of repetitions succeeds")
    base = 1.0 / profile.p_max
    return SLOWDOWN_BOUND * base if strategy is Strategy.TWO_TIME else base


def optimal_measurement_times(spectral: SpectralParams, profile: ProbabilityProfile,
                              j_max: int = 0) -> MeasurementPlan:
    """Times at which the success probability peaks, for ``j = 0..j_max``.

    Real peak times are spaced by ``π/ω``.  Each is mapped to whichever
    adjacent integer step has the larger probability (ties go to the
    earlier step).  Non-oscillating regimes yield a ``Hopeless`` plan that
    carries the constant probability instead of times.
    """
    if not spectral.regime.oscillates:
        p = profile.p_av
        reps = 1.0 / p if p > HOPELESS_P else math.inf
        return MeasurementPlan([], [], [], reps, Strategy.HOPELESS, p_constant=p)

    omega, period = spectral.omega, math.pi / spectral.omega
    first = (0.5 * math.pi - spectral.phi.real) / omega
    shifted = 0
    while first < 0:
        first += period
        shifted += 1

    t_real, t_int, p_int = [], [], []
    for j in range(j_max + 1):
        t = first + j * period
        lo, hi = math.floor(t), math.ceil(t)
        p_lo, p_hi = _p_at(spectral, profile, lo), _p_at(spectral, profile, hi)
        best, p_best = (hi, p_hi) if p_hi > p_lo else (lo, p_lo)
        t_real.append(t)
        t_int.append(int(best))
        p_int.append(p_best)
    return MeasurementPlan(t_real, t_int, p_int, expected_repetitions(profile),
                           Strategy.KNOWN_MOMENTS, periods_shifted=shifted)


def two_time_spacing(omega: float) -> int:
    return max(1, _round_half_up(math.pi / (2 * omega)))


def robust_two_time_plan(spectral: SpectralParams, profile: ProbabilityProfile | None = None,
                         t1: int | None = None) -> TwoTimePlan:
    """Two probes half a probability period apart.

    Only ``ω`` is needed to place the probes.  ``t1`` defaults to
    ``round(π/(4ω))``.  With a ``profile`` the plan also reports the
    guaranteed floor ``P_av - ΔP·sin(ε/2)``, where ``ε = |2ω·spacing - π|``
    is the phase error from rounding the spacing to an integer, and the
    better of the two realised probabilities.
    """
    omega = spectral.omega
    spacing = two_time_spacing(omega)
    if t1 is None:
        t1 = _round_half_up(math.pi / (4 * omega))
    t2 = t1 + spacing
    if profile is None:
        return TwoTimePlan(t1, t2, None, None, None)

    slack = profile.delta_p * math.sin(abs(2 * omega * spacing - math.pi) / 2)
    realized = max(_p_at(spectral, profile, t1), _p_at(spectral, profile, t2))
    hopeless = not spectral.regime.oscillates or profile.p_max <= HOPELESS_P
    return TwoTimePlan(t1, t2, profile.p_av - slack, slack, realized, hopeless=hopeless)
