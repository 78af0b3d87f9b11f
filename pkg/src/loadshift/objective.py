"""Demand-response objective: normalized cost + normalized shift + penalty.

    objective = w1 * cost / e_cmax + w2 * shift / l_shmax + alpha * violation

where cost is the day's energy bill in cents, shift the summed absolute
hourly deviation from the predicted profile in kWh, and violation the
one-sided excess of total scheduled over total predicted energy. Pure
and stateless throughout: the swarm evaluators call into here
concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidBounds, ZeroPredictedTotal
from .profiles import DrProblem, HourlyProfile, ProfileKind

DEFAULT_GAMMA_LO = 0.5
DEFAULT_GAMMA_HI = 1.5
DEFAULT_ALPHA = 100.0


@dataclass(frozen=True)
class ObjectiveBreakdown:
    cost_cents: float
    load_shift_kwh: float
    violation: float
    objective: float


def energy_cost(schedule: HourlyProfile, prices: HourlyProfile) -> float:
    """Day cost in cents: sum over hours of load * price."""
    return float(np.dot(schedule.values, prices.values))


def load_shift(schedule: HourlyProfile, predicted: HourlyProfile) -> float:
    """Total absolute hourly deviation from the predicted profile, kWh."""
    return float(np.sum(np.abs(schedule.values - predicted.values)))


def violation(schedule: HourlyProfile, predicted: HourlyProfile, *, symmetric: bool = False) -> float:
    """Relative excess of total scheduled energy over total predicted.

    One-sided by default: scheduling less total energy than predicted is
    free. The symmetric variant penalizes deviation in both directions
    and exists for experimentation only.
    """
    total_predicted = float(np.sum(predicted.values))
    if total_predicted <= 0:
        raise ZeroPredictedTotal("predicted profile has zero total load")
    ratio = float(np.sum(schedule.values)) / total_predicted
    if symmetric:
        return abs(ratio - 1.0)
    return max(ratio - 1.0, 0.0)


def _terms(problem: DrProblem, schedules: np.ndarray):
    """Vectorized cost/shift/violation/objective for (..., 24) schedules."""
    total_predicted = float(np.sum(problem.predicted.values))
    if total_predicted <= 0:
        raise ZeroPredictedTotal("predicted profile has zero total load")
    cost = schedules @ problem.prices.values
    shift = np.abs(schedules - problem.predicted.values).sum(axis=-1)
    ratio = schedules.sum(axis=-1) / total_predicted
    viol = np.abs(ratio - 1.0) if problem.symmetric_violation else np.maximum(ratio - 1.0, 0.0)
    obj = (
        problem.w1 * cost / problem.e_cmax
        + problem.w2 * shift / problem.l_shmax
        + problem.alpha * viol
    )
    return cost, shift, viol, obj


def evaluate(problem: DrProblem, schedule: HourlyProfile) -> ObjectiveBreakdown:
    """Full breakdown for one schedule; out-of-bounds schedules evaluate too."""
    cost, shift, viol, obj = _terms(problem, schedule.values)
    return ObjectiveBreakdown(float(cost), float(shift), float(viol), float(obj))


def evaluate_batch(problem: DrProblem, schedules: np.ndarray) -> tuple:
    """(cost, shift, violation, objective) arrays for an (n, 24) batch."""
    schedules = np.asarray(schedules, dtype=float)
    if schedules.ndim != 2 or schedules.shape[1] != 24:
        raise ValueError(f"expected an (n, 24) schedule batch, got {schedules.shape}")
    return _terms(problem, schedules)


def build_problem(
    predicted: HourlyProfile,
    prices: HourlyProfile,
    w1: float,
    w2: float,
    *,
    gamma_lo: float = DEFAULT_GAMMA_LO,
    gamma_hi: float = DEFAULT_GAMMA_HI,
    peak_cap: Optional[float] = None,
    alpha: float = DEFAULT_ALPHA,
    symmetric_violation: bool = False,
) -> DrProblem:
    """Assemble a DrProblem with per-hour box bounds and normalizers.

    Bounds are gamma_lo/gamma_hi fractions of the predicted hourly load;
    an optional global peak_cap (kWh) additionally caps every hour. The
    normalizers make both criteria at most 1 inside the box:

        e_cmax  = sum_h upper_h * price_h
        l_shmax = sum_h max(upper_h - predicted_h, predicted_h - lower_h)

    A fully pinned box (gamma_lo = gamma_hi, no slack anywhere) gets
    l_shmax = 1 so the objective stays defined; in-box shift is
    identically zero there.
    """
    if predicted.kind is not ProfileKind.LOAD or prices.kind is not ProfileKind.PRICE:
        raise InvalidBounds("build_problem needs a load profile and a price profile")
    if gamma_lo < 0 or gamma_lo > gamma_hi:
        raise InvalidBounds(f"need 0 <= gamma_lo <= gamma_hi, got ({gamma_lo}, {gamma_hi})")
    if peak_cap is not None and peak_cap <= 0:
        raise InvalidBounds(f"peak_cap must be positive, got {peak_cap}")

    lower = gamma_lo * predicted.values
    upper = gamma_hi * predicted.values
    if peak_cap is not None:
        upper = np.minimum(upper, peak_cap)
    if np.any(upper < lower):
        raise InvalidBounds("peak_cap pushes an upper bound below the lower bound")

    e_cmax = float(np.dot(upper, prices.values))
    if e_cmax <= 0:
        raise InvalidBounds("cost normalizer is zero; prices or bounds are degenerate")
    l_shmax = float(np.sum(np.maximum(upper - predicted.values, predicted.values - lower)))
    if l_shmax <= 0:
        l_shmax = 1.0

    return DrProblem(
        predicted=predicted,
        prices=prices,
        lower_bounds=lower,
        upper_bounds=upper,
        w1=w1,
        w2=w2,
        alpha=alpha,
        e_cmax=e_cmax,
        l_shmax=l_shmax,
        symmetric_violation=symmetric_violation,
    )
