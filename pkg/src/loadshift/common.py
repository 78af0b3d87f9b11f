"""Pieces shared by the population optimizers."""

from __future__ import annotations

import numpy as np

from .objective import evaluate
from .profiles import DrProblem, OptimizationResult, load_profile, peak


def init_positions(
    problem: DrProblem, size: int, rng: np.random.Generator, seed_with_predicted: bool
) -> np.ndarray:
    """Uniform positions in the box; member 0 optionally at the predicted
    profile (clamped in) so the search never ends worse than no shifting."""
    positions = rng.uniform(
        problem.lower_bounds, problem.upper_bounds, size=(size, len(problem.lower_bounds))
    )
    if seed_with_predicted:
        positions[0] = np.clip(
            problem.predicted.values, problem.lower_bounds, problem.upper_bounds
        )
    return positions


def make_result(
    problem: DrProblem, best_position: np.ndarray, trace, seed: int
) -> OptimizationResult:
    schedule = load_profile(best_position)
    breakdown = evaluate(problem, schedule)
    return OptimizationResult(
        best_schedule=schedule,
        objective=breakdown.objective,
        cost_cents=breakdown.cost_cents,
        load_shift_kwh=breakdown.load_shift_kwh,
        violation=breakdown.violation,
        peak_before_kw=peak(problem.predicted),
        peak_after_kw=peak(schedule),
        trace=tuple(trace),
        rng_seed=seed,
    )
