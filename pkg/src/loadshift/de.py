"""Differential evolution (rand/1/bin) on the same problem and budget as
the swarm, for head-to-head comparisons.

The scale factor is not fixed: it is resampled uniformly from
``beta_range`` for every mutation.  Selection is greedy and strict, so a
trial only replaces its parent when it is genuinely better.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .common import init_positions, make_result
from .errors import NonDistinctParents
from .objective import evaluate_batch
from .profiles import DrProblem, OptimizationResult, TracePoint


@dataclass
class DeConfig:
    population_size: int = 50
    iterations: int = 100
    beta_range: tuple[float, float] = (0.2, 0.8)
    crossover_probability: float = 0.7
    seed: int = 0
    seed_with_predicted: bool = True

    def __post_init__(self) -> None:
        if self.population_size < 4:
            # rand/1 needs a target plus three distinct parents
            raise ValueError(f"population_size must be >= 4, got {self.population_size}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        lo, hi = self.beta_range
        if not 0.0 < lo <= hi:
            raise ValueError(f"beta_range must satisfy 0 < lo <= hi, got {self.beta_range}")
        if not 0.0 <= self.crossover_probability <= 1.0:
            raise ValueError(
                f"crossover_probability must be in [0, 1], got {self.crossover_probability}"
            )


def mutate(
    population: np.ndarray,
    a: int,
    b: int,
    c: int,
    beta: float,
    lower: np.ndarray,
    upper: np.ndarray,
) -> np.ndarray:
    """Donor vector pop[a] + beta * (pop[b] - pop[c]), clamped into the box."""
    if len({a, b, c}) != 3:
        raise NonDistinctParents(f"parent indices must be distinct, got {(a, b, c)}")
    donor = population[a] + beta * (population[b] - population[c])
    return np.clip(donor, lower, upper)


def crossover(
    target: np.ndarray,
    donor: np.ndarray,
    crossover_probability: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Binomial crossover with one forced donor component so the trial
    always differs from the target in at least one position."""
    n = len(target)
    forced = rng.integers(n)
    r = rng.uniform(size=n)
    take_donor = (r <= crossover_probability) | (np.arange(n) == forced)
    return np.where(take_donor, donor, target)


def optimize(
    problem: DrProblem,
    config: Optional[DeConfig] = None,
    on_iteration: Optional[Callable[[int, np.ndarray], None]] = None,
) -> OptimizationResult:
    """Run DE/rand/1/bin and return the best schedule found.

    Each generation builds all trial vectors first (drawing parents,
    scale factor, and crossover mask per member in index order), scores
    them in one batch, then applies greedy replacement member by member.
    """
    if config is None:
        config = DeConfig()
    rng = np.random.default_rng(config.seed)
    lower = problem.lower_bounds
    upper = problem.upper_bounds
    size = config.population_size
    beta_lo, beta_hi = config.beta_range

    population = init_positions(problem, size, rng, config.seed_with_predicted)
    cost, shift, viol, obj = evaluate_batch(problem, population)
    objectives = obj.copy()

    best = int(np.argmin(objectives))
    best_position = population[best].copy()
    best_objective = float(objectives[best])
    best_cost = float(cost[best])
    best_shift = float(shift[best])
    best_violation = float(viol[best])

    trace = [TracePoint(0, best_objective, best_cost, best_shift, best_violation)]
    if on_iteration is not None:
        on_iteration(0, population)

    indices = np.arange(size)
    for iteration in range(1, config.iterations + 1):
        trials = np.empty_like(population)
        for i in range(size):
            a, b, c = rng.choice(np.delete(indices, i), size=3, replace=False)
            beta = rng.uniform(beta_lo, beta_hi)
            donor = mutate(population, int(a), int(b), int(c), float(beta), lower, upper)
            trials[i] = crossover(population[i], donor, config.crossover_probability, rng)
        cost, shift, viol, obj = evaluate_batch(problem, trials)
        for i in range(size):
            if obj[i] < objectives[i]:
                population[i] = trials[i]
                objectives[i] = obj[i]
                if obj[i] < best_objective:
                    best_objective = float(obj[i])
                    best_position = trials[i].copy()
                    best_cost = float(cost[i])
                    best_shift = float(shift[i])
                    best_violation = float(viol[i])
        trace.append(
            TracePoint(iteration, best_objective, best_cost, best_shift, best_violation)
        )
        if on_iteration is not None:
            on_iteration(iteration, population)

    return make_result(problem, best_position, trace, config.seed)
