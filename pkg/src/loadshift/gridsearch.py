"""Exhaustive grid search over a handful of free hours.

This is the reference answer the stochastic optimizers are judged
against.  All but a few hours are pinned to the predicted profile, the
free hours are discretized between their bounds, and every combination
is evaluated.  No randomness anywhere, so the result is a fixed point
for a given problem.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridTooLarge
from .objective import evaluate_batch
from .profiles import HOURS_PER_DAY, DrProblem, HourlyProfile, load_profile

MAX_GRID_POINTS = 10_000_000
_CHUNK = 65_536


@dataclass(frozen=True)
class ReducedProblem:
    """A DrProblem with at most four hours left free to vary.

    ``free_hours`` are hour indices 0..23; every other hour is pinned to
    the predicted value (clamped into its bounds).  Each free hour gets
    ``grid_resolution`` evenly spaced candidates from its lower to its
    upper bound, endpoints included.
    """

    base: DrProblem
    free_hours: tuple
    grid_resolution: int

    def __post_init__(self):
        hours = tuple(int(h) for h in self.free_hours)
        if len(hours) == 0 or len(hours) > 4:
            raise ValueError(f"free_hours must name 1..4 hours, got {len(hours)}")
        if len(set(hours)) != len(hours):
            raise ValueError(f"free_hours must be distinct, got {hours}")
        if any(h < 0 or h >= HOURS_PER_DAY for h in hours):
            raise ValueError(f"free_hours must lie in 0..23, got {hours}")
        if self.grid_resolution < 2:
            raise ValueError(f"grid_resolution must be >= 2, got {self.grid_resolution}")
        object.__setattr__(self, "free_hours", tuple(sorted(hours)))
        if self.n_points > MAX_GRID_POINTS:
            raise GridTooLarge(
                f"{self.n_points} grid points exceed the {MAX_GRID_POINTS} cap"
            )

    @property
    def n_points(self) -> int:
        return self.grid_resolution ** len(self.free_hours)

    def pinned_schedule(self) -> np.ndarray:
        """Predicted profile clamped into the box; free hours overwritten
        during the search."""
        return np.clip(
            self.base.predicted.values, self.base.lower_bounds, self.base.upper_bounds
        )


def pinned_problem(reduced: ReducedProblem) -> DrProblem:
    """The same objective restricted to the free hours: bounds of every
    pinned hour collapse to the pinned value.  Normalizers are kept from
    the base problem so objective values stay comparable."""
    base = reduced.base
    pin = reduced.pinned_schedule()
    lower = pin.copy()
    upper = pin.copy()
    for h in reduced.free_hours:
        lower[h] = base.lower_bounds[h]
        upper[h] = base.upper_bounds[h]
    return DrProblem(
        predicted=base.predicted,
        prices=base.prices,
        lower_bounds=lower,
        upper_bounds=upper,
        w1=base.w1,
        w2=base.w2,
        alpha=base.alpha,
        e_cmax=base.e_cmax,
        l_shmax=base.l_shmax,
        symmetric_violation=base.symmetric_violation,
    )


def grid_search(reduced: ReducedProblem) -> tuple[HourlyProfile, float]:
    """Best schedule over the full grid, ties broken toward the
    lexicographically smallest combination (first free hour lowest).

    Candidates are enumerated in ascending lexicographic order and only a
    strictly better objective displaces the incumbent, so the first best
    point encountered wins.  Work proceeds in chunks to bound memory.
    """
    base = reduced.base
    hours = reduced.free_hours
    res = reduced.grid_resolution
    grids = [
        np.linspace(base.lower_bounds[h], base.upper_bounds[h], res) for h in hours
    ]
    pinned = reduced.pinned_schedule()

    total = reduced.n_points
    # mixed-radix decode: first free hour is the most significant digit,
    # so ascending flat index == ascending lexicographic order
    radix = np.array(
        [res ** (len(hours) - 1 - k) for k in range(len(hours))], dtype=np.int64
    )

    best_objective = np.inf
    best_schedule = None
    for start in range(0, total, _CHUNK):
        flat = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        schedules = np.tile(pinned, (len(flat), 1))
        for k, h in enumerate(hours):
            digit = (flat // radix[k]) % res
            schedules[:, h] = grids[k][digit]
        _, _, _, obj = evaluate_batch(base, schedules)
        i = int(np.argmin(obj))
        if obj[i] < best_objective:
            best_objective = float(obj[i])
            best_schedule = schedules[i].copy()

    return load_profile(best_schedule), best_objective
