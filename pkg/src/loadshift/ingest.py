"""CSV ingestion, [-1, 1] scaling, and supervised window construction.

Expected CSV schema (header required, ISO-8601 local timestamps, hourly):

    timestamp,wind_speed,temperature,heat_index,cold_index,dew_point,load_kwh[,price_c_per_kwh]

The price column is optional and only needed for demand-response runs.
Scaling statistics are always fit on training rows only; test rows never
influence them. All functions here are pure over immutable inputs.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import (
    DegenerateFeature,
    InsufficientData,
    MissingColumn,
    NonHourlyCadence,
    UnparseableRow,
)
from .profiles import WEATHER_FEATURES, Dataset

LOAD_COLUMN = "load_kwh"
PRICE_COLUMN = "price_c_per_kwh"
REQUIRED_COLUMNS = ("timestamp",) + WEATHER_FEATURES + (LOAD_COLUMN,)

DEFAULT_LAG = 24
HORIZON_HOURS = 24


@dataclass(frozen=True)
class FeatureScale:
    """Min/max of one feature over the training rows."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)) or self.hi <= self.lo:
            raise ValueError(f"invalid feature scale [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class NormalizationStats:
    """Per-feature scaling for the five weather signals plus the load."""

    scales: Mapping[str, FeatureScale]

    def __post_init__(self):
        object.__setattr__(self, "scales", dict(self.scales))
        for name in WEATHER_FEATURES + (LOAD_COLUMN,):
            if name not in self.scales:
                raise ValueError(f"missing scale for feature {name!r}")

    def __getitem__(self, name: str) -> FeatureScale:
        return self.scales[name]

    def to_json_dict(self) -> dict:
        return {name: [scale.lo, scale.hi] for name, scale in sorted(self.scales.items())}

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "NormalizationStats":
        return cls({name: FeatureScale(lo, hi) for name, (lo, hi) in data.items()})


@dataclass(frozen=True)
class TrainingWindow:
    """One supervised example: weather at the target hour plus lagged loads.

    ``features`` holds raw units: the 5 weather values observed at the
    target hour followed by ``lag`` hourly loads ending 24 hours before
    the target. ``target`` is the load 24 hours after the last lagged
    observation. Windows that touch any test row belong to the test set.
    """

    features: np.ndarray
    target: float
    target_timestamp: datetime
    is_test: bool


def normalize(x, scale: FeatureScale):
    """Map scale.lo -> -1 and scale.hi -> +1 linearly; no clamping."""
    return -1.0 + 2.0 * (x - scale.lo) / (scale.hi - scale.lo)


def denormalize(y, scale: FeatureScale):
    """Exact inverse of normalize."""
    return scale.lo + (y + 1.0) * (scale.hi - scale.lo) / 2.0


def load_dataset(
    path,
    schema: Optional[Mapping[str, str]] = None,
    *,
    split_boundary: Optional[datetime] = None,
    split_fraction: float = 0.85,
    allow_gaps: bool = False,
) -> Dataset:
    """Parse an hourly CSV time series into a validated Dataset.

    ``schema`` maps canonical column names to the file's actual header
    names (identity by default). Without ``split_boundary`` the split is
    chronological at ``split_fraction`` of the rows.
    """
    column_of = dict(schema) if schema else {}
    name = lambda canonical: column_of.get(canonical, canonical)

    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        for canonical in REQUIRED_COLUMNS:
            if name(canonical) not in header:
                raise MissingColumn(name(canonical))
        has_price = name(PRICE_COLUMN) in header

        rows = []
        for record in reader:
            line = reader.line_num
            try:
                ts = datetime.fromisoformat(record[name("timestamp")].strip())
            except (ValueError, AttributeError) as exc:
                raise UnparseableRow(line, f"bad timestamp: {exc}") from exc
            values = {}
            for canonical in WEATHER_FEATURES + (LOAD_COLUMN,) + ((PRICE_COLUMN,) if has_price else ()):
                raw = record[name(canonical)]
                try:
                    value = float(raw)
                except (TypeError, ValueError) as exc:
                    raise UnparseableRow(line, f"bad value {raw!r} in column {name(canonical)!r}") from exc
                if not np.isfinite(value):
                    raise UnparseableRow(line, f"non-finite value in column {name(canonical)!r}")
                values[canonical] = value
            if values[LOAD_COLUMN] < 0:
                raise UnparseableRow(line, "negative load")
            if has_price and values[PRICE_COLUMN] < 0:
                raise UnparseableRow(line, "negative price")
            rows.append((ts, values))

    if len(rows) < 2:
        raise InsufficientData(f"dataset {path} has {len(rows)} rows; need at least 2")

    rows.sort(key=lambda item: item[0])
    timestamps = [ts for ts, _ in rows]

    gap_after = set()
    hour = timedelta(hours=1)
    for i in range(len(timestamps) - 1):
        step = timestamps[i + 1] - timestamps[i]
        if step == hour:
            continue
        if step <= timedelta(0):
            raise NonHourlyCadence(timestamps[i + 1], "duplicate or out-of-order timestamp")
        if not allow_gaps:
            raise NonHourlyCadence(
                timestamps[i + 1],
                f"expected {timestamps[i] + hour} one hour after {timestamps[i]}",
            )
        gap_after.add(i)

    if split_boundary is None:
        cut = int(split_fraction * len(rows))
        split_boundary = timestamps[cut] if cut < len(rows) else timestamps[-1] + hour

    weather = np.array([[vals[f] for f in WEATHER_FEATURES] for _, vals in rows])
    load = np.array([vals[LOAD_COLUMN] for _, vals in rows])
    price = np.array([vals[PRICE_COLUMN] for _, vals in rows]) if has_price else None
    return Dataset(
        timestamps=tuple(timestamps),
        weather=weather,
        load=load,
        price=price,
        split_boundary=split_boundary,
        gap_after=frozenset(gap_after),
    )


def fit_normalizer(dataset: Dataset, indices: Optional[Sequence[int]] = None) -> NormalizationStats:
    """Min/max per feature over the training rows (or an explicit row set)."""
    if indices is None:
        indices = [i for i in range(len(dataset)) if dataset.is_train_row(i)]
    indices = list(indices)
    if len(indices) < 2:
        raise InsufficientData(f"need at least 2 training rows to fit scaling, have {len(indices)}")

    scales = {}
    columns = {name: dataset.weather[indices, j] for j, name in enumerate(WEATHER_FEATURES)}
    columns[LOAD_COLUMN] = dataset.load[indices]
    for name, column in columns.items():
        lo, hi = float(np.min(column)), float(np.max(column))
        if hi <= lo:
            raise DegenerateFeature(name)
        scales[name] = FeatureScale(lo, hi)
    return NormalizationStats(scales)


def build_windows(dataset: Dataset, lag: int = DEFAULT_LAG) -> list:
    """All supervised windows the dataset supports, in target-time order.

    A window is valid when its ``lag`` load rows are contiguous hours and
    a row exists exactly 24 hours after the last of them. For a gap-free
    dataset this yields max(0, rows - lag - 24 + 1) windows.
    """
    if lag < 1:
        raise ValueError("lag must be >= 1")
    n = len(dataset)
    windows = []
    for t in range(lag - 1, n):
        if any(i in dataset.gap_after for i in range(t - lag + 1, t)):
            continue
        target_index = dataset.index_of(dataset.timestamps[t] + timedelta(hours=HORIZON_HOURS))
        if target_index is None:
            continue
        features = np.concatenate([
            dataset.weather[target_index],
            dataset.load[t - lag + 1 : t + 1],
        ])
        windows.append(
            TrainingWindow(
                features=features,
                target=float(dataset.load[target_index]),
                target_timestamp=dataset.timestamps[target_index],
                is_test=not dataset.is_train_row(target_index),
            )
        )
    if not windows:
        raise InsufficientData(
            f"dataset too short for lag={lag}: need {lag + HORIZON_HOURS} gap-free rows"
        )
    return windows


def split_windows(windows: Iterable[TrainingWindow]) -> tuple:
    """(train, test) partition of the windows."""
    train = [w for w in windows if not w.is_test]
    test = [w for w in windows if w.is_test]
    return train, test


def window_matrix(windows: Sequence[TrainingWindow], stats: NormalizationStats) -> tuple:
    """Stack windows into normalized (X, y) arrays for training.

    Weather columns use their own scales; lag columns and the target use
    the load scale, so the target lives in a tanh-friendly range.
    """
    if not windows:
        raise InsufficientData("no windows to assemble")
    X = np.stack([w.features for w in windows]).astype(float)
    y = np.array([w.target for w in windows], dtype=float)
    for j, name in enumerate(WEATHER_FEATURES):
        X[:, j] = normalize(X[:, j], stats[name])
    load_scale = stats[LOAD_COLUMN]
    X[:, len(WEATHER_FEATURES):] = normalize(X[:, len(WEATHER_FEATURES):], load_scale)
    return X, normalize(y, load_scale)
