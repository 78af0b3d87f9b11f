"""Synthetic weather/load/price generator.

Produces schema-conformant hourly CSV with a learnable structure: load
follows a diurnal cycle coupled to temperature plus a little noise, and
price has an evening peak.  Everything is driven by one seeded
generator and written with fixed formatting, so a given config always
yields byte-identical output.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import datetime, timedelta

import numpy as np

from .ingest import LOAD_COLUMN, PRICE_COLUMN, REQUIRED_COLUMNS


@dataclass(frozen=True)
class SynthConfig:
    days: int = 30
    seed: int = 0
    start: datetime = datetime(2024, 1, 1, 0, 0)
    base_load_kwh: float = 900.0
    load_amplitude_kwh: float = 250.0     # diurnal swing, peak near 17:00
    temp_coupling_kwh_per_deg: float = 12.0
    load_noise_kwh: float = 15.0
    base_price_c: float = 5.0
    evening_peak_c: float = 6.0           # Gaussian bump centred near 18:30
    evening_peak_hour: float = 18.5
    price_noise_c: float = 0.15
    include_price: bool = True

    def __post_init__(self):
        if self.days < 3:
            raise ValueError(f"need at least 3 days for lag windows, got {self.days}")


def generate_rows(config: SynthConfig) -> list[dict]:
    rng = np.random.default_rng(config.seed)
    n = config.days * 24
    t = np.arange(n)
    hour = t % 24
    day = t // 24

    temperature = (
        18.0
        + 4.0 * np.sin(2 * np.pi * day / 30.0)
        + 7.0 * np.cos(2 * np.pi * (hour - 15) / 24.0)
        + rng.normal(0.0, 0.6, size=n)
    )
    wind_speed = np.clip(
        5.0
        + 2.5 * np.sin(2 * np.pi * (hour - 3) / 24.0)
        + rng.normal(0.0, 0.8, size=n),
        0.0,
        None,
    )
    dew_point = temperature - 4.0 - np.abs(rng.normal(0.0, 1.5, size=n))
    heat_index = temperature + np.maximum(0.0, 0.4 * (dew_point - 14.0))
    cold_index = temperature - 0.4 * wind_speed

    load = np.clip(
        config.base_load_kwh
        + config.load_amplitude_kwh * np.cos(2 * np.pi * (hour - 17) / 24.0)
        + config.temp_coupling_kwh_per_deg * (temperature - 18.0)
        + rng.normal(0.0, config.load_noise_kwh, size=n),
        50.0,
        None,
    )
    price = np.clip(
        config.base_price_c
        + config.evening_peak_c
        * np.exp(-((hour - config.evening_peak_hour) ** 2) / (2 * 2.0**2))
        + rng.normal(0.0, config.price_noise_c, size=n),
        0.5,
        None,
    )

    rows = []
    for i in range(n):
        stamp = config.start + timedelta(hours=i)
        row = {
            "timestamp": stamp.isoformat(),
            "wind_speed": f"{wind_speed[i]:.2f}",
            "temperature": f"{temperature[i]:.2f}",
            "heat_index": f"{heat_index[i]:.2f}",
            "cold_index": f"{cold_index[i]:.2f}",
            "dew_point": f"{dew_point[i]:.2f}",
            LOAD_COLUMN: f"{load[i]:.3f}",
        }
        if config.include_price:
            row[PRICE_COLUMN] = f"{price[i]:.3f}"
        rows.append(row)
    return rows


def write_csv(config: SynthConfig, path) -> None:
    fieldnames = list(REQUIRED_COLUMNS)
    if config.include_price:
        fieldnames.append(PRICE_COLUMN)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(generate_rows(config))
