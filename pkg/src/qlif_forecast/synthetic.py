"""Seeded stand-in datasets with the column layouts of the public sources.

The real files (hourly weather history, Bangkok WAQI daily air quality,
Open-Meteo 100 m wind speed) are not redistributed here. These generators
write CSVs with the same headers and plausible dynamics so the whole pipeline
runs offline; point the CLI at the real files to use them instead.
"""

from __future__ import annotations

import numpy as np
import pandas as pd

WEATHER_COLUMNS = [
    "Formatted Date",
    "Summary",
    "Precip Type",
    "Temperature (C)",
    "Apparent Temperature (C)",
    "Humidity",
    "Wind Speed (km/h)",
    "Wind Bearing (degrees)",
    "Visibility (km)",
    "Loud Cover",
    "Pressure (millibars)",
    "Daily Summary",
]


def _ar1(rng, n, rho, sigma):
    shocks = rng.normal(0.0, sigma, n)
    out = np.empty(n)
    acc = shocks[0] / np.sqrt(1 - rho**2)
    for i in range(n):
        acc = rho * acc + shocks[i]
        out[i] = acc
    return out


def weather_frame(n_rows: int = 96_453, seed: int = 0) -> pd.DataFrame:
    rng = np.random.default_rng(seed)
    t = np.arange(n_rows)
    hours = t % 24
    day = t / 24.0
    seasonal = 11.0 - 10.0 * np.cos(2 * np.pi * (day + 100) / 365.25)
    diurnal = 4.5 * np.sin(2 * np.pi * (hours - 9) / 24.0)
    synoptic = _ar1(rng, n_rows, 0.995, 0.18)
    temp = seasonal + diurnal * (1 + 0.2 * np.sin(2 * np.pi * day / 365.25)) + synoptic + _ar1(rng, n_rows, 0.8, 0.35)

    pressure = 1016.0 - 1.5 * synoptic + _ar1(rng, n_rows, 0.998, 0.22) - 0.6 * np.sin(2 * np.pi * hours / 12.0)
    humidity = np.clip(0.74 - 0.035 * diurnal - 0.004 * (seasonal - 11) + _ar1(rng, n_rows, 0.97, 0.02), 0.15, 1.0)
    wind = np.abs(10.0 + 2.5 * np.sin(2 * np.pi * (hours - 14) / 24.0) + _ar1(rng, n_rows, 0.96, 1.1) - 0.4 * (pressure - 1016.0))

    stamps = pd.date_range("2006-04-01", periods=n_rows, freq="h")
    frame = pd.DataFrame(
        {
            "Formatted Date": stamps.strftime("%Y-%m-%d %H:%M:%S.000 +0200"),
            "Summary": np.where(humidity > 0.85, "Foggy", "Partly Cloudy"),
            "Precip Type": np.where(temp < 0, "snow", "rain"),
            "Temperature (C)": temp.round(6),
            "Apparent Temperature (C)": (temp - 0.1 * wind).round(6),
            "Humidity": humidity.round(4),
            "Wind Speed (km/h)": wind.round(4),
            "Wind Bearing (degrees)": rng.integers(0, 360, n_rows),
            "Visibility (km)": np.clip(15.8 - 8 * (humidity - 0.7), 0, 16.1).round(4),
            "Loud Cover": 0.0,
            "Pressure (millibars)": pressure.round(2),
            "Daily Summary": "Synthetic series.",
        }
    )
    return frame[WEATHER_COLUMNS]


def air_quality_frame(n_rows: int = 3_290, seed: int = 0, missing_rate: float = 0.03) -> pd.DataFrame:
    rng = np.random.default_rng(seed)
    day = np.arange(n_rows)
    season = np.cos(2 * np.pi * (day - 20) / 365.25)
    pm25 = np.clip(38 + 30 * season + _ar1(rng, n_rows, 0.85, 9.0), 5, None)
    pm10 = np.clip(0.9 * pm25 / 1.6 + 6 + _ar1(rng, n_rows, 0.7, 4.0), 2, None)
    o3 = np.clip(25 + 8 * season + _ar1(rng, n_rows, 0.6, 6.0), 1, None)
    no2 = np.clip(14 + 5 * season + _ar1(rng, n_rows, 0.7, 3.0), 1, None)
    frame = pd.DataFrame(
        {
            "date": pd.date_range("2016-07-01", periods=n_rows, freq="D").strftime("%Y/%m/%d"),
            "pm25": pm25.round(0),
            "pm10": pm10.round(0),
            "o3": o3.round(0),
            "no2": no2.round(0),
            "so2": np.nan,
            "co": np.nan,
        }
    )
    for col in ("pm25", "pm10", "o3", "no2"):
        holes = rng.random(n_rows) < missing_rate
        holes[:14] = False
        frame.loc[holes, col] = np.nan
    # a few multi-day outages exercise the interpolation branch
    for start in rng.integers(30, n_rows - 30, 4):
        frame.loc[start : start + 5, ["pm10", "o3"]] = np.nan
    return frame


def wind_frame(n_rows: int = 35_064, seed: int = 0) -> pd.DataFrame:
    rng = np.random.default_rng(seed)
    t = np.arange(n_rows)
    base = 18 + 4 * np.cos(2 * np.pi * t / (24 * 365.25)) + 3 * np.sin(2 * np.pi * (t % 24 - 3) / 24)
    speed = np.clip(base + _ar1(rng, n_rows, 0.97, 1.6), 0, None)
    return pd.DataFrame(
        {
            "time": pd.date_range("2020-01-01", periods=n_rows, freq="h").strftime("%Y-%m-%dT%H:%M"),
            "wind_speed_100m (km/h)": speed.round(1),
        }
    )


GENERATORS = {"weather": weather_frame, "air_quality": air_quality_frame, "wind": wind_frame}


def write(kind: str, path, seed: int = 0, **kw) -> None:
    GENERATORS[kind](seed=seed, **kw).to_csv(path, index=False)
