"""Published reference numbers, reported alongside our own results.

None of these are recomputed here. The QLSTM and LSTM-QNN models are not
implemented in this package; their figures are the values reported in their
original publications. The two ``*_weather_reported`` entries are the
published full-scale QLIF and classical LIF results on the hourly weather task.
"""

LITERATURE = {
    "qlstm_bangkok_pm25": {
        "model": "QLSTM (variational quantum LSTM)",
        "dataset": "Bangkok PM2.5, daily",
        "mae": 11.24,
        "rmse": 15.06,
        "epochs": 100,
        "units": "ug/m^3",
    },
    "classical_lstm_bangkok_pm25": {
        "model": "Classical LSTM (as reported with QLSTM)",
        "dataset": "Bangkok PM2.5, daily",
        "mae": 21.50,
        "epochs": 100,
        "units": "ug/m^3",
    },
    "lstm_qnn_wind_100m": {
        "model": "LSTM-QNN (LSTM encoder + variational QNN)",
        "dataset": "Hourly 100 m wind speed",
        "rmse": 3.92,
        "mae": 2.87,
        "train_time_min": 65.3,
        "units": "km/h",
    },
    "qlif_weather_reported": {
        "model": "QLIF network, reported",
        "dataset": "Hourly weather, 4 variables",
        "mse": 17_897,
        "mae": 35.54,
        "rmse": 133.8,
        "r2": 0.896,
        "train_time_s": 87,
        "epochs": 12,
    },
    "lif_weather_reported": {
        "model": "Classical LIF network, reported",
        "dataset": "Hourly weather, 4 variables",
        "mse": 21_152,
        "mae": 37.18,
        "rmse": 145.4,
        "r2": 0.877,
        "train_time_s": 36,
        "epochs": 12,
    },
}

PHASE_REFERENCES = {
    "phase1": ["qlif_weather_reported", "lif_weather_reported"],
    "phase2a": ["qlstm_bangkok_pm25", "classical_lstm_bangkok_pm25"],
    "phase2b": ["lstm_qnn_wind_100m"],
    "custom": [],
}


def footer(phase: str) -> str:
    keys = PHASE_REFERENCES.get(phase, [])
    if not keys:
        return ""
    lines = ["Literature values (published, not reproduced here):"]
    for k in keys:
        entry = LITERATURE[k]
        stats = ", ".join(f"{n}={v}" for n, v in entry.items() if n not in ("model", "dataset"))
        lines.append(f"  {entry['model']} on {entry['dataset']}: {stats}")
    return "\n".join(lines)
