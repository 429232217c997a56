import numpy as np
import pytest

from qlif_forecast import synthetic


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def weather_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "weather.csv"
    synthetic.write("weather", path, seed=0)
    return path


@pytest.fixture(scope="session")
def small_weather_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "weather_small.csv"
    synthetic.write("weather", path, seed=3, n_rows=700)
    return path


@pytest.fixture(scope="session")
def air_quality_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "air_quality.csv"
    synthetic.write("air_quality", path, seed=0)
    return path


@pytest.fixture(scope="session")
def wind_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "wind.csv"
    synthetic.write("wind", path, seed=0)
    return path


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE

    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
