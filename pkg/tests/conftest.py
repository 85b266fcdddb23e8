from pathlib import Path

import pytest

from laborshare import data_io

DATA = data_io.BUNDLED_DATA_DIR


@pytest.fixture(scope="session")
def data_path():
    return DATA


@pytest.fixture(scope="session")
def us_age():
    return data_io.load_series(DATA / "median_age_us.csv", "median_age")


@pytest.fixture(scope="session")
def us_dataset(us_age):
    labor = data_io.load_series(DATA / "labor_share_us_fed.csv", "labor_share")
    return data_io.align(labor, us_age, country="US-Fed", source="fed")


def write_csv(tmp_path: Path, name: str, text: str) -> Path:
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path
