"""CSV ingestion, validation and alignment of yearly series.

File formats (UTF-8, comma separated, ``#`` lines ignored):

* labor share: ``year,value`` with value a fraction or a percent
* median age:  ``year,value`` with value in years
* cognition:   ``country,score_50s,score_70s,year_basis``
* manifest:    ``country,labor_csv,age_csv,source`` (paths relative to the manifest)
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import AlignmentError, ParseError, ValidationError
from .model import ModelParams, equilibrium_labor_share

PERCENT_THRESHOLD = 1.5
MIN_ALIGNED = 3
MEDIAN_AGE_RANGE = (10.0, 60.0)

SCHEMAS = ("labor_share", "median_age", "cognition")
_HEADERS = {
    "labor_share": ["year", "value"],
    "median_age": ["year", "value"],
    "cognition": ["country", "score_50s", "score_70s", "year_basis"],
    "manifest": ["country", "labor_csv", "age_csv", "source"],
}

BUNDLED_DATA_DIR = Path(__file__).resolve().parent / "data"


def data_dir() -> Path:
    """Bundled-data directory, overridable with ``LABORSHARE_DATA_DIR``."""
    override = os.environ.get("LABORSHARE_DATA_DIR")
    return Path(override) if override else BUNDLED_DATA_DIR


@dataclass(frozen=True)
class TimeSeries:
    label: str
    years: tuple[int, ...]
    values: tuple[float, ...]
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "years", tuple(int(y) for y in self.years))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.years) != len(self.values):
            raise ValidationError(f"{self.label}: {len(self.years)} years but {len(self.values)} values")
        for prev, cur in zip(self.years, self.years[1:]):
            if cur == prev:
                raise ValidationError(f"{self.label}: duplicate year {cur}")
            if cur < prev:
                raise ValidationError(f"{self.label}: years not increasing ({prev} then {cur})")
        for year, value in zip(self.years, self.values):
            if not math.isfinite(value):
                raise ValidationError(f"{self.label}: non-finite value in {year}")

    @classmethod
    def from_points(cls, label: str, points: Iterable[tuple[int, float]], notes=()) -> "TimeSeries":
        points = list(points)
        return cls(label, tuple(p[0] for p in points), tuple(p[1] for p in points), tuple(notes))

    @property
    def points(self) -> list[tuple[int, float]]:
        return list(zip(self.years, self.values))

    def __len__(self):
        return len(self.years)

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.years, self.values))

    def window(self, start: int, end: int) -> "TimeSeries":
        pts = [(y, v) for y, v in self.points if start <= y <= end]
        return TimeSeries.from_points(self.label, pts, self.notes)

    def value_at(self, year: float) -> float:
        """Linear interpolation between yearly points; no extrapolation."""
        if not self.years[0] <= year <= self.years[-1]:
            raise ValidationError(f"{self.label}: year {year} outside {self.years[0]}-{self.years[-1]}")
        return float(np.interp(year, self.years, self.values))


@dataclass(frozen=True)
class CountryDataset:
    country: str
    labor_share: TimeSeries
    median_age: TimeSeries
    source: str = ""
    dropped_labor: int = 0
    dropped_age: int = 0

    def __post_init__(self):
        if self.labor_share.years != self.median_age.years:
            raise AlignmentError(f"{self.country}: labor share and median age years differ; use align()")
        if len(self.labor_share) < MIN_ALIGNED:
            raise AlignmentError(
                f"{self.country}: {len(self.labor_share)} aligned years, need at least {MIN_ALIGNED}"
            )
        for year, v in self.labor_share.points:
            if not 0 < v < 1:
                raise ValidationError(f"{self.country}: labor share {v} in {year} outside (0, 1)")
        lo, hi = MEDIAN_AGE_RANGE
        for year, v in self.median_age.points:
            if not lo < v < hi:
                raise ValidationError(f"{self.country}: median age {v} in {year} outside ({lo:g}, {hi:g})")

    @property
    def years(self) -> tuple[int, ...]:
        return self.labor_share.years

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(median ages, observed shares) as float arrays."""
        return np.asarray(self.median_age.values), np.asarray(self.labor_share.values)


@dataclass(frozen=True)
class CognitionRecord:
    country: str
    score_50s: float
    score_70s: float
    year_basis: str = ""
    flags: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not (self.score_50s > 0 and self.score_70s > 0):
            raise ValidationError(f"{self.country}: cognition scores must be positive")
        if self.score_70s > self.score_50s and not self.flags:
            object.__setattr__(self, "flags", ("score_70s exceeds score_50s",))


@dataclass(frozen=True)
class ManifestEntry:
    country: str
    labor_csv: Path
    age_csv: Path
    source: str


def _rows(path: Path, header: list[str]) -> Iterator[tuple[int, list[str]]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ParseError("file not found", path) from None
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot read file ({exc})", path) from None
    seen_header = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        cells = [c.strip() for c in next(csv.reader([line]))]
        if not seen_header:
            if [c.lower() for c in cells] != header:
                raise ParseError(f"expected header {','.join(header)!r}, got {line!r}", path, lineno)
            seen_header = True
            continue
        if len(cells) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(cells)}", path, lineno)
        yield lineno, cells
    if not seen_header:
        raise ParseError("missing header", path)


def _number(text: str, path, lineno, what, kind=float):
    try:
        value = kind(text)
    except ValueError:
        raise ParseError(f"invalid {what} {text!r}", path, lineno) from None
    if kind is float and not math.isfinite(value):
        raise ParseError(f"non-finite {what} {text!r}", path, lineno)
    return value


def _load_yearly(path: Path, label: str) -> TimeSeries:
    years: list[int] = []
    values: list[float] = []
    seen: dict[int, int] = {}
    for lineno, (y, v) in _rows(path, _HEADERS["labor_share"]):
        year = _number(y, path, lineno, "year", int)
        if year in seen:
            raise ValidationError(f"{path}:{lineno}: duplicate year {year} (first on line {seen[year]})")
        seen[year] = lineno
        if years and year < years[-1]:
            raise ValidationError(f"{path}:{lineno}: year {year} out of order")
        years.append(year)
        values.append(_number(v, path, lineno, "value"))
    if not years:
        raise ValidationError(f"{path}: no data rows")
    return TimeSeries(label, tuple(years), tuple(values))


def normalize_percent(series: TimeSeries) -> TimeSeries:
    """Convert a percent-valued series to fractions when every value exceeds 1.5."""
    if series.values and all(v > PERCENT_THRESHOLD for v in series.values):
        note = f"values read as percent and divided by 100 (all > {PERCENT_THRESHOLD})"
        return TimeSeries(series.label, series.years, tuple(v / 100.0 for v in series.values), series.notes + (note,))
    return series


def load_series(path, schema: str, label: str | None = None):
    """Load one file.

    Returns a ``TimeSeries`` for ``labor_share``/``median_age`` and a list of
    ``CognitionRecord`` for ``cognition``.
    """
    path = Path(path)
    if schema not in SCHEMAS:
        raise ValueError(f"unknown schema {schema!r}; expected one of {SCHEMAS}")
    label = label or path.stem
    if schema == "cognition":
        return load_cognition(path)
    series = _load_yearly(path, label)
    if schema == "labor_share":
        series = normalize_percent(series)
        for year, v in series.points:
            if not 0 < v < 1:
                raise ValidationError(f"{path}: labor share {v} in {year} outside (0, 1)")
    else:
        lo, hi = MEDIAN_AGE_RANGE
        for year, v in series.points:
            if not lo < v < hi:
                raise ValidationError(f"{path}: median age {v} in {year} outside ({lo:g}, {hi:g})")
    return series


def load_cognition(path) -> list[CognitionRecord]:
    path = Path(path)
    records = []
    seen = set()
    for lineno, (country, s50, s70, basis) in _rows(path, _HEADERS["cognition"]):
        if country in seen:
            raise ValidationError(f"{path}:{lineno}: duplicate country {country!r}")
        seen.add(country)
        score_50s = _number(s50, path, lineno, "score_50s")
        score_70s = _number(s70, path, lineno, "score_70s")
        try:
            records.append(CognitionRecord(country, score_50s, score_70s, basis))
        except ValidationError as exc:
            raise ValidationError(f"{path}:{lineno}: {exc}") from None
    return records


def load_manifest(path) -> list[ManifestEntry]:
    path = Path(path)
    base = path.parent
    entries = [
        ManifestEntry(country, base / labor, base / age, source)
        for _, (country, labor, age, source) in _rows(path, _HEADERS["manifest"])
    ]
    return entries


def format_series(series: TimeSeries) -> str:
    """Canonical CSV text: ``year,value`` with ``repr``-exact floats."""
    buf = io.StringIO()
    buf.write("year,value\n")
    for year, value in series.points:
        buf.write(f"{year},{value!r}\n")
    return buf.getvalue()


def write_series(series: TimeSeries, path) -> None:
    Path(path).write_text(format_series(series), encoding="utf-8")


def align(labor: TimeSeries, age: TimeSeries, country: str | None = None, source: str = "") -> CountryDataset:
    """Inner join on year."""
    if not len(labor) or not len(age):
        raise AlignmentError("cannot align an empty series")
    common = sorted(set(labor.years) & set(age.years))
    if len(common) < MIN_ALIGNED:
        raise AlignmentError(
            f"{labor.label} / {age.label}: {len(common)} common years, need at least {MIN_ALIGNED}"
        )
    lab, ag = labor.as_dict(), age.as_dict()
    return CountryDataset(
        country=country or labor.label,
        labor_share=TimeSeries(labor.label, tuple(common), tuple(lab[y] for y in common), labor.notes),
        median_age=TimeSeries(age.label, tuple(common), tuple(ag[y] for y in common), age.notes),
        source=source,
        dropped_labor=len(labor) - len(common),
        dropped_age=len(age) - len(common),
    )


def load_country(entry: ManifestEntry) -> CountryDataset:
    labor = load_series(entry.labor_csv, "labor_share", label=f"{entry.country} labor share")
    age = load_series(entry.age_csv, "median_age", label=f"{entry.country} median age")
    return align(labor, age, country=entry.country, source=entry.source)


def synthesize(
    params: ModelParams,
    age_path: TimeSeries,
    noise_sd: float,
    seed: int,
    country: str = "synthetic",
) -> CountryDataset:
    """Model labor share along ``age_path`` plus Gaussian noise."""
    if noise_sd < 0:
        raise ValueError("noise_sd must be >= 0")
    clean = [equilibrium_labor_share(params, mu) for mu in age_path.values]
    noise = np.random.default_rng(seed).normal(0.0, noise_sd, size=len(clean)) if noise_sd > 0 else np.zeros(len(clean))
    labor = TimeSeries(f"{country} labor share", age_path.years, tuple(c + e for c, e in zip(clean, noise)))
    return CountryDataset(country, labor, age_path, source=f"synthetic(seed={seed}, noise_sd={noise_sd!r})")
