"""Cross-country statistics: RMSE, OLS trend declines, cognitive-decline
aggregation, Pearson correlation and regression through the origin."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .data_io import CognitionRecord, CountryDataset, TimeSeries
from .errors import DegenerateError, DomainError, InsufficientDataError, MismatchError

COGNITION_BAND_YEARS = 20.0  # 50s to 70s, skipping the retirement decade
DECLINE_MODES = ("points", "relative")


@dataclass(frozen=True)
class DeclineRecord:
    country: str
    labor_share_decline_pp: float
    cognitive_decline_pct: float
    window: tuple[int, int]
    outlier: bool = False
    median_age_increase: float = float("nan")
    cognition_decline_pct: float = float("nan")

    def __post_init__(self):
        if not self.window[0] < self.window[1]:
            raise DomainError(f"window start must precede end, got {self.window}")


def rmse(observed: TimeSeries, predicted: TimeSeries) -> float:
    if observed.years != predicted.years:
        raise MismatchError(f"year sets differ: {observed.label!r} vs {predicted.label!r}")
    if not len(observed):
        raise MismatchError("rmse of empty series")
    sq = [(o - p) ** 2 for o, p in zip(observed.values, predicted.values)]
    return math.sqrt(math.fsum(sq) / len(sq))


def ols_slope(series: TimeSeries) -> tuple[float, float]:
    """Least-squares line of value on year: ``(slope, intercept)``."""
    xs = [float(y) for y in series.years]
    ys = list(series.values)
    if len(set(xs)) < 2:
        raise DegenerateError(f"{series.label}: need at least two distinct years")
    n = len(xs)
    xbar = math.fsum(xs) / n
    ybar = math.fsum(ys) / n
    sxx = math.fsum((x - xbar) ** 2 for x in xs)
    sxy = math.fsum((x - xbar) * (y - ybar) for x, y in zip(xs, ys))
    slope = sxy / sxx
    return slope, ybar - slope * xbar


def labor_share_decline(data: CountryDataset | TimeSeries, window: tuple[int, int], mode: str = "points") -> float:
    """Fitted drop in labor share across ``window``.

    ``points`` gives percentage points (-slope * span * 100). ``relative``
    divides the fitted drop by the fitted level at the window start.
    """
    if mode not in DECLINE_MODES:
        raise ValueError(f"mode must be one of {DECLINE_MODES}, got {mode!r}")
    start, end = window
    if not start < end:
        raise DomainError(f"window start must precede end, got {window}")
    series = data.labor_share if isinstance(data, CountryDataset) else data
    inside = series.window(start, end)
    if len(inside) < 2:
        raise InsufficientDataError(f"{series.label}: {len(inside)} points in {start}-{end}, need 2")
    slope, intercept = ols_slope(inside)
    drop = -slope * (end - start)
    if mode == "points":
        return drop * 100.0
    level = slope * start + intercept
    return 100.0 * drop / level


def cognition_decline_pct(cog: CognitionRecord) -> float:
    if not cog.score_50s > 0:
        raise DomainError(f"{cog.country}: score_50s must be positive")
    return 100.0 * (cog.score_50s - cog.score_70s) / cog.score_50s


def aggregate_cognitive_decline(age_increase: float, cog: CognitionRecord) -> float:
    """Median-age increase times the per-year word-recall decline rate, in percent."""
    if not math.isfinite(age_increase):
        raise DomainError(f"age increase must be finite, got {age_increase}")
    return age_increase * cognition_decline_pct(cog) / COGNITION_BAND_YEARS


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    if len(x) != len(y):
        raise MismatchError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise DegenerateError("pearson needs at least two pairs")
    n = len(x)
    mx = math.fsum(x) / n
    my = math.fsum(y) / n
    dx = [v - mx for v in x]
    dy = [v - my for v in y]
    sxx = math.fsum(d * d for d in dx)
    syy = math.fsum(d * d for d in dy)
    if sxx == 0 or syy == 0:
        raise DegenerateError("pearson undefined for zero variance")
    r = math.fsum(a * b for a, b in zip(dx, dy)) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def regression_through_origin(x: Sequence[float], y: Sequence[float]) -> float:
    if len(x) != len(y):
        raise MismatchError(f"length mismatch: {len(x)} vs {len(y)}")
    if not x:
        raise DegenerateError("regression needs at least one pair")
    sxx = math.fsum(v * v for v in x)
    if sxx == 0:
        raise DegenerateError("regression through origin undefined when all x are zero")
    return math.fsum(a * b for a, b in zip(x, y)) / sxx


@dataclass
class CrossCountryResult:
    slope: float
    r_aggregate: float
    r_aggregate_without: float
    r_median_age: float
    r_median_age_without: float
    r_cognition: float
    r_cognition_without: float
    used: list[str] = field(default_factory=list)
    excluded: list[str] = field(default_factory=list)
    slope_without: float = float("nan")

    def correlations(self) -> dict[str, float]:
        return {
            "aggregate_with_reference": self.r_aggregate,
            "aggregate_without_reference": self.r_aggregate_without,
            "median_age_with_reference": self.r_median_age,
            "median_age_without_reference": self.r_median_age_without,
            "cognition_with_reference": self.r_cognition,
            "cognition_without_reference": self.r_cognition_without,
        }


def _correlations(records: Sequence[DeclineRecord]) -> tuple[float, float, float]:
    y = [r.labor_share_decline_pp for r in records]
    return (
        pearson([r.cognitive_decline_pct for r in records], y),
        pearson([r.median_age_increase for r in records], y),
        pearson([r.cognition_decline_pct for r in records], y),
    )


def fig10_analysis(
    records: Sequence[DeclineRecord],
    exclude: Sequence[str] = ("Spain",),
    reference: str = "US-Fed",
) -> CrossCountryResult:
    """Origin-regression slope and correlations of labor-share decline.

    Correlations are computed against aggregate cognitive decline, median-age
    increase alone and cognition decline alone, each with and without the
    ``reference`` record (the second US point from a different source).
    """
    excluded = set(exclude)
    kept = [r for r in records if r.country not in excluded]
    dropped = [r.country for r in records if r.country in excluded]
    if len(kept) < 3:
        raise InsufficientDataError(f"{len(kept)} records after exclusion, need at least 3")
    without = [r for r in kept if r.country != reference]
    if len(without) < 3:
        raise InsufficientDataError(f"{len(without)} records without {reference!r}, need at least 3")

    slope = regression_through_origin(
        [r.cognitive_decline_pct for r in kept], [r.labor_share_decline_pp for r in kept]
    )
    slope_without = regression_through_origin(
        [r.cognitive_decline_pct for r in without], [r.labor_share_decline_pp for r in without]
    )
    agg, age, cog = _correlations(kept)
    agg_wo, age_wo, cog_wo = _correlations(without)
    return CrossCountryResult(
        slope=slope,
        r_aggregate=agg,
        r_aggregate_without=agg_wo,
        r_median_age=age,
        r_median_age_without=age_wo,
        r_cognition=cog,
        r_cognition_without=cog_wo,
        used=[r.country for r in kept],
        excluded=dropped,
        slope_without=slope_without,
    )


def decline_record(
    data: CountryDataset,
    age_series: TimeSeries,
    cog: CognitionRecord,
    window: tuple[int, int] = (1970, 2012),
    mode: str = "points",
    outlier: bool = False,
) -> DeclineRecord:
    """Build one scatter point from a country's labor share, full median-age
    path and cognition scores."""
    start, end = window
    age_increase = age_series.value_at(end) - age_series.value_at(start)
    return DeclineRecord(
        country=data.country,
        labor_share_decline_pp=labor_share_decline(data, window, mode),
        cognitive_decline_pct=aggregate_cognitive_decline(age_increase, cog),
        window=window,
        outlier=outlier,
        median_age_increase=age_increase,
        cognition_decline_pct=cognition_decline_pct(cog),
    )
