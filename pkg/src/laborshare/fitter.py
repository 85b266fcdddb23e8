"""Stochastic-gradient fitting of (n, r0, k) to a labor-share / median-age series.

Protocol: mean-squared-error loss; each run starts from parameters drawn
uniformly from ``[init_low, init_high]`` and performs ``iterations`` epochs of
per-point SGD over a freshly shuffled order; parameters are averaged
componentwise over ``runs`` independent runs.

After every update the parameters are projected onto a set where the model is
defined for every median age in the data:

    eps <= n <= N_MAX
    eps <= r0 <= 1
    0 <= k <= (1 - r0) / (mu_max - mu0)   (less a 1e-12 relative margin)

The bound on k keeps the automation fraction at or below 1 at the oldest
median age (and the attenuation denominator at or above r0 >= eps), so no
evaluation during fitting can raise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .data_io import CountryDataset, TimeSeries
from .errors import DomainError, FitDivergenceError, InsufficientDataError, NumericError
from .model import ModelParams, attenuation, equilibrium_labor_share

DEFAULT_SEED = 0
N_MAX = 10.0
K_CAP = 1.0  # used when no median age exceeds mu0


@dataclass(frozen=True)
class FitConfig:
    iterations: int = 100
    runs: int = 20
    learning_rate: float = 0.05
    seed: int = DEFAULT_SEED
    init_low: float = 0.0
    init_high: float = 1.0
    projection_margin: float = 1e-6

    def __post_init__(self):
        if self.iterations < 1:
            raise DomainError(f"iterations must be >= 1, got {self.iterations}")
        if self.runs < 1:
            raise DomainError(f"runs must be >= 1, got {self.runs}")
        if not self.learning_rate > 0:
            raise DomainError(f"learning_rate must be > 0, got {self.learning_rate}")
        if not self.init_low < self.init_high:
            raise DomainError(f"init_low must be < init_high, got [{self.init_low}, {self.init_high}]")
        if not 0 < self.projection_margin < 0.5:
            raise DomainError(f"projection_margin must be in (0, 0.5), got {self.projection_margin}")


@dataclass
class FitResult:
    per_run_params: list[ModelParams]
    averaged_params: ModelParams
    loss_history: list[list[float]]
    rmse: float
    fitted_series: TimeSeries
    warnings: dict[str, int] = field(default_factory=dict)
    failed_runs: list[tuple[int, str]] = field(default_factory=list)


def residual(params: ModelParams, mu: float, observed: float) -> float:
    return equilibrium_labor_share(params, mu) - observed


def share_gradient(params: ModelParams, mu: float) -> tuple[float, float, float]:
    """Partial derivatives of the equilibrium labor share ``1 - (r0*g)**n``,
    ``g = 1/(1 - k*(mu - mu0))``, with respect to ``(n, r0, k)``."""
    n, r0, k = params.n, params.r0, params.k
    g = 1.0 / attenuation(k, mu, params.mu0)
    ratio = r0 * g
    a_n = ratio**n
    return (-a_n * math.log(ratio), -n * a_n / r0, -n * a_n * (mu - params.mu0) * g)


def gradient(params: ModelParams, mu: float, observed: float) -> tuple[float, float, float]:
    """Gradient of the squared residual with respect to ``(n, r0, k)``."""
    scale = 2.0 * residual(params, mu, observed)
    dn, dr0, dk = share_gradient(params, mu)
    return scale * dn, scale * dr0, scale * dk


def mse(params: ModelParams, data: CountryDataset) -> float:
    mus, obs = data.arrays()
    return math.fsum(residual(params, float(m), float(o)) ** 2 for m, o in zip(mus, obs)) / len(obs)


class _Projection:
    """Clamp (n, r0, k) into the feasible box for a given median-age span."""

    def __init__(self, mu0: float, mu_max: float, eps: float):
        self.eps = eps
        self.span = mu_max - mu0
        self.events = 0

    def __call__(self, n: float, r0: float, k: float) -> tuple[float, float, float]:
        eps = self.eps
        pn = min(max(n, eps), N_MAX)
        pr0 = min(max(r0, eps), 1.0)
        k_max = (1.0 - pr0) / self.span * (1.0 - 1e-12) if self.span > 0 else K_CAP
        pk = min(max(k, 0.0), k_max)
        if (pn, pr0, pk) != (n, r0, k):
            self.events += 1
        return pn, pr0, pk


def _normalized(g: float) -> float:
    return g / max(1.0, abs(g))


def _check_data(data: CountryDataset):
    if len(data.years) < 3:
        raise InsufficientDataError(f"{data.country}: {len(data.years)} points, need at least 3")


def mu0_of(data: CountryDataset) -> float:
    """Baseline median age: the first aligned year."""
    return float(data.median_age.values[0])


def fit_single_run(
    data: CountryDataset,
    config: FitConfig,
    rng: np.random.Generator,
    mu0: float | None = None,
    projection: _Projection | None = None,
) -> tuple[ModelParams, list[float]]:
    """One SGD run from a random start; returns final params and per-epoch MSE."""
    _check_data(data)
    mu0 = mu0_of(data) if mu0 is None else mu0
    mus, obs = data.arrays()
    mus = [float(m) for m in mus]
    obs = [float(o) for o in obs]
    if projection is None:
        projection = _Projection(mu0, max(mus), config.projection_margin)
    lr = config.learning_rate

    n, r0, k = (float(v) for v in rng.uniform(config.init_low, config.init_high, size=3))
    n, r0, k = projection(n, r0, k)
    history: list[float] = []
    for epoch in range(config.iterations):
        for i in rng.permutation(len(obs)):
            gn, gr, gk = gradient(ModelParams(n, r0, k, mu0), mus[i], obs[i])
            n, r0, k = projection(
                n - lr * _normalized(gn),
                r0 - lr * _normalized(gr),
                k - lr * _normalized(gk),
            )
        loss = mse(ModelParams(n, r0, k, mu0), data)
        if not math.isfinite(loss):
            raise FitDivergenceError(f"{data.country}: loss {loss} at epoch {epoch + 1}; lower the learning rate")
        history.append(loss)
    return ModelParams(n, r0, k, mu0), history


def predict(params: ModelParams, age: TimeSeries, label: str = "fitted") -> TimeSeries:
    return TimeSeries(label, age.years, tuple(equilibrium_labor_share(params, mu) for mu in age.values))


def fit(data: CountryDataset, config: FitConfig | None = None) -> FitResult:
    """Average ``config.runs`` independent SGD runs; deterministic given the seed."""
    config = config or FitConfig()
    _check_data(data)
    mu0 = mu0_of(data)
    streams = np.random.SeedSequence(config.seed).spawn(config.runs)
    projection = _Projection(mu0, max(data.median_age.values), config.projection_margin)

    per_run: list[ModelParams] = []
    histories: list[list[float]] = []
    failed: list[tuple[int, str]] = []
    for index, stream in enumerate(streams):
        try:
            params, history = fit_single_run(data, config, np.random.default_rng(stream), mu0, projection)
        except NumericError as exc:
            failed.append((index, str(exc)))
            continue
        per_run.append(params)
        histories.append(history)
    if not per_run:
        raise FitDivergenceError(f"{data.country}: all {config.runs} runs failed; first: {failed[0][1]}")

    count = len(per_run)
    averaged = ModelParams(
        n=math.fsum(p.n for p in per_run) / count,
        r0=math.fsum(p.r0 for p in per_run) / count,
        k=math.fsum(p.k for p in per_run) / count,
        mu0=mu0,
    )
    fitted = predict(averaged, data.median_age, label=f"{data.country} fitted")
    resid = [f - o for f, o in zip(fitted.values, data.labor_share.values)]
    rmse = math.sqrt(math.fsum(r * r for r in resid) / len(resid))
    warnings = {"projections": projection.events, "failed_runs": len(failed)}
    return FitResult(per_run, averaged, histories, rmse, fitted, warnings, failed)
