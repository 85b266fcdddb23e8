"""Closed-form long-tail labor-share model.

Tasks are ranked by output; the cumulative output share of the top ``r``
rank fraction is ``r**n``. Tasks below the automation fraction ``a`` are
automated, so labor's share is ``1 - a**n``. In dynamic equilibrium
``a = sigma/delta``, and rising median age attenuates demand innovation:

    sigma/delta = r0 / (1 - k*(mu - mu0))

Everything here is pure float arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError, RangeError, SingularityError

WEIGHT_SUM_TOL = 1e-9


@dataclass(frozen=True)
class ModelParams:
    n: float
    r0: float
    k: float
    mu0: float

    def __post_init__(self):
        if not self.n > 0:
            raise DomainError(f"n must be > 0, got {self.n}")
        if not 0 < self.r0 <= 1:
            raise DomainError(f"r0 must be in (0, 1], got {self.r0}")
        if not self.k >= 0:
            raise DomainError(f"k must be >= 0, got {self.k}")
        if not math.isfinite(self.mu0):
            raise DomainError(f"mu0 must be finite, got {self.mu0}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.n, self.r0, self.k)


@dataclass(frozen=True)
class InnovationRates:
    sigma: float
    delta: float

    def __post_init__(self):
        if not self.delta > 0:
            raise DomainError(f"delta must be > 0, got {self.delta}")
        if not self.sigma >= 0:
            raise DomainError(f"sigma must be >= 0, got {self.sigma}")

    @property
    def ratio(self) -> float:
        return self.sigma / self.delta


@dataclass(frozen=True)
class ProductLine:
    price: float
    unit_labor_share: float
    demand_weight: float

    def __post_init__(self):
        if not self.price > 0:
            raise DomainError(f"price must be > 0, got {self.price}")
        if not 0 <= self.unit_labor_share <= 1:
            raise DomainError(f"unit_labor_share must be in [0, 1], got {self.unit_labor_share}")
        if not 0 <= self.demand_weight <= 1:
            raise DomainError(f"demand_weight must be in [0, 1], got {self.demand_weight}")


def cumulative_output_share(r: float, n: float) -> float:
    """Output share of tasks with rank fraction in ``[0, r]``."""
    if not n > 0:
        raise DomainError(f"n must be > 0, got {n}")
    if not 0 <= r <= 1:
        raise DomainError(f"rank fraction must be in [0, 1], got {r}")
    return r**n


def attenuation(k: float, mu: float, mu0: float) -> float:
    """Denominator ``1 - k*(mu - mu0)``; raises if nonpositive."""
    denom = 1.0 - k * (mu - mu0)
    if not denom > 0:
        raise SingularityError(
            f"attenuation denominator 1 - k*(mu - mu0) = {denom:.6g} <= 0 "
            f"(k={k}, mu={mu}, mu0={mu0})"
        )
    return denom


def attenuated_ratio(params: ModelParams, mu: float) -> float:
    """Equilibrium automation fraction sigma/delta at median age ``mu``."""
    if params.k == 0 or mu == params.mu0:
        return params.r0
    return params.r0 / attenuation(params.k, mu, params.mu0)


def equilibrium_labor_share(params: ModelParams, mu: float) -> float:
    a = attenuated_ratio(params, mu)
    if a > 1:
        raise RangeError(f"automation fraction {a:.6g} > 1 at median age {mu}")
    return 1.0 - a**params.n


def mixture_labor_share(lines: Sequence[ProductLine]) -> float:
    """Demand-weighted labor share of a mix of product lines.

    Labor share is revenue-weighted: ``sum(w*s*p) / sum(w*p)``.

    >>> hats = [ProductLine(4, 0.2, 0.5), ProductLine(8, 0.4, 0.5)]
    >>> round(mixture_labor_share(hats), 4)
    0.3333
    """
    if not lines:
        raise DomainError("mixture needs at least one product line")
    total_weight = math.fsum(line.demand_weight for line in lines)
    if abs(total_weight - 1.0) > WEIGHT_SUM_TOL:
        raise DomainError(f"demand weights sum to {total_weight!r}, expected 1")
    labor = math.fsum(l.demand_weight * l.unit_labor_share * l.price for l in lines)
    revenue = math.fsum(l.demand_weight * l.price for l in lines)
    return labor / revenue
