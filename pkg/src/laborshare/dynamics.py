"""Explicit-Euler integration of the automation-fraction dynamic

    da/dt = sigma - a*delta

whose fixed point ``a = sigma/delta`` is the closed-form equilibrium. With a
median-age path, demand innovation is attenuated as
``delta(t) = delta_ref * (1 - k*(mu(t) - mu0))`` while ``sigma = r0*delta_ref``,
so ``sigma/delta`` tracks ``model.attenuated_ratio``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .data_io import TimeSeries
from .errors import DomainError, StabilityError
from .model import InnovationRates, ModelParams, attenuation


@dataclass(frozen=True)
class SimConfig:
    a_init: float
    dt: float
    horizon: float
    rates: InnovationRates | None = None
    age_path: TimeSeries | None = None
    params: ModelParams | None = None
    delta_ref: float | None = None
    n: float | None = None

    def __post_init__(self):
        if not 0 <= self.a_init <= 1:
            raise DomainError(f"a_init must be in [0, 1], got {self.a_init}")
        if not self.dt > 0:
            raise DomainError(f"dt must be > 0, got {self.dt}")
        if not self.horizon > 0:
            raise DomainError(f"horizon must be > 0, got {self.horizon}")
        if self.rates is None:
            if self.age_path is None or self.params is None or self.delta_ref is None:
                raise DomainError("need either fixed rates or age_path + params + delta_ref")
            if not self.delta_ref > 0:
                raise DomainError(f"delta_ref must be > 0, got {self.delta_ref}")
        elif self.age_path is not None:
            raise DomainError("give fixed rates or an age path, not both")
        if self.n is not None and not self.n > 0:
            raise DomainError(f"n must be > 0, got {self.n}")

    @property
    def exponent(self) -> float:
        if self.n is not None:
            return self.n
        if self.params is not None:
            return self.params.n
        return 1.0

    def rates_at(self, t: float) -> InnovationRates:
        if self.rates is not None:
            return self.rates
        years = self.age_path.years
        # median age is held at the endpoints outside the path
        mu = float(np.interp(years[0] + t, years, self.age_path.values))
        p = self.params
        return InnovationRates(sigma=p.r0 * self.delta_ref, delta=self.delta_ref * attenuation(p.k, mu, p.mu0))


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    a_values: np.ndarray
    labor_share_values: np.ndarray
    clamp_events: int = 0
    warnings: tuple[str, ...] = field(default=())

    def __post_init__(self):
        for arr in (self.times, self.a_values, self.labor_share_values):
            arr.setflags(write=False)

    @property
    def final_a(self) -> float:
        return float(self.a_values[-1])

    @property
    def final_labor_share(self) -> float:
        return float(self.labor_share_values[-1])


def step(a: float, rates: InnovationRates, dt: float) -> float:
    """One Euler step; no clamping."""
    if not dt * rates.delta < 1:
        raise StabilityError(f"dt*delta = {dt * rates.delta:.6g} >= 1; reduce dt below {1 / rates.delta:.6g}")
    if not 0 <= a <= 1:
        raise DomainError(f"automation fraction must be in [0, 1], got {a}")
    return a + dt * (rates.sigma - a * rates.delta)


def analytic_solution(a0: float, rates: InnovationRates, t):
    """Exact solution for constant rates."""
    eq = rates.ratio
    return eq + (a0 - eq) * np.exp(-rates.delta * np.asarray(t, dtype=float))


def simulate(config: SimConfig) -> Trajectory:
    n_steps = max(1, int(round(config.horizon / config.dt)))
    times = config.dt * np.arange(n_steps + 1)
    a_values = np.empty(n_steps + 1)
    a = a_values[0] = config.a_init
    clamps = 0
    for i in range(n_steps):
        a = step(a, config.rates_at(times[i]), config.dt)
        if a > 1.0 or a < 0.0:
            clamps += 1
            a = min(1.0, max(0.0, a))
        a_values[i + 1] = a
    labor = 1.0 - a_values ** config.exponent
    warnings = ()
    if clamps:
        warnings = (f"automation fraction clamped to [0, 1] on {clamps} steps; dt may be too large",)
    return Trajectory(times, a_values, labor, clamps, warnings)


def euler_error_bound(rates: InnovationRates, a0: float, dt: float, t):
    """Pointwise bound on ``|euler(t) - exact(t)|`` for constant rates.

    With ``x = delta*dt`` and ``y = 1 - (1 - x)*exp(x)``, Bernoulli's inequality
    gives ``|a0 - eq| * (y/x) * delta*t * exp(-delta*t)``. ``t`` may be an array.
    """
    x = rates.delta * dt
    y = -math.expm1(x) + x * math.exp(x)
    t = np.asarray(t, dtype=float)
    scaled = rates.delta * t
    slack = 1e-14 * (1.0 + t / dt)
    return abs(a0 - rates.ratio) * (y / x) * scaled * np.exp(-scaled) + slack
