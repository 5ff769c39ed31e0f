"""
Velocity and flight-time samplers.

Features:
- Lorentzian (Cauchy) velocity distribution, optionally truncated at |v| <= v_max
- Power-tailed flight times f(tau) = gamma / (1 + tau)^(1 + gamma)
- Unit-rate exponential flight times as a memoryless reference
- Inverse-CDF sampling from uniform draws on the open interval (0, 1)
- Counter-based (Philox) random streams, one per trial
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


def _check_open_unit(u: ArrayLike) -> np.ndarray:
    arr = np.asarray(u, dtype=float)
    if np.any((arr <= 0.0) | (arr >= 1.0)) or np.any(np.isnan(arr)):
        raise ValueError("Uniform draw must lie in the open interval (0, 1)")
    return arr


def _as_output(arr: np.ndarray, like: ArrayLike) -> ArrayLike:
    return float(arr) if np.ndim(like) == 0 else arr


@dataclass(frozen=True)
class VelocityDist:
    """Lorentzian velocity pdf h(v) with half-width u0."""

    u0: float = 1.0
    v_max: Optional[float] = None

    def __post_init__(self):
        if not self.u0 > 0:
            raise ValueError(f"u0 must be positive, got {self.u0}")
        if self.v_max is not None and not self.v_max > 0:
            raise ValueError(f"v_max must be positive, got {self.v_max}")

    @property
    def theta_max(self) -> float:
        """Half-width of the tan-substituted domain."""
        if self.v_max is None:
            return math.pi / 2
        return math.atan(self.v_max / self.u0)

    def pdf(self, v: ArrayLike) -> ArrayLike:
        v = np.asarray(v, dtype=float)
        density = self.u0 / (math.pi * (self.u0**2 + v**2))
        if self.v_max is not None:
            density = np.where(np.abs(v) <= self.v_max, density * math.pi / (2 * self.theta_max), 0.0)
        return _as_output(density, v)

    def cdf(self, v: ArrayLike) -> ArrayLike:
        v = np.asarray(v, dtype=float)
        if self.v_max is not None:
            v = np.clip(v, -self.v_max, self.v_max)
        theta = np.arctan(v / self.u0)
        return _as_output(0.5 + theta / (2 * self.theta_max), v)

    def inverse_cdf(self, u: ArrayLike) -> ArrayLike:
        arr = _check_open_unit(u)
        if self.v_max is None:
            values = self.u0 * np.tan(np.pi * (arr - 0.5))
        else:
            values = self.u0 * np.tan((2.0 * arr - 1.0) * self.theta_max)
        return _as_output(values, u)


@dataclass(frozen=True)
class FlightTimeDist:
    """Power-tailed flight times f(tau) = gamma / (1 + tau)^(1 + gamma)."""

    gamma: float = 1.5

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")

    @property
    def mean(self) -> float:
        return 1.0 / (self.gamma - 1.0) if self.gamma > 1 else math.inf

    def pdf(self, tau: ArrayLike) -> ArrayLike:
        tau = np.asarray(tau, dtype=float)
        density = np.where(tau >= 0, self.gamma / (1.0 + np.maximum(tau, 0)) ** (1.0 + self.gamma), 0.0)
        return _as_output(density, tau)

    def survival(self, tau: ArrayLike) -> ArrayLike:
        tau = np.asarray(tau, dtype=float)
        return _as_output((1.0 + np.maximum(tau, 0)) ** (-self.gamma), tau)

    def cdf(self, tau: ArrayLike) -> ArrayLike:
        tau = np.asarray(tau, dtype=float)
        return _as_output(1.0 - (1.0 + np.maximum(tau, 0)) ** (-self.gamma), tau)

    def inverse_cdf(self, u: ArrayLike) -> ArrayLike:
        arr = _check_open_unit(u)
        return _as_output((1.0 - arr) ** (-1.0 / self.gamma) - 1.0, u)


@dataclass(frozen=True)
class ExponentialFlightTimeDist:
    """Memoryless flight times with the given rate."""

    rate: float = 1.0

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError(f"rate must be positive, got {self.rate}")

    @property
    def mean(self) -> float:
        return 1.0 / self.rate

    def pdf(self, tau: ArrayLike) -> ArrayLike:
        tau = np.asarray(tau, dtype=float)
        return _as_output(np.where(tau >= 0, self.rate * np.exp(-self.rate * np.maximum(tau, 0)), 0.0), tau)

    def survival(self, tau: ArrayLike) -> ArrayLike:
        tau = np.asarray(tau, dtype=float)
        return _as_output(np.exp(-self.rate * np.maximum(tau, 0)), tau)

    def cdf(self, tau: ArrayLike) -> ArrayLike:
        tau = np.asarray(tau, dtype=float)
        return _as_output(1.0 - np.exp(-self.rate * np.maximum(tau, 0)), tau)

    def inverse_cdf(self, u: ArrayLike) -> ArrayLike:
        arr = _check_open_unit(u)
        return _as_output(-np.log1p(-arr) / self.rate, u)


def sample_velocity(dist: VelocityDist, u: ArrayLike) -> ArrayLike:
    """
    Map a uniform draw to a velocity (sign encodes buy/sell).

    Args:
        dist: Velocity distribution
        u: Uniform draw(s) in (0, 1)

    Returns:
        u0 * tan(pi * (u - 1/2)) for the untruncated Lorentzian

    Raises:
        ValueError: If u is outside (0, 1)
    """
    return dist.inverse_cdf(u)


def sample_flight_time(dist, u: ArrayLike) -> ArrayLike:
    """
    Map a uniform draw to a flight time.

    Args:
        dist: FlightTimeDist or ExponentialFlightTimeDist
        u: Uniform draw(s) in (0, 1)

    Returns:
        (1 - u)^(-1/gamma) - 1 for the power-tailed law

    Raises:
        ValueError: If u is outside (0, 1)
    """
    return dist.inverse_cdf(u)


def make_rng(seed: int) -> np.random.Generator:
    """Independent counter-based stream for one trial."""
    return np.random.Generator(np.random.Philox(int(seed)))


def open_uniform(rng: np.random.Generator, size: Optional[int] = None) -> ArrayLike:
    """Uniform draws on (0, 1); the generator's [0, 1) zero is redrawn."""
    if size is None:
        u = rng.random()
        while u == 0.0:
            u = rng.random()
        return u

    u = rng.random(size)
    zeros = u == 0.0
    while np.any(zeros):
        u[zeros] = rng.random(int(zeros.sum()))
        zeros = u == 0.0
    return u


def sample_quantity(rng: np.random.Generator, biased: bool, max_quantity: int = 5) -> int:
    """One share without bias, otherwise uniform on {1..max_quantity}."""
    if not biased:
        return 1
    return int(rng.integers(1, max_quantity + 1))


def trial_seed(base_seed: int, cell_index: int, trials: int, trial: int) -> int:
    """Seed of one trial; cells get disjoint seed ranges."""
    return int(base_seed) + cell_index * trials + trial
