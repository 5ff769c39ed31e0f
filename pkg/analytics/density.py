"""
Market-Particle Density Solver

Evaluates the density g(x, t) of market-order particles that diffuse,
drift towards a perceived resource gradient, drift on their own,
grow at a net addition rate and receive external sources:

    g_t = D g_xx - a g_x + v1 g + q,    a(x, t) = (v - v1) x + lambda2 + lambda1 phi2

Features:
- Constant or tabulated (linearly interpolated) time coefficients
- Moving-frame clock: beta, beta1, the diffusive clock, the drift shift
- Green's-function master solution with Dirac, Gaussian or arbitrary initial
  densities and point, inflow, Gaussian or arbitrary sources
- Closed-form special cases: steady state, large demand, sustained inflow,
  high reaction rate
- Interauction multiplying factor and its (B, tau) surfaces
- Resource gradient f(x, t) = ((v - v1) / lambda1) x^2 + phi2 x + c
"""

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from numpy.polynomial import Polynomial

from utils.quadrature import adaptive_simpson, integrate_segments, quad_real

logger = logging.getLogger(__name__)

SIMPSON_TOL = 1e-9
GAUSS_HERMITE_SPAN = 10.0
EULER_E = math.e


class SingularKernelError(ValueError):
    """The heat kernel is evaluated at a non-positive clock difference."""


# ---------------------------------------------------------------------------
# Coefficients
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Coefficient:
    """
    A time coefficient: constant, tabulated (linear interpolation) or a callable.

    Tabulated coefficients hold their end values outside the table.
    """

    value: float = 0.0
    times: Optional[Tuple[float, ...]] = None
    values: Optional[Tuple[float, ...]] = None
    func: Optional[Callable[[float], float]] = field(default=None, compare=False)

    def __post_init__(self):
        if self.times is not None:
            if self.values is None or len(self.times) != len(self.values) or len(self.times) < 2:
                raise ValueError("Tabulated coefficient needs matching times and values (at least 2)")
            if any(b <= a for a, b in zip(self.times[:-1], self.times[1:])):
                raise ValueError("Tabulated coefficient times must be strictly increasing")

    @classmethod
    def tabulated(cls, times: Sequence[float], values: Sequence[float]) -> "Coefficient":
        return cls(times=tuple(float(t) for t in times), values=tuple(float(v) for v in values))

    @classmethod
    def from_callable(cls, func: Callable[[float], float]) -> "Coefficient":
        return cls(func=func)

    @property
    def is_constant(self) -> bool:
        return self.times is None and self.func is None

    def __call__(self, t: float) -> float:
        if self.func is not None:
            return float(self.func(t))
        if self.times is not None:
            return float(np.interp(t, self.times, self.values))
        return self.value

    def integral(self, t: float) -> float:
        """Integral of the coefficient over [0, t]."""
        if self.is_constant:
            return self.value * t
        if self.func is not None:
            return adaptive_simpson(self.func, 0.0, t, tol=SIMPSON_TOL)[0]
        knots = [0.0] + [k for k in self.times if 0.0 < k < t] + [t]
        return integrate_segments(self, knots, tol=SIMPSON_TOL)

    def knots(self, t: float):
        """Breakpoints in (0, t) where the coefficient has kinks."""
        if self.times is None:
            return []
        return [k for k in self.times if 0.0 < k < t]

    def max_abs(self, t_end: float) -> float:
        grid = np.linspace(0.0, t_end, 201)
        return float(max(abs(self(s)) for s in grid))


CoefficientLike = Union[Coefficient, float, int, Callable[[float], float]]


def as_coefficient(value: CoefficientLike) -> Coefficient:
    if isinstance(value, Coefficient):
        return value
    if callable(value):
        return Coefficient.from_callable(value)
    return Coefficient(value=float(value))


# ---------------------------------------------------------------------------
# Initial densities and sources
# ---------------------------------------------------------------------------


def heat_kernel(y, clock):
    """exp(-y^2 / (4 c)) / sqrt(4 pi c)."""
    return np.exp(-np.square(y) / (4.0 * clock)) / np.sqrt(4.0 * math.pi * clock)


def _gaussian_average(func: Callable[[float], float], center: float, clock: float) -> float:
    """Integral of func(chi) * heat_kernel(center - chi, clock) d chi."""
    spread = 2.0 * math.sqrt(clock)
    value = quad_real(
        lambda z: func(center + spread * z) * math.exp(-z * z),
        -GAUSS_HERMITE_SPAN,
        GAUSS_HERMITE_SPAN,
    )
    return value / math.sqrt(math.pi)


@dataclass(frozen=True)
class DiracMass:
    """Mass concentrated at one price."""

    mass: float = 1.0
    x0: float = 0.0

    def smoothed(self, xi: float, clock: float) -> float:
        return self.mass * float(heat_kernel(xi - self.x0, clock))


@dataclass(frozen=True)
class GaussianBump:
    """Gaussian initial density with total mass `mass`."""

    mass: float = 1.0
    x0: float = 0.0
    sigma: float = 1.0

    def __call__(self, x):
        return self.mass * heat_kernel(np.asarray(x, dtype=float) - self.x0, 0.5 * self.sigma**2)

    def smoothed(self, xi: float, clock: float) -> float:
        return self.mass * float(heat_kernel(xi - self.x0, clock + 0.5 * self.sigma**2))


@dataclass(frozen=True)
class PointSource:
    """Instantaneous injection of `mass` at price x0 and time t0."""

    mass: float
    x0: float = 0.0
    t0: float = 0.0


@dataclass(frozen=True)
class InflowSource:
    """Continuous injection at price x0 with time rate `rate`."""

    rate: CoefficientLike
    x0: float = 0.0


@dataclass(frozen=True)
class GaussianSource:
    """Continuous injection spread as a Gaussian in price: rate(t) * N(x; x0, sigma^2)."""

    rate: CoefficientLike
    x0: float = 0.0
    sigma: float = 1.0

    def __call__(self, x, t: float):
        rate = as_coefficient(self.rate)(t)
        return rate * heat_kernel(np.asarray(x, dtype=float) - self.x0, 0.5 * self.sigma**2)


# ---------------------------------------------------------------------------
# Scenario parameters and the moving-frame clock
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScenarioParams:
    """
    Coefficients of the density equation.

    D: diffusion coefficient, lambda1: taxis coefficient, lambda2: self drift,
    v: net addition rate, v1: addition rate in the moving frame,
    phi2: linear coefficient of the resource gradient, v_star: simplified
    rate of the asymptotic cases, B: bid-ask spread, c: constant of the
    resource gradient, lam: aggregate drift of the transformed frame.
    """

    D: CoefficientLike = 1.0
    lambda1: CoefficientLike = 0.0
    lambda2: CoefficientLike = 0.0
    v: CoefficientLike = 0.0
    v1: CoefficientLike = 0.0
    phi2: CoefficientLike = 0.0
    v_star: float = 0.0
    B: float = 0.0
    c: float = 0.0
    lam: CoefficientLike = 0.0
    initial: Optional[object] = None

    def __post_init__(self):
        for name in ("D", "lambda1", "lambda2", "v", "v1", "phi2", "lam"):
            object.__setattr__(self, name, as_coefficient(getattr(self, name)))
        D = self.D
        if D.times is not None:
            if min(D.values) <= 0:
                raise ValueError("D must be positive")
        elif D.func is None and not D.value > 0:
            raise ValueError(f"D must be positive, got {D.value}")
        if self.B < 0:
            raise ValueError(f"Spread B must be non-negative, got {self.B}")

    @property
    def all_constant(self) -> bool:
        return all(
            getattr(self, name).is_constant for name in ("D", "lambda1", "lambda2", "v", "v1", "phi2")
        )

    def net_rate(self, t: float) -> float:
        """v - v1."""
        return self.v(t) - self.v1(t)

    def drift_constant(self, t: float) -> float:
        """lambda2 + lambda1 * phi2."""
        return self.lambda2(t) + self.lambda1(t) * self.phi2(t)

    def drift(self, x, t: float):
        """a(x, t) = (v - v1) x + lambda2 + lambda1 phi2."""
        return self.net_rate(t) * np.asarray(x, dtype=float) + self.drift_constant(t)


def drift_integral(params: ScenarioParams, t: float) -> float:
    """int_0^t (lambda2 + lambda1 phi2) ds, without the frame scaling."""
    coeffs = (params.lambda1, params.lambda2, params.phi2)
    if all(c.is_constant for c in coeffs):
        return params.drift_constant(0.0) * t
    knots = sorted({k for c in coeffs for k in c.knots(t)})
    return integrate_segments(params.drift_constant, [0.0] + knots + [t], tol=SIMPSON_TOL)


class ScenarioClock:
    """
    Moving-frame quantities of a scenario.

    beta = exp(int (v - v1)), beta1 = exp(int v1), the diffusive clock
    C = int D / beta^2, the unit clock T = int 1 / beta^2, and the shift
    int (lambda2 + lambda1 phi2) / beta. Characteristics of the drift keep
    xi = x / beta - shift constant.
    """

    def __init__(self, params: ScenarioParams):
        self.params = params
        self._cache: Dict[Tuple[str, float], float] = {}

    def _knots(self, t: float):
        p = self.params
        knots = set()
        for coeff in (p.D, p.lambda1, p.lambda2, p.v, p.v1, p.phi2):
            knots.update(coeff.knots(t))
        return [0.0] + sorted(knots) + [t]

    def _cached(self, name: str, t: float, compute: Callable[[], float]) -> float:
        key = (name, float(t))
        if key not in self._cache:
            self._cache[key] = compute()
        return self._cache[key]

    def _integrate(self, func: Callable[[float], float], t: float) -> float:
        if t == 0:
            return 0.0
        return integrate_segments(func, self._knots(t), tol=SIMPSON_TOL)

    def log_beta(self, t: float) -> float:
        p = self.params
        return self._cached("log_beta", t, lambda: p.v.integral(t) - p.v1.integral(t))

    def beta(self, t: float) -> float:
        return math.exp(self.log_beta(t))

    def beta1(self, t: float) -> float:
        return math.exp(self._cached("log_beta1", t, lambda: self.params.v1.integral(t)))

    def unit_clock(self, t: float) -> float:
        """T(t) = int_0^t beta^-2."""
        p = self.params

        def compute():
            if p.v.is_constant and p.v1.is_constant:
                r = p.v.value - p.v1.value
                return t if r == 0 else -math.expm1(-2.0 * r * t) / (2.0 * r)
            return self._integrate(lambda s: math.exp(-2.0 * self.log_beta(s)), t)

        return self._cached("unit_clock", t, compute)

    def diffusive_clock(self, t: float) -> float:
        """C(t) = int_0^t D / beta^2 (D * T for constant D)."""
        p = self.params

        def compute():
            if p.D.is_constant:
                return p.D.value * self.unit_clock(t)
            return self._integrate(lambda s: p.D(s) * math.exp(-2.0 * self.log_beta(s)), t)

        return self._cached("diffusive_clock", t, compute)

    def shift(self, t: float) -> float:
        """int_0^t (lambda2 + lambda1 phi2) / beta."""
        p = self.params

        def compute():
            if p.all_constant:
                r = p.v.value - p.v1.value
                drift = p.drift_constant(0.0)
                return drift * t if r == 0 else drift * -math.expm1(-r * t) / r
            return self._integrate(lambda s: p.drift_constant(s) * math.exp(-self.log_beta(s)), t)

        return self._cached("shift", t, compute)

    def xi(self, x, t: float):
        """Frame coordinate x / beta - shift, constant along drift characteristics."""
        return np.asarray(x, dtype=float) / self.beta(t) - self.shift(t)

    def transformed_position(self, x, t: float):
        """X(x, t) = x / beta + int (lam - (lambda2 + lambda1 phi2) / beta)."""
        return np.asarray(x, dtype=float) / self.beta(t) + self.params.lam.integral(t) - self.shift(t)

    def eta_coord(self, x, t: float):
        """eta = X - int lam (equals xi)."""
        return self.transformed_position(x, t) - self.params.lam.integral(t)


# ---------------------------------------------------------------------------
# Master solution
# ---------------------------------------------------------------------------


def _check_clock(clock: float, where: str) -> None:
    if not clock > 0:
        raise SingularKernelError(f"Non-positive diffusive clock difference {clock:.3e} {where}")


def _initial_term(initial, xi: float, clock: float) -> float:
    if initial is None:
        return 0.0
    if hasattr(initial, "smoothed"):
        return initial.smoothed(xi, clock)
    return _gaussian_average(lambda chi: float(initial(chi)), xi, clock)


def _source_term(clock: ScenarioClock, source, xi: float, t: float) -> float:
    """Source contribution divided by beta1(t)."""
    if source is None:
        return 0.0
    C_t = clock.diffusive_clock(t)

    if isinstance(source, PointSource):
        if source.t0 > t:
            return 0.0
        gap = C_t - clock.diffusive_clock(source.t0)
        _check_clock(gap, f"for the point source at t0={source.t0}")
        weight = source.mass / (clock.beta1(source.t0) * clock.beta(source.t0))
        xi_s = source.x0 / clock.beta(source.t0) - clock.shift(source.t0)
        return weight * float(heat_kernel(xi - xi_s, gap))

    if isinstance(source, InflowSource):
        rate = as_coefficient(source.rate)

        def inflow(tau: float) -> float:
            gap = C_t - clock.diffusive_clock(tau)
            if gap <= 0:
                return 0.0
            b = clock.beta(tau)
            xi_s = source.x0 / b - clock.shift(tau)
            return rate(tau) / (clock.beta1(tau) * b) * float(heat_kernel(xi - xi_s, gap))

        return quad_real(inflow, 0.0, t, limit=400)

    if isinstance(source, GaussianSource):
        rate = as_coefficient(source.rate)

        def spread(tau: float) -> float:
            gap = C_t - clock.diffusive_clock(tau)
            b = clock.beta(tau)
            mean = source.x0 / b - clock.shift(tau)
            return rate(tau) / (clock.beta1(tau) * b) * float(
                heat_kernel(xi - mean, max(gap, 0.0) + 0.5 * (source.sigma / b) ** 2)
            )

        return quad_real(spread, 0.0, t, limit=400)

    # generic q(x, tau)
    def generic(tau: float) -> float:
        gap = C_t - clock.diffusive_clock(tau)
        b = clock.beta(tau)
        shift = clock.shift(tau)
        if gap <= 0:
            return float(source(b * (xi + shift), tau)) / clock.beta1(tau)
        return _gaussian_average(lambda u: float(source(b * (u + shift), tau)), xi, gap) / clock.beta1(tau)

    return quad_real(generic, 0.0, t, limit=200)


def _vectorize(point: Callable[[float], float], x):
    if np.ndim(x) == 0:
        return point(float(x))
    arr = np.asarray(x, dtype=float)
    return np.fromiter((point(float(xx)) for xx in arr.ravel()), dtype=float, count=arr.size).reshape(arr.shape)


def master_density(
    params: ScenarioParams,
    source=None,
    x=0.0,
    t: float = 1.0,
    initial=None,
    clock: Optional[ScenarioClock] = None,
):
    """
    Green's-function solution of the density equation.

    g(x, t) = beta1(t) [ int g0(chi) K(xi - chi, C(t)) d chi
                         + int d tau int dx_s q(x_s, tau) / (beta1 beta)(tau)
                                          K(xi - xi_s, C(t) - C(tau)) ]

    with K the heat kernel, xi = x / beta(t) - shift(t) and
    xi_s = x_s / beta(tau) - shift(tau). The kernel carries a negative
    exponent.

    Args:
        params: Scenario coefficients
        source: None, PointSource, InflowSource, GaussianSource or callable q(x, t)
        x: Price (scalar or array)
        t: Time > 0
        initial: DiracMass, GaussianBump, callable g0(x) or None (defaults to params.initial)
        clock: Optional precomputed ScenarioClock (reused across points)

    Returns:
        Density at x (float or array)

    Raises:
        SingularKernelError: If t <= 0 or a kernel clock difference is not positive
    """
    if not t > 0:
        raise SingularKernelError(f"Density needs t > 0, got {t}")
    clock = clock or ScenarioClock(params)
    initial = initial if initial is not None else params.initial
    C_t = clock.diffusive_clock(t)
    _check_clock(C_t, f"at t={t}")
    beta1 = clock.beta1(t)

    def point(xx: float) -> float:
        xi = float(clock.xi(xx, t))
        return beta1 * (_initial_term(initial, xi, C_t) + _source_term(clock, source, xi, t))

    return _vectorize(point, x)


# ---------------------------------------------------------------------------
# Special cases
# ---------------------------------------------------------------------------


def impact_source(chi: float, D: float) -> Callable[[float], float]:
    """Time-independent Q with Q(x) / sqrt(4 D e) = (x - chi)^2 / (4 D e)."""
    width = math.sqrt(4.0 * D * EULER_E)
    return lambda x: (np.asarray(x, dtype=float) - chi) ** 2 / width


def steady_state_density(params: ScenarioParams, Q: Callable[[float], float], x, beta1: float = 1.0):
    """
    Steady state (v = v1 constant, no drift): beta1 / sqrt(pi) * exp(-Q(x) / sqrt(4 D e)).

    Args:
        params: Scenario with constant D
        Q: Time-independent addition Q(x)
        x: Price (scalar or array)
        beta1: Constant growth factor

    Returns:
        Density at x
    """
    if not params.D.is_constant:
        raise ValueError("Steady state needs a constant D")
    width = math.sqrt(4.0 * params.D.value * EULER_E)
    value = beta1 / math.sqrt(math.pi) * np.exp(-np.asarray(Q(x), dtype=float) / width)
    return float(value) if np.ndim(value) == 0 else value


def large_demand_density(params: ScenarioParams, M: float, x, t: float, clock: Optional[ScenarioClock] = None):
    """
    Density after a large demand M that dominates the initial density.

    e^{v* t} M / sqrt(4 pi D T) exp[-e^{-v* t} (x - int (lambda2 + lambda1 phi2))^2 / (4 D T)]

    with T the unit clock of the scenario. The total mass is M e^{1.5 v* t}.

    Raises:
        ValueError: If M <= 0 or D is not constant
        SingularKernelError: If T <= 0
    """
    if not M > 0:
        raise ValueError(f"Demand M must be positive, got {M}")
    if not params.D.is_constant:
        raise ValueError("Large-demand form needs a constant D")
    clock = clock or ScenarioClock(params)
    T = clock.unit_clock(t) if t > 0 else 0.0
    _check_clock(T, f"at t={t}")

    D = params.D.value
    v_star = params.v_star
    y = np.asarray(x, dtype=float) - drift_integral(params, t)
    value = math.exp(v_star * t) * M / math.sqrt(4.0 * math.pi * D * T) * np.exp(
        -math.exp(-v_star * t) * y**2 / (4.0 * D * T)
    )
    return float(value) if np.ndim(value) == 0 else value


class InflowRegime(str, Enum):
    TIME = "time"
    SPATIAL = "spatial"


def sustained_inflow_density(
    params: ScenarioParams,
    phi2: CoefficientLike,
    x,
    t: float,
    regime: Union[InflowRegime, str] = InflowRegime.TIME,
    x0: float = 0.0,
):
    """
    Density fed by a sustained inflow, starting from an empty book.

    "time": market orders arrive at price x0 at rate phi2(t); the same phi2
    is the linear coefficient of the resource gradient, so it also drives
    the drift.
    "spatial": liquidity at every price, q(x) = (v - v1) x, with no self
    drift; the Gaussian convolution of the linear source is exact:
    g = beta1(t) int_0^t (v - v1) beta (xi + shift) / beta1 d tau.

    Raises:
        ValueError: Unknown regime
    """
    try:
        regime = InflowRegime(regime)
    except ValueError:
        raise ValueError(f"Unknown inflow regime '{regime}' (use time or spatial)")

    if regime is InflowRegime.TIME:
        scenario = replace(params, phi2=phi2, initial=None)
        return master_density(scenario, InflowSource(rate=phi2, x0=x0), x, t, initial=None)

    scenario = replace(params, lambda2=0.0, initial=None)
    clock = ScenarioClock(scenario)
    if not t > 0:
        raise SingularKernelError(f"Density needs t > 0, got {t}")
    beta1 = clock.beta1(t)

    def point(xx: float) -> float:
        xi = float(clock.xi(xx, t))

        def integrand(tau: float) -> float:
            return (
                scenario.net_rate(tau) * clock.beta(tau) * (xi + clock.shift(tau)) / clock.beta1(tau)
            )

        return beta1 * quad_real(integrand, 0.0, t)

    return _vectorize(point, x)


def high_reaction_density(params: ScenarioParams, omega, x, t: float):
    """
    High reaction rate, no external source: the initial density omega
    transported by the frame (phi2 must be zero).

    Raises:
        ValueError: If phi2 is not identically zero
    """
    phi2 = params.phi2
    if not (phi2.is_constant and phi2.value == 0.0):
        raise ValueError("High-reaction form needs phi2 = 0")
    return master_density(params, None, x, t, initial=omega)


# ---------------------------------------------------------------------------
# Interauction density
# ---------------------------------------------------------------------------


class InterauctionRegime(str, Enum):
    DIFFUSIVE = "diffusive"
    TRANSACTION_DRIFT = "transaction-drift"
    GRADIENT_DRIFT = "gradient-drift"


@dataclass(frozen=True)
class InterauctionParams:
    """Spread B, diffusion D, rate v*, interauction time tau and density omega at the next price."""

    B: float
    D: float = 1.0
    v_star: float = 1.0
    tau: float = 0.01
    omega: float = 1.0
    lambda2_star: float = 0.0
    lambda1_star: float = 0.0
    phi2_star: float = 0.0

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if not self.D > 0:
            raise ValueError(f"D must be positive, got {self.D}")
        if not self.v_star > 0:
            raise ValueError(f"v_star must be positive, got {self.v_star}")


def interauction_density(params: InterauctionParams, regime=InterauctionRegime.DIFFUSIVE) -> float:
    """
    Density available at the next trade price after one interauction time.

    diffusive:          omega / sqrt(4 pi D / (2 v*)) exp(2 v* (tau - B^2 / 4D))
    transaction-drift:  omega / sqrt(4 pi D / (2 v*)) exp(-(2 v* / 4D) (B - lambda2* tau)^2)
    gradient-drift:     omega / sqrt(4 pi D / (2 v* e^{2 v* tau}))
                              exp(-(2 v* / 4D) (B - lambda1* phi2* tau)^2)
    """
    regime = InterauctionRegime(regime)
    p = params
    rate = 2.0 * p.v_star
    if regime is InterauctionRegime.DIFFUSIVE:
        return p.omega / math.sqrt(4.0 * math.pi * p.D / rate) * math.exp(rate * (p.tau - p.B**2 / (4.0 * p.D)))
    if regime is InterauctionRegime.TRANSACTION_DRIFT:
        gap = p.B - p.lambda2_star * p.tau
        return p.omega / math.sqrt(4.0 * math.pi * p.D / rate) * math.exp(-rate / (4.0 * p.D) * gap**2)
    gap = p.B - p.lambda1_star * p.phi2_star * p.tau
    width = 4.0 * math.pi * p.D / (rate * math.exp(rate * p.tau))
    return p.omega / math.sqrt(width) * math.exp(-rate / (4.0 * p.D) * gap**2)


def interauction_density_unsimplified(params: InterauctionParams) -> float:
    """Diffusive regime before simplification: beta = beta1 = e^{v* tau}, T = (2 v* e^{2 v* tau})^-1."""
    p = params
    growth = math.exp(p.v_star * p.tau)
    T = 1.0 / (2.0 * p.v_star * growth**2)
    return growth * p.omega / math.sqrt(4.0 * math.pi * p.D * T) * math.exp(
        -((p.B / growth) ** 2) / (4.0 * p.D * T)
    )


SURFACE_GRIDS = {
    "overview": (np.linspace(0.0, 1.0, 21), np.linspace(0.01, 1.0, 100)),
    "low-latency": (np.linspace(0.0, 0.2, 21), np.linspace(0.001, 0.05, 50)),
}


def multiplying_factor_surface(B_grid, tau_grid, D: float = 1.0, v_star: float = 1.0) -> np.ndarray:
    """
    Diffusive interauction factor (omega = 1) on a B x tau grid.

    Returns:
        Matrix with one row per B and one column per tau

    Raises:
        ValueError: Empty grid
    """
    B = np.asarray(B_grid, dtype=float)
    tau = np.asarray(tau_grid, dtype=float)
    if B.size == 0 or tau.size == 0:
        raise ValueError("Surface grids must be nonempty")
    if np.any(tau <= 0) or np.any(B < 0):
        raise ValueError("Surface grids need tau > 0 and B >= 0")
    rate = 2.0 * v_star
    return np.exp(rate * (tau[None, :] - B[:, None] ** 2 / (4.0 * D))) / math.sqrt(4.0 * math.pi * D / rate)


def surface_to_frame(B_grid, tau_grid, surface: np.ndarray) -> pd.DataFrame:
    """Long format with columns B, tau, factor."""
    B, tau = np.meshgrid(np.asarray(B_grid, dtype=float), np.asarray(tau_grid, dtype=float), indexing="ij")
    return pd.DataFrame({"B": B.ravel(), "tau": tau.ravel(), "factor": surface.ravel()})


# ---------------------------------------------------------------------------
# Resource gradient and density fields
# ---------------------------------------------------------------------------


def resource_gradient_polynomial(params: ScenarioParams, t: float) -> Polynomial:
    """f(., t) = ((v - v1) / lambda1) x^2 + phi2 x + c as a polynomial in x."""
    lambda1 = params.lambda1(t)
    if lambda1 == 0:
        raise ValueError("Resource gradient needs lambda1 != 0")
    return Polynomial([params.c, params.phi2(t), params.net_rate(t) / lambda1])


def resource_gradient(params: ScenarioParams, x, t: float):
    """Perceived resource density f(x, t)."""
    value = resource_gradient_polynomial(params, t)(np.asarray(x, dtype=float))
    return float(value) if np.ndim(value) == 0 else value


@dataclass
class DensityField:
    """Density values on a (price, time) grid."""

    x: np.ndarray
    t: np.ndarray
    values: np.ndarray  # shape (len(t), len(x))

    def to_frame(self) -> pd.DataFrame:
        tt, xx = np.meshgrid(self.t, self.x, indexing="ij")
        return pd.DataFrame({"x": xx.ravel(), "t": tt.ravel(), "value": self.values.ravel()})

    @property
    def min_value(self) -> float:
        return float(np.min(self.values))


def evaluate_field(func: Callable[[np.ndarray, float], np.ndarray], xs, ts) -> DensityField:
    """Evaluate func(x_array, t) at every time of the grid."""
    xs = np.asarray(xs, dtype=float)
    ts = np.asarray(ts, dtype=float)
    values = np.vstack([np.asarray(func(xs, float(t)), dtype=float).reshape(xs.shape) for t in ts])
    return DensityField(x=xs, t=ts, values=values)
