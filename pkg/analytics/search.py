"""
Lévy-Search Propagators

Numerical evaluation of the walker propagator in Fourier-Laplace space
for Lorentzian velocities and power-tailed flight times.

Features:
- Laplace transform of the flight-time density at complex arguments
- Montroll-Weiss propagator in two forms:
    * "renewal":  F / (1 - F)          (counts completed flights; k=0 gives f/(1-f))
    * "position": Psi / (1 - F)        (density of the walker position)
  with F(k,s) = <e^{-(s+ikV)tau}> and Psi the survival-weighted transform
- Closed forms for the untruncated Lorentzian: F = f(s + u0|k|), and the
  position form collapses to 1/(s + u0|k|)
- Asymptotic (small k, s) propagator and its scaling generating function
- Ballistic scaling function by extrapolating the epsilon limit
- Closed-form Cauchy propagator in real space
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import special

from agents import ExponentialFlightTimeDist, FlightTimeDist, VelocityDist
from utils.quadrature import QuadratureError, quad_complex, quad_real, velocity_average

logger = logging.getLogger(__name__)

FORMS = ("renewal", "position")
METHODS = ("auto", "quadrature")
SCALING_EPSILONS = (1e-2, 1e-3, 1e-4)
GAMMA_POLE_WIDTH = 1e-9
CLOSED_FORM_MAX_Z = 50.0
TAIL_DECAY = 40.0


@dataclass
class SearchModel:
    """Velocity law, flight-time law, initial density and search efficiency."""

    velocity: VelocityDist
    flight: object  # FlightTimeDist or ExponentialFlightTimeDist
    n0: Optional[Callable[[float], float]] = None  # None is a unit mass at the origin
    efficiency_const: float = 1.0

    def __post_init__(self):
        if not self.efficiency_const > 0:
            raise ValueError(f"efficiency_const must be positive, got {self.efficiency_const}")
        if self.n0 is not None:
            mass = self.initial_mass()
            if not math.isfinite(mass):
                raise ValueError("Initial density must integrate to a finite mass")

    @property
    def gamma(self) -> Optional[float]:
        return getattr(self.flight, "gamma", None)

    @property
    def is_cauchy(self) -> bool:
        """Untruncated Lorentzian velocities (closed forms apply)."""
        return self.velocity.v_max is None

    def initial_mass(self) -> float:
        if self.n0 is None:
            return 1.0
        return quad_real(self.n0, -math.inf, math.inf)

    def initial_density_fourier(self, k: float) -> complex:
        """n0(k) = integral of n0(x) exp(-ikx) dx."""
        if self.n0 is None:
            return 1.0 + 0.0j
        if k == 0:
            return complex(self.initial_mass(), 0.0)
        n0 = self.n0
        w = abs(k)
        even = quad_real(lambda x: n0(x) + n0(-x), 0.0, math.inf, weight="cos", wvar=w)
        odd = quad_real(lambda x: n0(x) - n0(-x), 0.0, math.inf, weight="sin", wvar=w)
        return complex(even, -math.copysign(1.0, k) * odd)


def _check_s(s: complex) -> None:
    if not complex(s).real > 0:
        raise ValueError(f"Laplace variable needs Re(s) > 0, got {s}")


def _laplace(g: Callable[[float], float], z: complex, tail: Optional[Callable[[float], float]] = None) -> complex:
    """
    Integral of g(tau) exp(-z tau) over [0, inf) for Re z > 0.

    The half-line is cut at 1 and at TAIL_DECAY / Re z so each piece is
    smooth for QUADPACK.
    """
    z = complex(z)
    cut = max(2.0, TAIL_DECAY / z.real)

    def integrand(tau: float) -> complex:
        return g(tau) * cmath.exp(-z * tau)

    if z.imag == 0.0:
        pieces = [
            quad_real(lambda t: integrand(t).real, 0.0, 1.0),
            quad_real(lambda t: integrand(t).real, 1.0, cut, limit=500),
            quad_real(lambda t: integrand(t).real, cut, math.inf),
        ]
        return complex(sum(pieces), 0.0)

    return (
        quad_complex(integrand, 0.0, 1.0)
        + quad_complex(integrand, 1.0, cut, limit=500)
        + quad_complex(integrand, cut, math.inf)
    )


def flight_time_laplace(flight, z: complex) -> complex:
    """
    Laplace transform of the flight-time density at Re z > 0.

    Args:
        flight: FlightTimeDist or ExponentialFlightTimeDist
        z: Complex Laplace argument

    Returns:
        f(z) = E[exp(-z tau)]

    Raises:
        ValueError: If Re z <= 0
        QuadratureError: If the quadrature does not converge
    """
    _check_s(z)
    z = complex(z)
    if isinstance(flight, ExponentialFlightTimeDist):
        return flight.rate / (flight.rate + z)
    if isinstance(flight, FlightTimeDist) and flight.gamma == 1.0 and abs(z) <= CLOSED_FORM_MAX_Z:
        return complex(1.0 - z * cmath.exp(z) * special.exp1(z))
    return _laplace(lambda tau: float(flight.pdf(tau)), z)


def survival_laplace(flight, z: complex) -> complex:
    """Laplace transform of the survival function, (1 - f(z)) / z."""
    _check_s(z)
    z = complex(z)
    if isinstance(flight, ExponentialFlightTimeDist):
        return 1.0 / (flight.rate + z)
    return _laplace(lambda tau: float(flight.survival(tau)), z)


def velocity_characteristic(velocity: VelocityDist, w: float) -> float:
    """
    E[cos(w V)]; exp(-u0 |w|) for the untruncated Lorentzian.

    The truncated law is integrated with QUADPACK's cosine weight, so w
    may be as large as the flight-time tails require.
    """
    if velocity.v_max is None:
        return math.exp(-velocity.u0 * abs(w))
    if w == 0:
        return 1.0
    u0, v_max = velocity.u0, velocity.v_max
    mass = 2.0 * math.atan(v_max / u0) / math.pi
    half = quad_real(
        lambda v: u0 / (math.pi * (u0 * u0 + v * v)), 0.0, v_max, weight="cos", wvar=abs(w)
    )
    return 2.0 * half / mass


def _quadrature_parts(model: SearchModel, k: float, s: complex) -> Tuple[complex, complex, complex]:
    """(F, 1 - F, Psi) by quadrature over the flight time."""
    flight, velocity = model.flight, model.velocity
    s = complex(s)

    def chi(tau: float) -> float:
        return velocity_characteristic(velocity, k * tau)

    def gain(tau: float) -> complex:
        return float(flight.pdf(tau)) * cmath.exp(-s * tau) * chi(tau)

    def loss(tau: float) -> complex:
        return float(flight.pdf(tau)) - gain(tau)

    psi = _laplace(lambda tau: float(flight.survival(tau)) * chi(tau), s)

    # 1 - F without cancellation: integrate f (1 - e^{-s tau} chi) up to the cut
    cut = max(2.0, TAIL_DECAY / s.real)
    head_gain = quad_complex(gain, 0.0, 1.0) + quad_complex(gain, 1.0, cut, limit=500)
    head_loss = quad_complex(loss, 0.0, 1.0) + quad_complex(loss, 1.0, cut, limit=500)
    far = quad_complex(gain, cut, math.inf)

    F = head_gain + far
    one_minus = head_loss + float(flight.survival(cut)) - far
    return F, one_minus, psi


def propagator_fl(
    model: SearchModel,
    k: float,
    s: complex,
    form: str = "renewal",
    method: str = "auto",
) -> complex:
    """
    Montroll-Weiss propagator G(k, s).

    Args:
        model: SearchModel
        k: Fourier variable (1/price)
        s: Laplace variable (1/seconds), Re(s) > 0
        form: "renewal" for F/(1-F), "position" for Psi/(1-F)
        method: "auto" (closed velocity forms when available) or "quadrature"

    Returns:
        Complex G(k, s)

    Raises:
        ValueError: Bad form, method or s
        QuadratureError: If a quadrature does not converge
    """
    if form not in FORMS:
        raise ValueError(f"Unknown propagator form '{form}' (use {', '.join(FORMS)})")
    if method not in METHODS:
        raise ValueError(f"Unknown method '{method}' (use {', '.join(METHODS)})")
    _check_s(s)
    s = complex(s)

    if method == "auto" and (model.is_cauchy or k == 0):
        w = s + model.velocity.u0 * abs(k) if k != 0 else s
        if form == "position":
            return 1.0 / w
        f_hat = flight_time_laplace(model.flight, w)
        one_minus = w * survival_laplace(model.flight, w)
        return f_hat / one_minus

    F, one_minus, psi = _quadrature_parts(model, k, s)
    return (F if form == "renewal" else psi) / one_minus


def _check_gamma(gamma: float) -> None:
    for pole in (1.0, 2.0):
        if abs(gamma - pole) <= GAMMA_POLE_WIDTH:
            raise ValueError(f"Asymptotic expansion is invalid at gamma={pole} (got {gamma})")


def velocity_moment(model: SearchModel, xi: complex, power: float, method: str = "auto", points=None) -> complex:
    """
    E[(1 + xi V)^power] with principal-branch powers.

    The untruncated Lorentzian is continued analytically through its pole,
    giving (1 - i sgn(Im xi) xi u0)^power; that needs Im xi != 0 whenever the
    ordinary integral diverges (power >= 1).
    """
    xi = complex(xi)
    if xi == 0:
        return 1.0 + 0.0j
    u0 = model.velocity.u0
    use_closed = model.is_cauchy and (method == "auto" or power >= 1.0)
    if use_closed:
        if xi.imag == 0.0:
            if power >= 1.0:
                raise ValueError("Lorentzian moment diverges for real xi and power >= 1")
        else:
            return (1.0 - 1j * math.copysign(1.0, xi.imag) * xi * u0) ** power
    return velocity_average(
        lambda v: (1.0 + xi * v) ** power,
        u0,
        model.velocity.v_max,
        points=points,
        limit=400,
    )


def scaling_generating_function(model: SearchModel, xi: complex, method: str = "auto", points=None) -> complex:
    """
    g(xi) = E[(1 + xi V)^(gamma - 1)] / E[(1 + xi V)^gamma].

    Args:
        model: SearchModel with a power-tailed flight law
        xi: Complex argument (ik/s in the asymptotic propagator)
        method: "auto" or "quadrature"
        points: Velocity breakpoints passed to the quadrature

    Returns:
        Complex g(xi)
    """
    gamma = model.gamma
    if gamma is None:
        raise ValueError("Scaling forms need a power-tailed flight-time law")
    _check_gamma(gamma)
    numerator = velocity_moment(model, xi, gamma - 1.0, method, points)
    denominator = velocity_moment(model, xi, gamma, method, points)
    return numerator / denominator


def asymptotic_propagator(model: SearchModel, k: float, s: complex, method: str = "auto") -> complex:
    """
    Small (k, s) propagator: g(ik/s) / s.

    Raises:
        ValueError: gamma within 1e-9 of 1 or 2, or Re(s) <= 0
    """
    _check_s(s)
    s = complex(s)
    return scaling_generating_function(model, 1j * k / s, method) / s


@dataclass
class ScalingEstimate:
    """Ballistic scaling function value with its epsilon ladder."""

    y: float
    value: float
    raw: List[float]
    epsilons: Tuple[float, ...]
    monotone: bool


def ballistic_scaling_function(
    model: SearchModel,
    y: float,
    epsilons: Sequence[float] = SCALING_EPSILONS,
    method: str = "quadrature",
) -> ScalingEstimate:
    """
    Scaling function phi(y) = -(1/pi) lim Im[ g(-1/(y + i eps)) / (y + i eps) ].

    Evaluated at decreasing eps and extrapolated to eps = 0 with a
    quadratic fit.

    Args:
        model: SearchModel with 0 < gamma < 1
        y: Time-averaged velocity x / t
        epsilons: Ladder of eps values
        method: "quadrature" (default) or "auto"

    Returns:
        ScalingEstimate; a non-monotone ladder is flagged (monotone=False)
    """
    gamma = model.gamma
    if gamma is None or not 0.0 < gamma < 1.0:
        raise ValueError(f"Ballistic scaling needs 0 < gamma < 1, got {gamma}")

    raw = []
    for eps in epsilons:
        z = complex(y, eps)
        g = scaling_generating_function(model, -1.0 / z, method, points=[y])
        raw.append(-(g / z).imag / math.pi)

    eps_arr = np.asarray(epsilons, dtype=float)
    raw_arr = np.asarray(raw)
    degree = min(2, len(raw) - 1)
    value = float(np.polyval(np.polyfit(eps_arr, raw_arr, degree), 0.0)) if degree > 0 else raw[0]

    steps = np.diff(raw_arr)
    monotone = bool(np.all(steps >= 0) or np.all(steps <= 0))
    if not monotone:
        logger.warning(f"Non-monotone epsilon ladder at y={y}: {raw}")
    return ScalingEstimate(y=y, value=value, raw=raw, epsilons=tuple(epsilons), monotone=monotone)


def cauchy_propagator(u0: float, x, t):
    """
    Real-space propagator for Lorentzian velocities: u0 t / (pi (u0^2 t^2 + x^2)).

    Raises:
        ValueError: If any t <= 0
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0):
        raise ValueError("Cauchy propagator needs t > 0")
    x_arr = np.asarray(x, dtype=float)
    value = u0 * t_arr / (math.pi * (u0**2 * t_arr**2 + x_arr**2))
    return float(value) if np.ndim(value) == 0 else value


def trade_density_fl(model: SearchModel, k: float, s: complex, method: str = "auto") -> complex:
    """Density of trades q(k, s) = n0(k) / eta * G_renewal(k, s)."""
    G = propagator_fl(model, k, s, form="renewal", method=method)
    return model.initial_density_fourier(k) / model.efficiency_const * G


def make_grid(lo: float, hi: float, count: int, scale: str = "linear") -> np.ndarray:
    """Grid helper for the CLI ('linear' or 'log')."""
    if count < 1:
        raise ValueError("Grid count must be at least 1")
    if scale == "log":
        if lo <= 0 or hi <= 0:
            raise ValueError("Log grids need positive bounds")
        return np.logspace(math.log10(lo), math.log10(hi), count)
    if scale != "linear":
        raise ValueError(f"Unknown grid scale '{scale}'")
    return np.linspace(lo, hi, count)


def propagator_grid(
    model: SearchModel,
    ks: Iterable[float],
    ss: Iterable[float],
    form: str = "position",
    method: str = "auto",
    asymptotic: bool = False,
) -> pd.DataFrame:
    """
    Evaluate the propagator on a (k, s) grid.

    Failed points are kept with NaN values and logged.

    Returns:
        DataFrame with columns k, s, value_re, value_im
    """
    rows = []
    for k in ks:
        for s in ss:
            try:
                if asymptotic:
                    value = asymptotic_propagator(model, k, s, method)
                else:
                    value = propagator_fl(model, k, s, form, method)
            except QuadratureError as e:
                logger.warning(f"Propagator failed at k={k}, s={s}: {e}")
                value = complex(math.nan, math.nan)
            rows.append({"k": k, "s": s, "value_re": value.real, "value_im": value.imag})
    return pd.DataFrame(rows, columns=["k", "s", "value_re", "value_im"])
