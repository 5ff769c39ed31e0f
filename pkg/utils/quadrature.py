"""
Quadrature helpers shared by the analytics packages.

Features:
- Adaptive Simpson rule for smooth time integrals of tabulated coefficients
- QUADPACK wrappers (scipy) that report the achieved tolerance
- Complex-valued integrands split into real and imaginary parts
- Velocity averages over a (possibly truncated) Lorentzian on a tan-substituted domain
"""

import logging
import math
from typing import Callable, Optional, Sequence, Tuple

from scipy import integrate

logger = logging.getLogger(__name__)

DEFAULT_EPSABS = 1e-9
DEFAULT_EPSREL = 1e-7

# Accepted error when QUADPACK flags a problem but still returns a usable value
LOOSE_TOLERANCE = 1e-5


class QuadratureError(ValueError):
    """Raised when a quadrature fails to reach a usable tolerance."""

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved tolerance {achieved:.3e})")
        self.achieved = achieved


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-9,
    max_depth: int = 50,
) -> Tuple[float, float]:
    """
    Adaptive Simpson's rule.

    Args:
        f: Function to integrate
        a: Lower bound
        b: Upper bound
        tol: Absolute error tolerance
        max_depth: Maximum recursion depth

    Returns:
        Tuple of (integral value, error estimate)
    """
    if a == b:
        return 0.0, 0.0
    if a > b:
        value, error = adaptive_simpson(f, b, a, tol, max_depth)
        return -value, error

    def _simpson(fa: float, fm: float, fb: float, h: float) -> float:
        return h / 3.0 * (fa + 4.0 * fm + fb)

    def _recurse(lo, hi, flo, fmid, fhi, whole, depth, eps):
        mid = 0.5 * (lo + hi)
        h = 0.5 * (hi - lo)
        fl = f(0.5 * (lo + mid))
        fr = f(0.5 * (mid + hi))
        left = _simpson(flo, fl, fmid, 0.5 * h)
        right = _simpson(fmid, fr, fhi, 0.5 * h)
        estimate = (left + right - whole) / 15.0

        if depth >= max_depth or abs(estimate) < eps:
            return left + right + estimate, abs(estimate)

        lv, le = _recurse(lo, mid, flo, fl, fmid, left, depth + 1, 0.5 * eps)
        rv, re = _recurse(mid, hi, fmid, fr, fhi, right, depth + 1, 0.5 * eps)
        return lv + rv, le + re

    fa, fb = f(a), f(b)
    fm = f(0.5 * (a + b))
    whole = _simpson(fa, fm, fb, 0.5 * (b - a))
    return _recurse(a, b, fa, fm, fb, whole, 0, tol)


def integrate_segments(
    f: Callable[[float], float],
    breakpoints: Sequence[float],
    tol: float = 1e-9,
) -> float:
    """Adaptive Simpson over consecutive segments (kinks sit on breakpoints)."""
    total = 0.0
    for lo, hi in zip(breakpoints[:-1], breakpoints[1:]):
        if hi > lo:
            value, _ = adaptive_simpson(f, lo, hi, tol=tol)
            total += value
    return total


def quad_real(
    f: Callable[[float], float],
    a: float,
    b: float,
    epsabs: float = DEFAULT_EPSABS,
    epsrel: float = DEFAULT_EPSREL,
    limit: int = 200,
    points: Optional[Sequence[float]] = None,
    weight: Optional[str] = None,
    wvar: Optional[float] = None,
) -> float:
    """
    Wrap scipy.integrate.quad and check convergence.

    Args:
        f: Real integrand
        a: Lower bound (may be -inf)
        b: Upper bound (may be inf)
        epsabs: Absolute tolerance
        epsrel: Relative tolerance
        limit: Maximum number of subintervals
        points: Optional breakpoints (finite intervals only)
        weight: Optional QUADPACK weight ('cos' or 'sin')
        wvar: Frequency for the weight

    Returns:
        Integral value

    Raises:
        QuadratureError: If QUADPACK fails and the error estimate is not usable
    """
    kwargs = {"epsabs": epsabs, "epsrel": epsrel, "limit": limit, "full_output": 1}
    if points is not None:
        kwargs["points"] = points
    if weight is not None:
        kwargs["weight"] = weight
        kwargs["wvar"] = wvar

    result = integrate.quad(f, a, b, **kwargs)
    value, abserr = result[0], result[1]

    if len(result) > 3:
        # QUADPACK appended a warning message
        usable = LOOSE_TOLERANCE * max(1.0, abs(value))
        if not math.isfinite(value) or abserr > usable:
            raise QuadratureError(f"Quadrature did not converge on [{a}, {b}]", abserr)
        logger.debug(f"Quadrature warning on [{a}, {b}], abserr={abserr:.3e}")

    return value


def quad_complex(
    f: Callable[[float], complex],
    a: float,
    b: float,
    **kwargs,
) -> complex:
    """Integrate a complex-valued function by parts (real and imaginary)."""
    re = quad_real(lambda x: f(x).real, a, b, **kwargs)
    im = quad_real(lambda x: f(x).imag, a, b, **kwargs)
    return complex(re, im)


def velocity_average(
    g: Callable[[float], complex],
    u0: float,
    v_max: Optional[float] = None,
    points: Optional[Sequence[float]] = None,
    complex_valued: bool = True,
    **kwargs,
):
    """
    Average g(V) over a Lorentzian velocity with half-width u0.

    The substitution v = u0 tan(theta) maps the density h(v) dv onto
    d(theta) / pi, so the heavy tails become a finite, smooth interval.
    A truncation at |v| <= v_max restricts theta and renormalizes.

    Args:
        g: Function of the velocity
        u0: Lorentzian half-width
        v_max: Optional symmetric truncation
        points: Optional velocity breakpoints (kinks of g)
        complex_valued: Integrate real and imaginary parts separately

    Returns:
        E[g(V)]
    """
    theta_max = math.pi / 2 if v_max is None else math.atan(v_max / u0)
    theta_points = None
    if points is not None:
        theta_points = [
            math.atan(p / u0) for p in points if abs(math.atan(p / u0)) < theta_max
        ] or None

    def _integrand(theta: float):
        return g(u0 * math.tan(theta))

    lo, hi = -theta_max, theta_max
    if complex_valued:
        value = quad_complex(_integrand, lo, hi, points=theta_points, **kwargs)
    else:
        value = quad_real(_integrand, lo, hi, points=theta_points, **kwargs)
    return value / (2.0 * theta_max)
