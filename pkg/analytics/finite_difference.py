"""
Explicit finite-difference integration of the density equation

    g_t = D(t) g_xx - a(x, t) g_x + v1(t) g + q(x, t)

on a truncated price domain with zero far-field boundaries. Used as an
independent check of the closed-form evaluators.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .density import DiracMass, GaussianBump, GaussianSource, InflowSource, PointSource, ScenarioParams

logger = logging.getLogger(__name__)

CFL_SAFETY = 0.9
DOMAIN_WIDTHS = 10.0


@dataclass
class FiniteDifferenceResult:
    """Solution snapshots: values[i] is g(x, times[i])."""

    x: np.ndarray
    times: np.ndarray
    values: np.ndarray
    dt: float
    n_steps: int

    def at(self, t: float) -> np.ndarray:
        idx = int(np.argmin(np.abs(self.times - t)))
        return self.values[idx]

    def interpolate(self, x, t: float) -> np.ndarray:
        return np.interp(np.asarray(x, dtype=float), self.x, self.at(t))


def _support(initial, source) -> Tuple[float, float]:
    centers, widths = [], []
    for item in (initial, source):
        if item is None:
            continue
        centers.append(getattr(item, "x0", 0.0))
        widths.append(3.0 * getattr(item, "sigma", 1.0))
    if not centers:
        return -1.0, 1.0
    return min(c - w for c, w in zip(centers, widths)), max(c + w for c, w in zip(centers, widths))


def default_domain(params: ScenarioParams, t_end: float, initial=None, source=None) -> Tuple[float, float]:
    """Support of the data widened by 10 sqrt(D_max t) plus the drift travel."""
    lo, hi = _support(initial, source)
    D_max = params.D.max_abs(t_end)
    margin = DOMAIN_WIDTHS * math.sqrt(D_max * t_end)
    samples = np.linspace(0.0, t_end, 51)
    travel = t_end * max(abs(params.drift_constant(s)) for s in samples)
    growth = math.exp(t_end * max(abs(params.net_rate(s)) for s in samples))
    return min(lo, lo * growth) - margin - travel, max(hi, hi * growth) + margin + travel


def solve_finite_difference(
    params: ScenarioParams,
    t_end: float,
    initial=None,
    source=None,
    x_range: Optional[Tuple[float, float]] = None,
    n_x: int = 801,
    times: Optional[Sequence[float]] = None,
) -> FiniteDifferenceResult:
    """
    Integrate the density equation with explicit Euler and central differences.

    The step obeys dt <= 0.9 dx^2 / (2 D_max + |a|_max dx).

    Args:
        params: Scenario coefficients
        t_end: Final time
        initial: GaussianBump, callable g0(x) or None (zero)
        source: GaussianSource, callable q(x, t) or None
        x_range: Domain (default from the data support)
        n_x: Grid points
        times: Snapshot times (default: t_end only)

    Returns:
        FiniteDifferenceResult

    Raises:
        ValueError: Point-like initial data or sources, which the grid cannot represent
    """
    if isinstance(initial, DiracMass) or isinstance(source, (PointSource, InflowSource)):
        raise ValueError("Finite differences need smooth initial data and sources")
    if not t_end > 0:
        raise ValueError(f"t_end must be positive, got {t_end}")

    lo, hi = x_range or default_domain(params, t_end, initial, source)
    x = np.linspace(lo, hi, n_x)
    dx = x[1] - x[0]

    g = np.zeros_like(x) if initial is None else np.asarray(initial(x), dtype=float).copy()
    g[0] = g[-1] = 0.0

    samples = np.linspace(0.0, t_end, 201)
    D_max = max(params.D(s) for s in samples)
    a_max = max(float(np.max(np.abs(params.drift(x, s)))) for s in samples)
    dt_max = CFL_SAFETY * dx**2 / (2.0 * D_max + a_max * dx)

    targets = sorted(set(float(t) for t in (times if times is not None else [t_end])))
    if targets[0] < 0 or targets[-1] > t_end:
        raise ValueError("Snapshot times must lie in [0, t_end]")

    snapshots = []
    now, n_steps = 0.0, 0
    for target in targets:
        span = target - now
        steps = int(math.ceil(span / dt_max)) if span > 0 else 0
        dt = span / steps if steps else 0.0
        for _ in range(steps):
            D = params.D(now)
            a = params.drift(x[1:-1], now)
            v1 = params.v1(now)
            lap = (g[2:] - 2.0 * g[1:-1] + g[:-2]) / dx**2
            grad = (g[2:] - g[:-2]) / (2.0 * dx)
            rhs = D * lap - a * grad + v1 * g[1:-1]
            if source is not None:
                rhs = rhs + np.asarray(source(x[1:-1], now), dtype=float)
            g[1:-1] += dt * rhs
            now += dt
        now = target
        n_steps += steps
        snapshots.append(g.copy())

    logger.debug(f"Finite differences: {n_x} points, {n_steps} steps, dt<={dt_max:.3e}")
    return FiniteDifferenceResult(
        x=x, times=np.array(targets), values=np.vstack(snapshots), dt=dt_max, n_steps=n_steps
    )
