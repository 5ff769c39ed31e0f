"""
Lévy-walk ensembles and mean-squared-displacement estimation.

Features:
- Synthetic walkers: constant speed with random direction, or a Lorentzian
  velocity redrawn at every flight; power-law (or exponential) flight times
- Positions sampled on a common time grid, vectorised flight by flight
- Irregular quote-walk logs resampled onto a grid (step interpolation)
- MSD exponent from a log-log fit over the central decade
- Monte-Carlo Fourier-Laplace transform of the walker density
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import pandas as pd
from scipy import stats

from agents import open_uniform, sample_flight_time, sample_velocity

logger = logging.getLogger(__name__)

MSD_TIMES = np.logspace(0.0, 4.0, 41)


@dataclass
class WalkEnsemble:
    """Walker positions on a shared time grid (NaN where a walker is not alive)."""

    times: np.ndarray
    positions: np.ndarray  # shape (n_walkers, n_times)

    @property
    def n_walkers(self) -> int:
        return self.positions.shape[0]

    def to_log(self) -> pd.DataFrame:
        """Long format: walker, time, position."""
        walkers, steps = np.nonzero(~np.isnan(self.positions))
        return pd.DataFrame(
            {
                "walker": walkers,
                "time": self.times[steps],
                "position": self.positions[walkers, steps],
            }
        )

    @classmethod
    def from_log(cls, log: pd.DataFrame, times: Optional[np.ndarray] = None) -> "WalkEnsemble":
        """
        Resample an irregular walk log onto a grid.

        A walker holds its last recorded position until its last record,
        and is absent afterwards.

        Args:
            log: Columns walker, time, position
            times: Grid (log-spaced over the positive recorded times if None)

        Returns:
            WalkEnsemble
        """
        if times is None:
            positive = log.loc[log["time"] > 0, "time"]
            if positive.empty:
                raise ValueError("Walk log has no positive times")
            lo, hi = positive.min(), log["time"].max()
            times = np.logspace(math.log10(lo), math.log10(hi), 41) if hi > lo else np.array([lo])
        times = np.asarray(times, dtype=float)

        groups = list(log.sort_values(["walker", "time"]).groupby("walker", sort=True))
        positions = np.full((len(groups), len(times)), np.nan)
        for row, (_, walk) in enumerate(groups):
            t = walk["time"].to_numpy()
            x = walk["position"].to_numpy()
            idx = np.searchsorted(t, times, side="right") - 1
            alive = (idx >= 0) & (times <= t[-1])
            positions[row, alive] = x[idx[alive]]
        return cls(times=times, positions=positions)


@dataclass
class MsdEstimate:
    """Fitted MSD exponent."""

    alpha: float
    stderr: float
    times: np.ndarray
    msd: np.ndarray
    counts: np.ndarray
    fit_window: Tuple[float, float]
    n_points: int
    flagged: bool = False

    def curve(self) -> pd.DataFrame:
        return pd.DataFrame({"time": self.times, "msd": self.msd, "count": self.counts})


def simulate_levy_walks(
    flight,
    n_walkers: int,
    rng: np.random.Generator,
    times: np.ndarray = MSD_TIMES,
    speed: float = 1.0,
    velocity=None,
) -> WalkEnsemble:
    """
    Simulate independent Lévy walkers started at the origin at t = 0.

    Args:
        flight: Flight-time distribution
        n_walkers: Number of walkers
        rng: Random stream
        times: Sampling grid
        speed: Constant speed (direction +/-1 drawn per flight) when velocity is None
        velocity: Optional VelocityDist; a velocity is drawn per flight

    Returns:
        WalkEnsemble with positions at every grid time
    """
    times = np.sort(np.asarray(times, dtype=float))
    t_end = times[-1]
    positions = np.full((n_walkers, len(times)), np.nan)
    t_cur = np.zeros(n_walkers)
    x_cur = np.zeros(n_walkers)
    next_idx = np.zeros(n_walkers, dtype=int)
    active = np.arange(n_walkers)

    rounds = 0
    while active.size:
        size = active.size
        tau = sample_flight_time(flight, open_uniform(rng, size))
        if velocity is None:
            v = np.where(rng.random(size) < 0.5, -speed, speed)
        else:
            v = sample_velocity(velocity, open_uniform(rng, size))

        t0 = t_cur[active]
        x0 = x_cur[active]
        t1 = t0 + tau
        stop = np.searchsorted(times, t1, side="right")

        pending = next_idx[active] < stop
        while np.any(pending):
            walkers = active[pending]
            k = next_idx[walkers]
            positions[walkers, k] = x0[pending] + v[pending] * (times[k] - t0[pending])
            next_idx[walkers] += 1
            pending = next_idx[active] < stop

        t_cur[active] = t1
        x_cur[active] = x0 + v * tau
        active = active[t1 < t_end]
        rounds += 1

    logger.debug(f"Simulated {n_walkers} walkers in {rounds} flight rounds")
    return WalkEnsemble(times=times, positions=positions)


def msd_of_quotes(
    walks,
    times: Optional[np.ndarray] = None,
    min_walkers: int = 10,
) -> MsdEstimate:
    """
    Estimate the MSD exponent alpha from a walk ensemble or walk log.

    Args:
        walks: WalkEnsemble, or DataFrame with columns walker, time, position
        times: Grid used when resampling a log
        min_walkers: Minimum walkers alive for a grid time to enter the fit

    Returns:
        MsdEstimate; fewer than 3 usable points (or less than a decade of
        data) is flagged
    """
    if isinstance(walks, pd.DataFrame):
        walks = WalkEnsemble.from_log(walks, times)

    squared = walks.positions**2
    counts = np.sum(~np.isnan(squared), axis=0)
    with np.errstate(invalid="ignore"):
        msd = np.where(counts > 0, np.nansum(squared, axis=0) / np.maximum(counts, 1), np.nan)

    positive = walks.times[walks.times > 0]
    flagged = False
    if positive.size == 0:
        return MsdEstimate(math.nan, math.nan, walks.times, msd, counts, (math.nan, math.nan), 0, True)

    lo, hi = math.log10(positive.min()), math.log10(positive.max())
    if hi - lo >= 1.0:
        mid = 0.5 * (lo + hi)
        window = (10 ** (mid - 0.5), 10 ** (mid + 0.5))
    else:
        window = (10**lo, 10**hi)
        flagged = True

    eps = 1e-12
    use = (
        (walks.times >= window[0] * (1 - eps))
        & (walks.times <= window[1] * (1 + eps))
        & (counts >= min_walkers)
        & (msd > 0)
    )
    if use.sum() < 3:
        logger.warning(f"Too few MSD samples for a fit ({int(use.sum())} points)")
        return MsdEstimate(math.nan, math.nan, walks.times, msd, counts, window, int(use.sum()), True)

    fit = stats.linregress(np.log10(walks.times[use]), np.log10(msd[use]))
    return MsdEstimate(
        alpha=float(fit.slope),
        stderr=float(fit.stderr),
        times=walks.times,
        msd=msd,
        counts=counts,
        fit_window=window,
        n_points=int(use.sum()),
        flagged=flagged,
    )


def expected_msd_exponent(gamma: float) -> float:
    """Regime law: 2 (ballistic), 3 - gamma (superdiffusive), 1 (normal)."""
    if gamma < 1:
        return 2.0
    if gamma < 2:
        return 3.0 - gamma
    return 1.0


def monte_carlo_propagator(
    velocity,
    flight,
    k: float,
    s: float,
    n_walkers: int,
    rng: np.random.Generator,
    horizon_factor: float = 40.0,
) -> Tuple[float, float]:
    """
    Monte-Carlo estimate of the walker density in Fourier-Laplace space.

    Each flight contributes the exact integral of exp(-s t - i k x(t)) over
    its straight segment; walkers run until exp(-s t) is negligible.

    Args:
        velocity: VelocityDist drawn at every flight
        flight: Flight-time distribution
        k: Fourier variable
        s: Laplace variable (real, > 0)
        n_walkers: Ensemble size
        rng: Random stream
        horizon_factor: Walkers stop once s t exceeds this

    Returns:
        (real part of the estimate, its standard error)
    """
    if not s > 0:
        raise ValueError("Monte-Carlo propagator needs a real s > 0")

    horizon = horizon_factor / s
    t_cur = np.zeros(n_walkers)
    x_cur = np.zeros(n_walkers)
    total = np.zeros(n_walkers, dtype=complex)
    active = np.arange(n_walkers)

    while active.size:
        size = active.size
        tau = sample_flight_time(flight, open_uniform(rng, size))
        v = sample_velocity(velocity, open_uniform(rng, size))
        z = s + 1j * k * v
        phase = np.exp(-1j * k * x_cur[active] - s * t_cur[active])
        total[active] += phase * (-np.expm1(-z * tau)) / z

        t_cur[active] += tau
        x_cur[active] += v * tau
        active = active[t_cur[active] < horizon]

    values = total.real
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(n_walkers))
