"""
Sweep statistics: regime ordering, bias effect, noise independence and
bid-ask bounce, computed from the per-trial diagnostics table, plus a
record of how many trials were cut short by the event cap.
"""

import logging
import math
from itertools import combinations
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from scipy import stats

logger = logging.getLogger(__name__)

ALPHA = 0.05
LOW_RATE_LIMIT = 100.0
POOLED_SE_LIMIT = 2.0
SPEARMAN_LIMIT = 0.25
SAWTOOTH_GAMMA = 1.5
SAWTOOTH_MIN_SHARE = 0.8
SAWTOOTH_RATE_LIMIT = 1000.0


def _efficiencies(frame: pd.DataFrame, rate: float, gamma: float, bias: str) -> np.ndarray:
    mask = (
        np.isclose(frame["event_rate"], rate)
        & np.isclose(frame["gamma"], gamma)
        & (frame["bias"] == bias)
    )
    return frame.loc[mask, "efficiency"].to_numpy(dtype=float)


def one_sided_greater(a: np.ndarray, b: np.ndarray) -> float:
    """p-value of the Mann-Whitney test that `a` is stochastically greater than `b`."""
    if len(a) == 0 or len(b) == 0:
        return math.nan
    return float(stats.mannwhitneyu(a, b, alternative="greater").pvalue)


def pooled_standard_error(a: np.ndarray, b: np.ndarray) -> float:
    """Standard error of the difference of two sample means."""
    if len(a) < 2 or len(b) < 2:
        return math.nan
    return math.sqrt(np.var(a, ddof=1) / len(a) + np.var(b, ddof=1) / len(b))


def regime_ordering(frame: pd.DataFrame, bias: str = "none") -> List[Dict]:
    """
    Check mean efficiency decreases with gamma at each rate <= 100.

    Returns:
        One record per (rate, lower gamma, higher gamma) pair
    """
    records = []
    gammas = sorted(frame["gamma"].unique())
    for rate in sorted(frame["event_rate"].unique()):
        if rate > LOW_RATE_LIMIT:
            continue
        for low, high in combinations(gammas, 2):
            a = _efficiencies(frame, rate, low, bias)
            b = _efficiencies(frame, rate, high, bias)
            p = one_sided_greater(a, b)
            passed = bool(len(a) and len(b) and a.mean() > b.mean() and p < ALPHA)
            records.append(
                {
                    "check": "regime_ordering",
                    "bias": bias,
                    "event_rate": rate,
                    "comparison": f"gamma {low} > gamma {high}",
                    "statistic": float(a.mean() - b.mean()) if len(a) and len(b) else math.nan,
                    "p_value": p,
                    "passed": passed,
                }
            )
    return records


def high_rate_parity(frame: pd.DataFrame, gammas=(1.5, 2.5), bias: str = "none") -> Optional[Dict]:
    """At the highest rate, the two gammas' means lie within two pooled standard errors."""
    if frame.empty:
        return None
    rate = float(frame["event_rate"].max())
    a = _efficiencies(frame, rate, gammas[0], bias)
    b = _efficiencies(frame, rate, gammas[1], bias)
    se = pooled_standard_error(a, b)
    if math.isnan(se):
        return None
    gap = abs(a.mean() - b.mean())
    return {
        "check": "high_rate_parity",
        "bias": bias,
        "event_rate": rate,
        "comparison": f"|gamma {gammas[0]} - gamma {gammas[1]}|",
        "statistic": gap / se if se > 0 else math.inf,
        "p_value": math.nan,
        "passed": bool(gap <= POOLED_SE_LIMIT * se),
    }


def bias_effect(frame: pd.DataFrame, gammas=(1.5, 2.5), bias: str = "quantity") -> Optional[Dict]:
    """With biased quantities, the superdiffusive gamma beats the Brownian one at the highest rate."""
    sub = frame[frame["bias"] == bias]
    if sub.empty:
        return None
    rate = float(sub["event_rate"].max())
    a = _efficiencies(frame, rate, gammas[0], bias)
    b = _efficiencies(frame, rate, gammas[1], bias)
    if len(a) == 0 or len(b) == 0:
        return None
    p = one_sided_greater(a, b)
    return {
        "check": "bias_effect",
        "bias": bias,
        "event_rate": rate,
        "comparison": f"gamma {gammas[0]} > gamma {gammas[1]}",
        "statistic": float(a.mean() - b.mean()),
        "p_value": p,
        "passed": bool(a.mean() > b.mean() and p < ALPHA),
    }


def noise_independence(frame: pd.DataFrame, bias: str = "none") -> Optional[Dict]:
    """Spearman correlation of realised noise fraction with efficiency per unit rate."""
    sub = frame[frame["bias"] == bias].dropna(subset=["noise_fraction", "efficiency_per_rate"])
    if len(sub) < 3:
        return None
    rho, p = stats.spearmanr(sub["noise_fraction"], sub["efficiency_per_rate"])
    return {
        "check": "noise_independence",
        "bias": bias,
        "event_rate": math.nan,
        "comparison": f"spearman over {len(sub)} trials",
        "statistic": float(rho),
        "p_value": float(p),
        "passed": bool(abs(rho) < SPEARMAN_LIMIT),
    }


def sawtooth(frame: pd.DataFrame, gamma: float = SAWTOOTH_GAMMA, bias: str = "quantity") -> List[Dict]:
    """Share of trials with negative lag-1 autocorrelation of price changes, per rate."""
    records = []
    sub = frame[np.isclose(frame["gamma"], gamma) & (frame["bias"] == bias)]
    for rate, group in sub.groupby("event_rate"):
        if rate > SAWTOOTH_RATE_LIMIT:
            continue
        values = group["lag1_autocorr"].to_numpy(dtype=float)
        negative = int(np.sum(values < 0))
        records.append(
            {
                "check": "sawtooth",
                "bias": bias,
                "event_rate": float(rate),
                "comparison": f"{negative} of {len(values)} trials negative",
                "statistic": negative / len(values) if len(values) else math.nan,
                "p_value": math.nan,
                "passed": bool(len(values) and negative >= SAWTOOTH_MIN_SHARE * len(values)),
            }
        )
    return records


def event_cap(frame: pd.DataFrame) -> Optional[Dict]:
    """Share of trials that stopped on max_events rather than running out of actions."""
    if "end_reason" not in frame.columns or frame["end_reason"].isna().all():
        return None
    reasons = frame["end_reason"].value_counts()
    capped = int(reasons.get("max_events", 0))
    breakdown = ", ".join(f"{reason} {count}" for reason, count in sorted(reasons.items()))
    return {
        "check": "event_cap",
        "bias": "all",
        "event_rate": math.nan,
        "comparison": f"{capped} of {len(frame)} trials capped ({breakdown})",
        "statistic": capped / len(frame),
        "p_value": math.nan,
        "passed": capped == 0,
    }


def build_report(diagnostics: pd.DataFrame) -> pd.DataFrame:
    """
    Run every check the grid supports.

    Args:
        diagnostics: SweepResult.diagnostics

    Returns:
        DataFrame with columns check, bias, event_rate, comparison,
        statistic, p_value, passed
    """
    frame = diagnostics[diagnostics["status"] == "success"]
    records: List[Dict] = []

    records += regime_ordering(frame, "none")
    for record in (high_rate_parity(frame), bias_effect(frame), noise_independence(frame)):
        if record is not None:
            records.append(record)
    records += sawtooth(frame)
    capped = event_cap(frame)
    if capped is not None:
        records.append(capped)

    report = pd.DataFrame(
        records,
        columns=["check", "bias", "event_rate", "comparison", "statistic", "p_value", "passed"],
    )
    logger.info(f"Report: {int(report['passed'].sum())} of {len(report)} checks passed")
    return report
