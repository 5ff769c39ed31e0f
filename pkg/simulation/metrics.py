"""
Search-efficiency metrics computed from a trade tape.

Fills produced by one aggressing order at one instant form a single
transaction; durations are measured between transactions.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from book import Side, Trade

logger = logging.getLogger(__name__)

MIN_DURATION = 1e-6


@dataclass
class EfficiencyReport:
    """Rate of trades measured as the mean reciprocal trade duration."""

    n_trades: int
    trade_durations: np.ndarray = field(repr=False)
    efficiency: float
    trades_per_event: float
    n_events: int = 0
    event_rate: Optional[float] = None
    noise_fraction_realized: Optional[float] = None
    flagged: bool = False
    n_transactions: int = 0
    efficiency_positive: float = float("nan")
    floor_share: float = float("nan")

    @property
    def efficiency_per_rate(self) -> Optional[float]:
        """Efficiency normalised by the event arrival rate."""
        if not self.event_rate:
            return None
        return self.efficiency / self.event_rate

    def to_row(self) -> dict:
        return {
            "n_trades": self.n_trades,
            "n_events": self.n_events,
            "efficiency": self.efficiency,
            "trades_per_event": self.trades_per_event,
            "efficiency_per_rate": self.efficiency_per_rate,
            "n_transactions": self.n_transactions,
            "efficiency_positive": self.efficiency_positive,
            "floor_share": self.floor_share,
            "noise_fraction": self.noise_fraction_realized,
            "flagged": self.flagged,
        }


def _trade_times(tape: Union[Sequence[Trade], Sequence[float], np.ndarray]) -> np.ndarray:
    if len(tape) and isinstance(tape[0], Trade):
        return np.array([t.time for t in tape], dtype=float)
    return np.asarray(tape, dtype=float)


def aggressor_order_id(trade: Trade) -> int:
    return trade.buy_order_id if trade.aggressor_side is Side.BUY else trade.sell_order_id


def transaction_times(tape: Union[Sequence[Trade], Sequence[float], np.ndarray]) -> np.ndarray:
    """
    Timestamps of transactions on a tape.

    Consecutive fills sharing a timestamp and an aggressing order collapse
    into one transaction. Bare times carry no order identity, so every
    time is its own transaction.
    """
    if not len(tape) or not isinstance(tape[0], Trade):
        return _trade_times(tape)

    times: List[float] = []
    previous = None
    for trade in tape:
        key = (trade.time, aggressor_order_id(trade))
        if key != previous:
            times.append(trade.time)
            previous = key
    return np.array(times, dtype=float)


def efficiency(
    tape: Union[Sequence[Trade], Sequence[float], np.ndarray],
    n_events: int = 0,
    event_rate: Optional[float] = None,
    noise_fraction: Optional[float] = None,
) -> EfficiencyReport:
    """
    Compute the efficiency of search from a tape.

    Args:
        tape: Trades (or bare trade times), timestamps nondecreasing
        n_events: Number of events in the trial
        event_rate: Poisson event rate of the trial
        noise_fraction: Realised fraction of noise traders

    Returns:
        EfficiencyReport; fewer than 2 transactions yields efficiency 0
        and a flag
    """
    if np.any(np.diff(_trade_times(tape)) < 0):
        raise ValueError("Trade timestamps must be nondecreasing")

    times = transaction_times(tape)
    durations = np.diff(times)
    n_trades = len(tape)
    trades_per_event = n_trades / n_events if n_events else 0.0

    if len(times) < 2:
        logger.debug(f"Efficiency undefined for {len(times)} transaction(s)")
        return EfficiencyReport(
            n_trades=n_trades,
            trade_durations=durations,
            efficiency=0.0,
            trades_per_event=trades_per_event,
            n_events=n_events,
            event_rate=event_rate,
            noise_fraction_realized=noise_fraction,
            flagged=True,
            n_transactions=len(times),
        )

    floored = durations < MIN_DURATION
    reciprocal = 1.0 / np.maximum(durations, MIN_DURATION)
    positive = durations[durations > 0]
    return EfficiencyReport(
        n_trades=n_trades,
        trade_durations=durations,
        efficiency=float(reciprocal.mean()),
        trades_per_event=trades_per_event,
        n_events=n_events,
        event_rate=event_rate,
        noise_fraction_realized=noise_fraction,
        n_transactions=len(times),
        efficiency_positive=float(np.mean(1.0 / positive)) if positive.size else float("nan"),
        floor_share=float(floored.mean()),
    )


def lag1_autocorrelation(prices: Sequence[float]) -> float:
    """
    Lag-1 autocorrelation of successive price changes.

    Negative values indicate bid-ask bounce. NaN when fewer than three
    changes exist or the changes are constant.
    """
    changes = pd.Series(np.diff(np.asarray(prices, dtype=float)))
    if len(changes) < 3 or changes.std() == 0:
        return float("nan")
    return float(changes.autocorr(lag=1))
