"""
Discrete-Event Market Engine

Runs one continuous double auction trial.

Features:
- Poisson event arrivals (exponential inter-arrival times)
- One agent action per event, chosen uniformly among traders that have
  not arrived yet and noise traders waiting to continue after a fill
- Flight expiry checked at every event, including noise traders waiting
  to continue
- A triggered latent order is itself the event's action: at most one
  fires per event and its trades carry that event's timestamp
- Stops when every trader is done, nothing can trade any more, the event
  cap is hit or the time horizon passes
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from agents import (
    FillEvent,
    FlightTimeDist,
    Phase,
    TraderKind,
    TraderState,
    VelocityDist,
    make_rng,
    noise_step,
    open_uniform,
    sample_flight_time,
    sample_quantity,
    sample_velocity,
    strategic_quote,
)
from book import LatentRule, Order, OrderKind, TotalOrderBook, Trade

from .config import Bias, SimConfig
from .metrics import EfficiencyReport, efficiency, lag1_autocorrelation

logger = logging.getLogger(__name__)

TIME_DECIMALS = 9


def interarrival_times(rng: np.random.Generator, rate: float, size: Optional[int] = None):
    """Exponential gaps of a Poisson process with the given rate."""
    return rng.exponential(1.0 / rate, size)


@dataclass
class TrialResult:
    """Everything one trial produced."""

    config: SimConfig
    trades: List[Trade]
    report: EfficiencyReport
    traders: List[TraderState]
    n_events: int
    end_reason: str
    noise_fraction: float
    events: List[Dict] = field(default_factory=list)

    @property
    def prices(self) -> np.ndarray:
        return np.array([t.price for t in self.trades], dtype=float)

    def lag1_autocorrelation(self) -> float:
        return lag1_autocorrelation(self.prices)

    def quote_walk_log(self) -> pd.DataFrame:
        """
        Quote displacement of every searcher over its own lifetime.

        Rows are (walker, time since arrival, quoted price minus the
        trader's first reference price); immediate market orders carry no
        quote and are skipped.
        """
        rows = []
        for trader in self.traders:
            if trader.entry_time is None or trader.reference_price is None:
                continue
            rows.append((trader.trader_id, 0.0, 0.0))
            for time, _, _, price in trader.order_log:
                if price is not None:
                    rows.append(
                        (trader.trader_id, time - trader.entry_time, price - trader.reference_price)
                    )
        return pd.DataFrame(rows, columns=["walker", "time", "position"])


class MarketSimulator:
    """
    Event loop for one trial.

    The simulator owns its book, its traders and its random stream;
    trials share nothing and may run in separate processes.
    """

    def __init__(
        self,
        config: SimConfig,
        traders: Optional[List[TraderState]] = None,
        record_events: bool = False,
    ):
        """
        Initialize a trial.

        Args:
            config: Trial parameters
            traders: Optional explicit population (drawn from config if None)
            record_events: Keep a per-event log
        """
        self.config = config.validate()
        self.rng = make_rng(config.seed)
        self.record_events = record_events
        self.book = TotalOrderBook(
            last_trade_price=config.initial_price,
            activation_tolerance=config.activation_tolerance,
        )

        if traders is None:
            fraction = config.noise_fraction
            if fraction is None:
                fraction = float(self.rng.random())
            traders = self._create_traders(fraction)
        self.traders = traders
        self.noise_fraction = sum(t.kind is TraderKind.NOISE for t in traders) / len(traders)

        self._by_id: Dict[int, TraderState] = {t.trader_id: t for t in traders}
        self._waiting: List[int] = [t.trader_id for t in traders]
        self._continuations: List[Tuple[int, FillEvent]] = []
        self._orders: Dict[int, Order] = {}
        self._handled: set = set()
        self._finished: set = set()
        self._order_ids = itertools.count(1)

        self.now = 0.0
        self.n_events = 0
        self.events: List[Dict] = []

    def _create_traders(self, noise_fraction: float) -> List[TraderState]:
        cfg = self.config
        velocity = VelocityDist(u0=cfg.u0, v_max=cfg.v_max)
        flight = FlightTimeDist(gamma=cfg.gamma)
        biased = cfg.bias is Bias.QUANTITY

        traders = []
        for trader_id in range(cfg.n_traders):
            is_noise = self.rng.random() < noise_fraction
            v = sample_velocity(velocity, open_uniform(self.rng))
            tau = sample_flight_time(flight, open_uniform(self.rng))
            traders.append(
                TraderState(
                    trader_id=trader_id,
                    kind=TraderKind.NOISE if is_noise else TraderKind.STRATEGIC,
                    side_sign=1 if v > 0 else -1,
                    velocity=v,
                    flight_time=tau,
                    quantity=sample_quantity(self.rng, biased, cfg.max_quantity),
                    budget=cfg.budget_multiple * cfg.initial_price if is_noise else None,
                )
            )
        return traders

    # ------------------------------------------------------------------
    # Main loop
    # ------------------------------------------------------------------

    def run(self) -> TrialResult:
        """Run the trial to its end and return the result."""
        cfg = self.config
        logger.debug(
            f"Trial seed={cfg.seed} rate={cfg.event_rate} gamma={cfg.gamma} "
            f"noise={self.noise_fraction:.3f}"
        )

        end_reason = "max_events"
        while self.n_events < cfg.max_events:
            if len(self._finished) == len(self.traders):
                end_reason = "all_done"
                break
            if not self._waiting and not self._continuations and not self.book.has_pending_activation():
                end_reason = "quiescent"
                break

            now = round(self.now + interarrival_times(self.rng, cfg.event_rate), TIME_DECIMALS)
            if cfg.horizon_seconds is not None and now > cfg.horizon_seconds:
                end_reason = "horizon"
                break

            self.now = now
            self.n_events += 1
            self._step(now)

        for trader in self.traders:
            if trader.phase is not Phase.DONE and trader.entry_time is not None:
                trader.exit_reason = "open_at_end"

        report = efficiency(
            self.book.trades,
            n_events=self.n_events,
            event_rate=cfg.event_rate,
            noise_fraction=self.noise_fraction,
        )
        logger.debug(
            f"Trial seed={cfg.seed} ended ({end_reason}) after {self.n_events} events, "
            f"{report.n_trades} trades"
        )
        return TrialResult(
            config=cfg,
            trades=list(self.book.trades),
            report=report,
            traders=self.traders,
            n_events=self.n_events,
            end_reason=end_reason,
            noise_fraction=self.noise_fraction,
            events=self.events,
        )

    def _step(self, now: float) -> None:
        expired = self.book.expire_flights(now)
        for order_id in expired:
            trader = self._owner(order_id)
            if trader is not None and trader.phase is not Phase.DONE:
                trader.finish("expired")
                self._mark_done(trader)
        self._expire_continuations(now)

        action, trader_id, order = "idle", None, None
        start = len(self.book.trades)
        activated = self.book.activate_latent(now, limit=1)
        if activated:
            order = activated[0]
            action, trader_id = "activation", order.trader_id
        elif self._waiting or self._continuations:
            action, trader_id, order = self._act(now)
        self._process_fills(start)

        if self.record_events:
            self.events.append(
                {
                    "event": self.n_events,
                    "time": now,
                    "action": action,
                    "trader_id": trader_id,
                    "order_id": order.id if order is not None else None,
                    "order_kind": order.kind.value if order is not None else None,
                    "expired": len(expired),
                    "activated": len(activated),
                    "trades": len(self.book.trades),
                }
            )

    def _expire_continuations(self, now: float) -> None:
        live = []
        for trader_id, fill in self._continuations:
            trader = self._by_id[trader_id]
            if trader.flight_deadline is not None and now >= trader.flight_deadline:
                trader.finish("expired")
                self._mark_done(trader)
            else:
                live.append((trader_id, fill))
        self._continuations = live

    def _act(self, now: float):
        pool = len(self._waiting) + len(self._continuations)
        j = int(self.rng.integers(pool))
        last = self.book.last_trade_price

        if j < len(self._waiting):
            trader_id = self._waiting[j]
            self._waiting[j] = self._waiting[-1]
            self._waiting.pop()
            trader = self._by_id[trader_id]
            trader.arrive(now)
            order_id = next(self._order_ids)

            if trader.kind is TraderKind.STRATEGIC:
                coin = float(self.rng.random())
                order = strategic_quote(
                    trader, last, now, order_id, coin, self.config.limit_probability
                )
                self._orders[order.id] = order
                if order.kind is OrderKind.LIMIT:
                    self.book.insert_order(order, now)
                else:
                    self.book.submit_latent(order, LatentRule(price_trigger=order.price), now)
                return "arrival", trader_id, order

            order = noise_step(trader, None, last, now, order_id)
            return "arrival", trader_id, self._submit(trader, order, now)

        trader_id, fill = self._continuations.pop(j - len(self._waiting))
        trader = self._by_id[trader_id]
        order = noise_step(trader, fill, last, now, next(self._order_ids))
        return "continuation", trader_id, self._submit(trader, order, now)

    def _submit(self, trader: TraderState, order: Optional[Order], now: float) -> Optional[Order]:
        if order is None:
            self._mark_done(trader)
            return None
        self._orders[order.id] = order
        self.book.insert_order(order, now)
        return order

    def _process_fills(self, start: int) -> None:
        new_trades = self.book.trades[start:]
        if not new_trades:
            return

        final: Dict[int, Tuple[int, float]] = {}
        for i, trade in enumerate(new_trades):
            final[trade.buy_order_id] = (i, trade.price)
            final[trade.sell_order_id] = (i, trade.price)

        for order_id, (_, price) in sorted(final.items(), key=lambda kv: kv[1][0]):
            if order_id in self.book or order_id in self._handled or order_id not in self._orders:
                continue
            self._handled.add(order_id)
            order = self._orders[order_id]
            trader = self._by_id[order.trader_id]

            if trader.kind is TraderKind.STRATEGIC:
                trader.last_reference_price = price
                trader.finish("filled")
                self._mark_done(trader)
            elif trader.phase is not Phase.DONE:
                trader.active_order_id = None
                self._continuations.append(
                    (
                        trader.trader_id,
                        FillEvent(
                            order_id=order_id,
                            side=order.side,
                            kind=order.kind,
                            price=price,
                            quantity=order.original_quantity,
                        ),
                    )
                )

    def _owner(self, order_id: int) -> Optional[TraderState]:
        order = self._orders.get(order_id)
        return self._by_id.get(order.trader_id) if order is not None else None

    def _mark_done(self, trader: TraderState) -> None:
        if trader.phase is Phase.DONE:
            self._finished.add(trader.trader_id)


def run_trial(config: SimConfig, record_events: bool = False) -> TrialResult:
    """
    Convenience wrapper: build a MarketSimulator and run it.

    Args:
        config: Trial parameters
        record_events: Keep a per-event log

    Returns:
        TrialResult with tape, efficiency report and (optionally) event log
    """
    return MarketSimulator(config, record_events=record_events).run()
