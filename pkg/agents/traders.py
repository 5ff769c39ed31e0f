"""
Zero-intelligence trader behaviour.

Noise traders alternate market orders at the last trade price with limit
orders 0.10 away from their fills until their flight ends or their budget
runs out. Strategic traders place a single quote displaced from the last
trade price by velocity x flight time.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

from book import Order, OrderKind, Side, from_ticks, to_ticks

logger = logging.getLogger(__name__)

NOISE_LIMIT_OFFSET = 0.10
MIN_PRICE = 0.01
MIN_FLIGHT_TIME = 1e-9


class TraderKind(str, Enum):
    NOISE = "NOISE"
    STRATEGIC = "STRATEGIC"


class Phase(str, Enum):
    IDLE = "IDLE"
    AWAITING_MARKET_FILL = "AWAITING_MARKET_FILL"
    AWAITING_LIMIT_FILL = "AWAITING_LIMIT_FILL"
    DONE = "DONE"


@dataclass(frozen=True)
class FillEvent:
    """A trader's order was completely filled (price of the last fill)."""

    order_id: int
    side: Side
    kind: OrderKind
    price: float
    quantity: int


@dataclass
class TraderState:
    """One agent and its lifecycle."""

    trader_id: int
    kind: TraderKind
    side_sign: int
    velocity: float
    flight_time: float
    quantity: int = 1
    budget: Optional[float] = None
    phase: Phase = Phase.IDLE
    entry_time: Optional[float] = None
    flight_deadline: Optional[float] = None
    reference_price: Optional[float] = None  # first transaction the trader saw
    last_reference_price: Optional[float] = None  # price its latest quote deviated from
    active_order_id: Optional[int] = None
    exit_reason: Optional[str] = None
    order_log: List[Tuple[float, OrderKind, Side, Optional[float]]] = field(default_factory=list)

    @property
    def side(self) -> Side:
        return Side.from_sign(self.side_sign)

    @property
    def expected_return(self) -> Optional[float]:
        """velocity x flight time over the reference price."""
        if not self.reference_price:
            return None
        return self.velocity * self.flight_time / self.reference_price

    def arrive(self, now: float) -> None:
        self.entry_time = now
        self.flight_deadline = now + max(self.flight_time, MIN_FLIGHT_TIME)

    def finish(self, reason: str) -> None:
        self.phase = Phase.DONE
        self.exit_reason = reason
        self.active_order_id = None

    def _observe(self, price: float) -> None:
        if self.reference_price is None:
            self.reference_price = price
        self.last_reference_price = price

    def _log(self, order: Order) -> Order:
        self.order_log.append((order.entry_time, order.kind, order.side, order.price))
        self.active_order_id = order.id
        return order


def clamp_price(price: float) -> float:
    """Quantize to the tick grid, never below one tick."""
    return from_ticks(max(to_ticks(price), to_ticks(MIN_PRICE)))


def strategic_quote(
    trader: TraderState,
    last_trade_price: float,
    now: float,
    order_id: int,
    coin: float,
    limit_probability: float = 0.5,
) -> Order:
    """
    Place the single quote of a strategic trader.

    Args:
        trader: Strategic trader in phase IDLE
        last_trade_price: Current reference price
        now: Simulation time
        order_id: Id for the new order
        coin: Uniform draw deciding limit (coin < limit_probability) or market
        limit_probability: Probability of a limit order

    Returns:
        The order; a market order carries its quote as trigger price and is
        meant for the latent book
    """
    if trader.kind is not TraderKind.STRATEGIC:
        raise ValueError(f"Trader {trader.trader_id} is not strategic")
    if trader.phase is not Phase.IDLE:
        raise ValueError(f"Trader {trader.trader_id} already quoted")

    if trader.flight_deadline is None:
        trader.arrive(now)

    price = clamp_price(last_trade_price + trader.velocity * trader.flight_time)
    kind = OrderKind.LIMIT if coin < limit_probability else OrderKind.MARKET
    side = Side.BUY if trader.velocity > 0 else Side.SELL

    order = Order(
        id=order_id,
        side=side,
        kind=kind,
        quantity=trader.quantity,
        trader_id=trader.trader_id,
        entry_time=now,
        flight_deadline=trader.flight_deadline,
        price=price,
    )
    trader._observe(last_trade_price)
    trader.phase = (
        Phase.AWAITING_LIMIT_FILL if kind is OrderKind.LIMIT else Phase.AWAITING_MARKET_FILL
    )
    return trader._log(order)


def noise_step(
    trader: TraderState,
    fill: Optional[FillEvent],
    last_trade_price: float,
    now: float,
    order_id: int,
) -> Optional[Order]:
    """
    Advance a noise trader's state machine by one action.

    Args:
        trader: Noise trader
        fill: Completed fill of the trader's live order, if any
        last_trade_price: Current reference price
        now: Simulation time
        order_id: Id for a new order, if one is placed

    Returns:
        The next order, or None (no action, or the trader exited;
        phase DONE signals exit)
    """
    if trader.kind is not TraderKind.NOISE:
        raise ValueError(f"Trader {trader.trader_id} is not a noise trader")
    if trader.phase is Phase.DONE:
        return None

    if trader.flight_deadline is None:
        trader.arrive(now)
    if now >= trader.flight_deadline:
        trader.finish("expired")
        return None

    if fill is not None:
        _settle(trader, fill)
        if trader.phase is Phase.AWAITING_MARKET_FILL:
            return _place_limit(trader, fill.price, now, order_id)
        if trader.phase is Phase.AWAITING_LIMIT_FILL:
            return _place_market(trader, last_trade_price, now, order_id)
        return None

    if trader.phase is Phase.IDLE:
        return _place_market(trader, last_trade_price, now, order_id)
    return None


def _settle(trader: TraderState, fill: FillEvent) -> None:
    cash = fill.price * fill.quantity
    if trader.budget is not None:
        trader.budget += -cash if fill.side is Side.BUY else cash
    trader._observe(fill.price)
    trader.active_order_id = None


def _can_afford(trader: TraderState, price: float) -> bool:
    if trader.budget is None:
        return True
    return trader.budget >= price * trader.quantity


def _place_market(trader: TraderState, last_trade_price: float, now: float, order_id: int) -> Optional[Order]:
    side = trader.side
    if side is Side.BUY and not _can_afford(trader, last_trade_price):
        logger.debug(f"Noise trader {trader.trader_id} defaults (budget {trader.budget:.2f})")
        trader.finish("budget_default")
        return None

    trader.phase = Phase.AWAITING_MARKET_FILL
    return trader._log(
        Order(
            id=order_id,
            side=side,
            kind=OrderKind.MARKET,
            quantity=trader.quantity,
            trader_id=trader.trader_id,
            entry_time=now,
            flight_deadline=trader.flight_deadline,
        )
    )


def _place_limit(trader: TraderState, fill_price: float, now: float, order_id: int) -> Optional[Order]:
    side = trader.side.opposite
    offset = NOISE_LIMIT_OFFSET if side is Side.SELL else -NOISE_LIMIT_OFFSET
    price = clamp_price(fill_price + offset)

    if side is Side.BUY and not _can_afford(trader, price):
        logger.debug(f"Noise trader {trader.trader_id} defaults (budget {trader.budget:.2f})")
        trader.finish("budget_default")
        return None

    trader.phase = Phase.AWAITING_LIMIT_FILL
    return trader._log(
        Order(
            id=order_id,
            side=side,
            kind=OrderKind.LIMIT,
            quantity=trader.quantity,
            trader_id=trader.trader_id,
            entry_time=now,
            flight_deadline=trader.flight_deadline,
            price=price,
        )
    )
