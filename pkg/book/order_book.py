"""
Total Order Book

One-dimensional price lattice holding the visible limit order book,
resting (unfilled) market orders and latent orders that wait for a
time or price trigger before they become visible.

Features:
- Prices quantized to a 0.01 tick, rounded half away from zero
- Price-time priority (FIFO by entry time, ties by id) within a level
- Resting market orders matched first by incoming limit orders
- Latent orders activated by time or by proximity to the last trade price
- Inclusive flight expiry across visible, resting and latent orders
"""

import bisect
import heapq
import logging
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum
from typing import Dict, List, Optional, Tuple

logger = logging.getLogger(__name__)

TICK = Decimal("0.01")
TICKS_PER_UNIT = 100


class OrderRejected(ValueError):
    """Raised when an order cannot enter the book."""


class Side(str, Enum):
    BUY = "BUY"
    SELL = "SELL"

    @property
    def opposite(self) -> "Side":
        return Side.SELL if self is Side.BUY else Side.BUY

    @classmethod
    def from_sign(cls, sign: float) -> "Side":
        return cls.BUY if sign > 0 else cls.SELL


class OrderKind(str, Enum):
    LIMIT = "LIMIT"
    MARKET = "MARKET"


def to_ticks(price: float) -> int:
    """Quantize a price to an integer number of ticks."""
    quantized = Decimal(repr(float(price))).quantize(TICK, rounding=ROUND_HALF_UP)
    return int(quantized * TICKS_PER_UNIT)


def from_ticks(ticks: int) -> float:
    """Convert ticks back to a price."""
    return ticks / TICKS_PER_UNIT


def quantize_price(price: float) -> float:
    """Round a price to the tick grid."""
    return from_ticks(to_ticks(price))


@dataclass
class Order:
    """A quote on the lattice."""

    id: int
    side: Side
    kind: OrderKind
    quantity: int
    trader_id: int
    entry_time: float
    flight_deadline: float
    price: Optional[float] = None  # limit price, or trigger price of a latent market order
    original_quantity: int = field(init=False)

    def __post_init__(self):
        if self.price is not None:
            self.price = quantize_price(self.price)
        self.original_quantity = self.quantity

    @property
    def priority(self) -> Tuple[float, int]:
        return (self.entry_time, self.id)


@dataclass(frozen=True)
class LatentRule:
    """Activation rule of a latent order (either trigger fires it)."""

    time_trigger: Optional[float] = None
    price_trigger: Optional[float] = None


@dataclass(frozen=True)
class Trade:
    """An executed transaction."""

    trade_id: int
    time: float
    price: float
    quantity: int
    buyer_trader_id: int
    seller_trader_id: int
    aggressor_side: Side
    buy_order_id: int = -1
    sell_order_id: int = -1


@dataclass
class MatchOutcome:
    """Result of submitting one order."""

    order: Order
    trades: List[Trade] = field(default_factory=list)
    rested: bool = False

    @property
    def filled_quantity(self) -> int:
        return sum(t.quantity for t in self.trades)


class PriceLevels:
    """Sorted tick keys, each holding a FIFO list of orders."""

    def __init__(self):
        self._ticks: List[int] = []
        self._levels: Dict[int, List[Order]] = {}

    def __bool__(self) -> bool:
        return bool(self._ticks)

    def best(self, highest: bool) -> Optional[int]:
        if not self._ticks:
            return None
        return self._ticks[-1] if highest else self._ticks[0]

    def queue(self, tick: int) -> List[Order]:
        return self._levels[tick]

    def add(self, tick: int, order: Order) -> None:
        if tick not in self._levels:
            bisect.insort(self._ticks, tick)
            self._levels[tick] = []
        bisect.insort(self._levels[tick], order, key=lambda o: o.priority)

    def remove(self, tick: int, order: Order) -> None:
        level = self._levels[tick]
        level.remove(order)
        if not level:
            self.drop(tick)

    def drop(self, tick: int) -> None:
        del self._levels[tick]
        self._ticks.pop(bisect.bisect_left(self._ticks, tick))

    def depth(self, count: int, highest: bool) -> List[Tuple[float, int]]:
        ticks = self._ticks[::-1] if highest else self._ticks
        return [
            (from_ticks(t), sum(o.quantity for o in self._levels[t])) for t in ticks[:count]
        ]

    def orders(self):
        for tick in self._ticks:
            yield from self._levels[tick]


class TotalOrderBook:
    """
    Visible book plus resting market orders plus latent orders.

    Single-writer: one simulation owns one book.
    """

    def __init__(
        self,
        last_trade_price: Optional[float] = None,
        activation_tolerance: float = 0.01,
    ):
        """
        Initialize an empty book.

        Args:
            last_trade_price: Reference price before the first trade
            activation_tolerance: Price distance at which latent orders fire
        """
        self.bids = PriceLevels()
        self.asks = PriceLevels()
        self.resting_markets: Dict[Side, List[Order]] = {Side.BUY: [], Side.SELL: []}
        self.latent: Dict[int, Tuple[Order, LatentRule]] = {}
        self._latent_by_tick: Dict[int, set] = {}
        self._latent_timed: List[Tuple[float, int]] = []
        self.last_trade_price = (
            quantize_price(last_trade_price) if last_trade_price is not None else None
        )
        self.activation_ticks = to_ticks(activation_tolerance)
        self.trades: List[Trade] = []

        self._index: Dict[int, Tuple[str, Optional[int]]] = {}
        self._orders: Dict[int, Order] = {}
        self._seen_ids = set()
        self._deadlines: List[Tuple[float, int]] = []
        self._clock = float("-inf")

    # ------------------------------------------------------------------
    # Queries
    # ------------------------------------------------------------------

    def __contains__(self, order_id: int) -> bool:
        return order_id in self._index

    def get_order(self, order_id: int) -> Optional[Order]:
        return self._orders.get(order_id)

    def best_bid(self) -> Optional[float]:
        tick = self.bids.best(highest=True)
        return from_ticks(tick) if tick is not None else None

    def best_offer(self) -> Optional[float]:
        tick = self.asks.best(highest=False)
        return from_ticks(tick) if tick is not None else None

    def spread(self) -> Optional[float]:
        bid, offer = self.best_bid(), self.best_offer()
        if bid is None or offer is None:
            return None
        return from_ticks(to_ticks(offer) - to_ticks(bid))

    def snapshot(self, depth: int = 5) -> Dict[str, List[Tuple[float, int]]]:
        """Aggregated quantities per level on both sides."""
        return {
            "bids": self.bids.depth(depth, highest=True),
            "asks": self.asks.depth(depth, highest=False),
        }

    def has_pending_activation(self) -> bool:
        """True if a latent order could fire without any further trade."""
        if any(order_id in self.latent for _, order_id in self._latent_timed):
            return True
        return bool(self._latent_near(self._last_ticks()))

    # ------------------------------------------------------------------
    # Operations
    # ------------------------------------------------------------------

    def insert_order(self, order: Order, now: float) -> MatchOutcome:
        """
        Submit an order to the visible book and match it.

        Args:
            order: Incoming order
            now: Current simulation time

        Returns:
            MatchOutcome with the generated trades

        Raises:
            OrderRejected: On invalid quantity, duplicate id, missing limit
                price or a clock that moves backwards
        """
        self._admit(order, now)
        return self._execute(order, now)

    def submit_latent(self, order: Order, rule: LatentRule, now: float) -> None:
        """
        Hold an order in the latent book until its rule fires.

        Args:
            order: Order to hold
            rule: Activation rule
            now: Current simulation time
        """
        if rule.time_trigger is None and rule.price_trigger is None:
            raise OrderRejected(f"Latent order {order.id} has no trigger")
        self._admit(order, now)
        self.latent[order.id] = (order, rule)
        if rule.price_trigger is not None:
            self._latent_by_tick.setdefault(to_ticks(rule.price_trigger), set()).add(order.id)
        if rule.time_trigger is not None:
            heapq.heappush(self._latent_timed, (rule.time_trigger, order.id))
        self._track(order, ("latent", None))

    def cancel_order(self, order_id: int) -> Optional[Order]:
        """
        Remove an order from whichever structure holds it.

        Args:
            order_id: Id of the order

        Returns:
            The removed order, or None when the id is not live
        """
        location = self._index.pop(order_id, None)
        if location is None:
            return None

        order = self._orders.pop(order_id)
        where, tick = location
        if where == "bid":
            self.bids.remove(tick, order)
        elif where == "ask":
            self.asks.remove(tick, order)
        elif where == "market":
            self.resting_markets[order.side].remove(order)
        else:
            self._drop_latent(order_id)

        logger.debug(f"Cancelled order {order_id} ({where})")
        return order

    def activate_latent(
        self,
        now: float,
        last_trade_price: Optional[float] = None,
        limit: Optional[int] = None,
    ) -> List[Order]:
        """
        Move triggered latent orders into the visible book.

        Args:
            now: Current simulation time
            last_trade_price: Reference price (defaults to the book's own)
            limit: Fire at most this many triggered orders, highest priority
                first; the rest stay latent (None fires all)

        Returns:
            Activated orders, in (entry_time, id) order
        """
        self._advance_clock(now)
        reference = (
            to_ticks(last_trade_price) if last_trade_price is not None else self._last_ticks()
        )

        fired_ids = set(self._latent_near(reference))
        due: List[Tuple[float, int]] = []
        while self._latent_timed and self._latent_timed[0][0] <= now:
            entry = heapq.heappop(self._latent_timed)
            if entry[1] in self.latent:
                fired_ids.add(entry[1])
                due.append(entry)

        fired = sorted((self.latent[i][0] for i in fired_ids), key=lambda o: o.priority)
        if limit is not None:
            fired = fired[:limit]
            kept = {o.id for o in fired}
            for entry in due:
                if entry[1] not in kept:
                    heapq.heappush(self._latent_timed, entry)
        for order in fired:
            self._drop_latent(order.id)
            del self._index[order.id]
            self._execute(order, now)

        if fired:
            logger.debug(f"Activated {len(fired)} latent orders at t={now:.6f}")
        return fired

    def expire_flights(self, now: float) -> List[int]:
        """
        Cancel every order whose flight deadline is <= now.

        Args:
            now: Current simulation time

        Returns:
            Sorted ids of cancelled orders
        """
        self._advance_clock(now)
        expired = []
        while self._deadlines and self._deadlines[0][0] <= now:
            _, order_id = heapq.heappop(self._deadlines)
            if self.cancel_order(order_id) is not None:
                expired.append(order_id)
        return sorted(expired)

    # ------------------------------------------------------------------
    # Matching internals
    # ------------------------------------------------------------------

    def _admit(self, order: Order, now: float) -> None:
        if order.quantity < 1:
            raise OrderRejected(f"Order {order.id} has quantity {order.quantity} < 1")
        if order.id in self._seen_ids:
            raise OrderRejected(f"Duplicate order id {order.id}")
        if order.kind is OrderKind.LIMIT and order.price is None:
            raise OrderRejected(f"Limit order {order.id} has no price")
        if order.flight_deadline <= order.entry_time:
            raise OrderRejected(f"Order {order.id} has flight_deadline <= entry_time")
        self._advance_clock(now)
        self._seen_ids.add(order.id)

    def _advance_clock(self, now: float) -> None:
        if now < self._clock:
            raise OrderRejected(f"Clock moved backwards: {now} < {self._clock}")
        self._clock = now

    def _track(self, order: Order, location: Tuple[str, Optional[int]]) -> None:
        if order.id not in self._orders:
            heapq.heappush(self._deadlines, (order.flight_deadline, order.id))
        self._index[order.id] = location
        self._orders[order.id] = order

    def _untrack(self, order: Order) -> None:
        self._index.pop(order.id, None)
        self._orders.pop(order.id, None)

    def _last_ticks(self) -> Optional[int]:
        return to_ticks(self.last_trade_price) if self.last_trade_price is not None else None

    def _latent_near(self, reference: Optional[int]) -> List[int]:
        """Ids of price-triggered latent orders within tolerance of reference."""
        if reference is None:
            return []
        ids = []
        for tick in range(reference - self.activation_ticks, reference + self.activation_ticks + 1):
            ids.extend(self._latent_by_tick.get(tick, ()))
        return ids

    def _drop_latent(self, order_id: int) -> None:
        _, rule = self.latent.pop(order_id)
        if rule.price_trigger is not None:
            tick = to_ticks(rule.price_trigger)
            waiting = self._latent_by_tick[tick]
            waiting.discard(order_id)
            if not waiting:
                del self._latent_by_tick[tick]

    def _execute(self, order: Order, now: float) -> MatchOutcome:
        outcome = MatchOutcome(order=order)
        opposite = order.side.opposite
        levels = self.asks if order.side is Side.BUY else self.bids

        if order.kind is OrderKind.LIMIT:
            limit = to_ticks(order.price)
            self._match_markets(order, opposite, limit, now, outcome)
            self._match_levels(order, levels, limit, now, outcome)
            if order.quantity > 0:
                own = self.bids if order.side is Side.BUY else self.asks
                own.add(limit, order)
                self._track(order, ("bid" if order.side is Side.BUY else "ask", limit))
                outcome.rested = True
        else:
            self._match_levels(order, levels, None, now, outcome)
            last = self._last_ticks()
            if order.quantity > 0 and last is not None:
                self._match_markets(order, opposite, last, now, outcome)
            if order.quantity > 0:
                self.resting_markets[order.side].append(order)
                self.resting_markets[order.side].sort(key=lambda o: o.priority)
                self._track(order, ("market", None))
                outcome.rested = True

        if not outcome.rested:
            self._untrack(order)
        return outcome

    def _match_markets(
        self, order: Order, opposite: Side, price_ticks: int, now: float, outcome: MatchOutcome
    ) -> None:
        queue = self.resting_markets[opposite]
        while order.quantity > 0 and queue:
            resting = queue[0]
            self._fill(order, resting, price_ticks, now, outcome)
            if resting.quantity == 0:
                queue.pop(0)
                self._untrack(resting)

    def _match_levels(
        self,
        order: Order,
        levels: PriceLevels,
        limit: Optional[int],
        now: float,
        outcome: MatchOutcome,
    ) -> None:
        buying = order.side is Side.BUY
        while order.quantity > 0:
            tick = levels.best(highest=not buying)
            if tick is None:
                break
            if limit is not None and (tick > limit if buying else tick < limit):
                break

            queue = levels.queue(tick)
            while order.quantity > 0 and queue:
                resting = queue[0]
                self._fill(order, resting, tick, now, outcome)
                if resting.quantity == 0:
                    queue.pop(0)
                    self._untrack(resting)
            if not queue:
                levels.drop(tick)

    def _fill(
        self, incoming: Order, resting: Order, price_ticks: int, now: float, outcome: MatchOutcome
    ) -> None:
        quantity = min(incoming.quantity, resting.quantity)
        incoming.quantity -= quantity
        resting.quantity -= quantity

        buy, sell = (incoming, resting) if incoming.side is Side.BUY else (resting, incoming)
        trade = Trade(
            trade_id=len(self.trades) + 1,
            time=now,
            price=from_ticks(price_ticks),
            quantity=quantity,
            buyer_trader_id=buy.trader_id,
            seller_trader_id=sell.trader_id,
            aggressor_side=incoming.side,
            buy_order_id=buy.id,
            sell_order_id=sell.id,
        )
        self.trades.append(trade)
        outcome.trades.append(trade)
        self.last_trade_price = trade.price
