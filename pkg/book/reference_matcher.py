"""
Brute-force reference matcher.

Keeps every live order in one flat list and rescans it for each fill.
Quadratic, slow and obviously correct; used to check TotalOrderBook.
"""

from dataclasses import replace
from typing import List, Optional

from .order_book import LatentRule, Order, OrderKind, Side, Trade, quantize_price


class ReferenceMatcher:
    """Naive matcher with the same rules as TotalOrderBook."""

    def __init__(self, last_trade_price: Optional[float] = None, activation_tolerance: float = 0.01):
        self.live: List[dict] = []
        self.trades: List[Trade] = []
        self.last_trade_price = (
            quantize_price(last_trade_price) if last_trade_price is not None else None
        )
        self.tolerance = activation_tolerance

    def insert_order(self, order: Order, now: float) -> List[Trade]:
        order = replace(order)
        order.quantity = order.original_quantity
        start = len(self.trades)
        self._run(order, now)
        return self.trades[start:]

    def submit_latent(self, order: Order, rule: LatentRule, now: float) -> None:
        self.live.append({"order": replace(order), "where": "latent", "rule": rule})

    def cancel_order(self, order_id: int) -> bool:
        for entry in self.live:
            if entry["order"].id == order_id:
                self.live.remove(entry)
                return True
        return False

    def activate_latent(self, now: float) -> List[int]:
        fired = []
        for entry in self.live:
            if entry["where"] != "latent":
                continue
            rule = entry["rule"]
            by_time = rule.time_trigger is not None and rule.time_trigger <= now
            by_price = (
                rule.price_trigger is not None
                and self.last_trade_price is not None
                and abs(rule.price_trigger - self.last_trade_price) <= self.tolerance + 1e-9
            )
            if by_time or by_price:
                fired.append(entry)

        fired.sort(key=lambda e: (e["order"].entry_time, e["order"].id))
        for entry in fired:
            self.live.remove(entry)
            self._run(entry["order"], now)
        return [e["order"].id for e in fired]

    def expire_flights(self, now: float) -> List[int]:
        expired = [e for e in self.live if e["order"].flight_deadline <= now]
        for entry in expired:
            self.live.remove(entry)
        return sorted(e["order"].id for e in expired)

    def _candidates(self, where: str, side: Side) -> List[dict]:
        return [e for e in self.live if e["where"] == where and e["order"].side is side]

    def _run(self, order: Order, now: float) -> None:
        opposite = order.side.opposite

        if order.kind is OrderKind.LIMIT:
            self._take_markets(order, opposite, order.price, now)
            self._take_limits(order, opposite, order.price, now)
            if order.quantity > 0:
                self.live.append({"order": order, "where": "limit", "rule": None})
        else:
            self._take_limits(order, opposite, None, now)
            if order.quantity > 0 and self.last_trade_price is not None:
                self._take_markets(order, opposite, self.last_trade_price, now)
            if order.quantity > 0:
                self.live.append({"order": order, "where": "market", "rule": None})

    def _take_markets(self, order: Order, opposite: Side, price: float, now: float) -> None:
        while order.quantity > 0:
            pool = self._candidates("market", opposite)
            if not pool:
                return
            entry = min(pool, key=lambda e: (e["order"].entry_time, e["order"].id))
            self._fill(order, entry, price, now)

    def _take_limits(self, order: Order, opposite: Side, limit: Optional[float], now: float) -> None:
        buying = order.side is Side.BUY
        while order.quantity > 0:
            pool = [
                e
                for e in self._candidates("limit", opposite)
                if limit is None
                or (e["order"].price <= limit if buying else e["order"].price >= limit)
            ]
            if not pool:
                return
            entry = min(
                pool,
                key=lambda e: (
                    e["order"].price if buying else -e["order"].price,
                    e["order"].entry_time,
                    e["order"].id,
                ),
            )
            self._fill(order, entry, entry["order"].price, now)

    def _fill(self, incoming: Order, entry: dict, price: float, now: float) -> None:
        resting = entry["order"]
        quantity = min(incoming.quantity, resting.quantity)
        incoming.quantity -= quantity
        resting.quantity -= quantity
        if resting.quantity == 0:
            self.live.remove(entry)

        buy, sell = (incoming, resting) if incoming.side is Side.BUY else (resting, incoming)
        self.trades.append(
            Trade(
                trade_id=len(self.trades) + 1,
                time=now,
                price=price,
                quantity=quantity,
                buyer_trader_id=buy.trader_id,
                seller_trader_id=sell.trader_id,
                aggressor_side=incoming.side,
                buy_order_id=buy.id,
                sell_order_id=sell.id,
            )
        )
        self.last_trade_price = price
