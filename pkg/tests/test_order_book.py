import pytest

from book import (
    LatentRule,
    Order,
    OrderKind,
    OrderRejected,
    Side,
    TotalOrderBook,
    quantize_price,
    to_ticks,
)


def limit(order_id, side, price, qty=1, t=0.0, deadline=1e9, trader=None):
    return Order(
        id=order_id,
        side=side,
        kind=OrderKind.LIMIT,
        quantity=qty,
        trader_id=order_id if trader is None else trader,
        entry_time=t,
        flight_deadline=deadline,
        price=price,
    )


def market(order_id, side, qty=1, t=0.0, deadline=1e9, price=None):
    return Order(
        id=order_id,
        side=side,
        kind=OrderKind.MARKET,
        quantity=qty,
        trader_id=order_id,
        entry_time=t,
        flight_deadline=deadline,
        price=price,
    )


@pytest.mark.parametrize(
    "price, expected",
    [(100.005, 100.01), (100.004, 100.0), (-0.005, -0.01), (99.995, 100.0)],
)
def test_quantize_rounds_half_away_from_zero(price, expected):
    assert quantize_price(price) == expected


def test_market_order_into_empty_book_rests():
    book = TotalOrderBook()
    outcome = book.insert_order(market(1, Side.BUY), now=0.0)
    assert outcome.trades == []
    assert outcome.rested
    assert [o.id for o in book.resting_markets[Side.BUY]] == [1]


def test_market_buy_fills_earliest_ask_at_best_price():
    book = TotalOrderBook()
    book.insert_order(limit(1, Side.SELL, 100.1, t=1.0), now=1.0)
    book.insert_order(limit(2, Side.SELL, 100.1, t=2.0), now=2.0)
    outcome = book.insert_order(market(3, Side.BUY, t=3.0), now=3.0)

    assert len(outcome.trades) == 1
    trade = outcome.trades[0]
    assert trade.price == 100.1
    assert trade.quantity == 1
    assert trade.sell_order_id == 1
    assert trade.time == 3.0
    assert 2 in book and 1 not in book


def test_limit_buy_partially_fills_then_rests():
    book = TotalOrderBook()
    book.insert_order(limit(1, Side.SELL, 100.1, qty=2), now=0.0)
    outcome = book.insert_order(limit(2, Side.BUY, 100.2, qty=3), now=0.0)

    assert [(t.price, t.quantity) for t in outcome.trades] == [(100.1, 2)]
    assert book.best_bid() == 100.2
    assert book.get_order(2).quantity == 1
    assert book.best_offer() is None


def test_limit_order_matches_resting_market_first_at_its_limit():
    book = TotalOrderBook()
    book.insert_order(market(1, Side.BUY), now=0.0)
    book.insert_order(limit(2, Side.SELL, 99.5), now=0.0)
    assert book.trades[-1].price == 99.5
    assert book.last_trade_price == 99.5


def test_opposite_market_orders_meet_at_last_trade_price():
    book = TotalOrderBook(last_trade_price=100.0)
    book.insert_order(market(1, Side.BUY), now=0.0)
    outcome = book.insert_order(market(2, Side.SELL), now=1.0)
    assert [(t.price, t.buyer_trader_id, t.seller_trader_id) for t in outcome.trades] == [(100.0, 1, 2)]


def test_spread_and_snapshot():
    book = TotalOrderBook()
    book.insert_order(limit(1, Side.BUY, 99.9, qty=2), now=0.0)
    book.insert_order(limit(2, Side.BUY, 99.9, qty=1), now=0.0)
    book.insert_order(limit(3, Side.BUY, 99.8), now=0.0)
    book.insert_order(limit(4, Side.SELL, 100.1), now=0.0)

    assert book.spread() == pytest.approx(0.2)
    snap = book.snapshot(depth=2)
    assert snap["bids"] == [(99.9, 3), (99.8, 1)]
    assert snap["asks"] == [(100.1, 1)]


def test_cancel_only_ask_empties_side():
    book = TotalOrderBook()
    book.insert_order(limit(1, Side.SELL, 100.0), now=0.0)
    assert book.cancel_order(1).id == 1
    assert book.best_offer() is None


def test_cancel_unknown_id_returns_none():
    assert TotalOrderBook().cancel_order(42) is None


def test_cancel_middle_keeps_fifo():
    book = TotalOrderBook()
    for i, t in enumerate([1.0, 2.0, 3.0], start=1):
        book.insert_order(limit(i, Side.SELL, 100.0, t=t), now=t)
    book.cancel_order(2)

    first = book.insert_order(market(10, Side.BUY, t=4.0), now=4.0)
    second = book.insert_order(market(11, Side.BUY, t=5.0), now=5.0)
    assert first.trades[0].sell_order_id == 1
    assert second.trades[0].sell_order_id == 3


def test_latent_price_trigger_fires_at_exact_price():
    book = TotalOrderBook(last_trade_price=100.1, activation_tolerance=0.05)
    book.submit_latent(market(1, Side.BUY, price=100.1), LatentRule(price_trigger=100.1), now=0.0)
    fired = book.activate_latent(now=1.0)
    assert [o.id for o in fired] == [1]
    assert 1 not in book.latent


def test_latent_time_trigger_waits():
    book = TotalOrderBook()
    book.submit_latent(limit(1, Side.BUY, 99.0), LatentRule(time_trigger=5.0), now=0.0)
    assert book.activate_latent(now=4.9) == []
    assert [o.id for o in book.activate_latent(now=5.0)] == [1]
    assert book.best_bid() == 99.0


def test_simultaneous_latent_orders_activate_in_entry_order():
    book = TotalOrderBook(last_trade_price=100.0)
    book.insert_order(limit(1, Side.SELL, 100.0, qty=1), now=0.0)
    book.submit_latent(market(3, Side.BUY, t=2.0, price=100.0), LatentRule(price_trigger=100.0), now=2.0)
    book.submit_latent(market(2, Side.BUY, t=1.0, price=100.0), LatentRule(price_trigger=100.0), now=2.0)

    fired = book.activate_latent(now=3.0)
    assert [o.id for o in fired] == [2, 3]
    assert book.trades[0].buy_order_id == 2


def test_activation_limit_keeps_the_rest_latent():
    book = TotalOrderBook(last_trade_price=100.0)
    book.submit_latent(market(1, Side.BUY, t=1.0, price=100.0), LatentRule(price_trigger=100.0), now=1.0)
    book.submit_latent(limit(2, Side.BUY, 98.0, t=1.5), LatentRule(time_trigger=2.0), now=1.5)

    assert [o.id for o in book.activate_latent(now=3.0, limit=1)] == [1]
    assert 2 in book.latent
    assert [o.id for o in book.activate_latent(now=3.5, limit=1)] == [2]
    assert book.activate_latent(now=4.0, limit=1) == []
    assert book.best_bid() == 98.0


def test_latent_without_trigger_is_rejected():
    with pytest.raises(OrderRejected):
        TotalOrderBook().submit_latent(limit(1, Side.BUY, 99.0), LatentRule(), now=0.0)


def test_expiry_is_inclusive():
    book = TotalOrderBook()
    book.insert_order(limit(1, Side.BUY, 99.0, deadline=10.0), now=0.0)
    assert book.expire_flights(now=10.0) == [1]
    assert book.best_bid() is None


def test_expiry_nothing_due_leaves_book_unchanged():
    book = TotalOrderBook()
    book.insert_order(limit(1, Side.BUY, 99.0, deadline=10.0), now=0.0)
    assert book.expire_flights(now=5.0) == []
    assert book.best_bid() == 99.0


def test_expiry_selects_exactly_the_due_orders():
    book = TotalOrderBook()
    deadlines = {1: 3.0, 2: 8.0, 3: 4.0, 4: 9.0, 5: 5.0}
    for order_id, deadline in deadlines.items():
        book.insert_order(limit(order_id, Side.BUY, 90.0 + order_id, deadline=deadline), now=0.0)
    assert book.expire_flights(now=5.0) == [1, 3, 5]
    assert sorted(o.id for o in book.bids.orders()) == [2, 4]


def test_expiry_reaches_latent_and_resting_market_orders():
    book = TotalOrderBook()
    book.insert_order(market(1, Side.BUY, deadline=2.0), now=0.0)
    book.submit_latent(limit(2, Side.SELL, 101.0, deadline=2.0), LatentRule(time_trigger=50.0), now=0.0)
    assert book.expire_flights(now=2.0) == [1, 2]
    assert book.resting_markets[Side.BUY] == []
    assert book.latent == {}


@pytest.mark.parametrize(
    "order, message",
    [
        (limit(1, Side.BUY, 99.0, qty=0), "quantity"),
        (limit(1, Side.BUY, None), "no price"),
        (limit(1, Side.BUY, 99.0, t=5.0, deadline=5.0), "flight_deadline"),
    ],
)
def test_invalid_orders_are_rejected(order, message):
    with pytest.raises(OrderRejected, match=message):
        TotalOrderBook().insert_order(order, now=5.0)


def test_duplicate_id_and_backwards_clock_are_rejected():
    book = TotalOrderBook()
    book.insert_order(limit(1, Side.BUY, 99.0), now=2.0)
    with pytest.raises(OrderRejected, match="Duplicate"):
        book.insert_order(limit(1, Side.BUY, 98.0), now=2.0)
    with pytest.raises(OrderRejected, match="backwards"):
        book.insert_order(limit(2, Side.BUY, 98.0), now=1.0)


def test_book_is_never_crossed_after_matching():
    book = TotalOrderBook()
    prices = [100.0, 100.3, 99.7, 100.1, 99.9, 100.2]
    for i, price in enumerate(prices, start=1):
        side = Side.BUY if i % 2 else Side.SELL
        book.insert_order(limit(i, side, price, qty=2), now=float(i))
        bid, offer = book.best_bid(), book.best_offer()
        if bid is not None and offer is not None:
            assert to_ticks(bid) < to_ticks(offer)
