from collections import Counter
from dataclasses import replace

import numpy as np
import pytest

from agents import Phase, TraderKind, TraderState, make_rng
from simulation import Bias, MarketSimulator, SimConfig, interarrival_times, run_trial


def noise_trader(trader_id, side_sign):
    return TraderState(
        trader_id=trader_id,
        kind=TraderKind.NOISE,
        side_sign=side_sign,
        velocity=float(side_sign),
        flight_time=1e6,
        budget=1000.0,
    )


def test_two_noise_traders_trade_once_at_initial_price():
    config = SimConfig(n_traders=2, event_rate=10.0, seed=3, max_events=100)
    traders = [noise_trader(0, 1), noise_trader(1, -1)]
    result = MarketSimulator(config, traders=traders).run()

    assert len(result.trades) == 1
    trade = result.trades[0]
    assert trade.price == 100.0
    assert (trade.buyer_trader_id, trade.seller_trader_id) == (0, 1)
    assert result.report.trade_durations.size == 0
    assert result.report.flagged
    assert result.end_reason == "quiescent"


def test_interarrival_mean_matches_rate():
    gaps = interarrival_times(make_rng(0), 10.0, 100_000)
    assert gaps.mean() == pytest.approx(0.1, rel=0.01)


def test_same_seed_gives_identical_tape(small_config):
    first = run_trial(small_config)
    second = run_trial(small_config)
    assert first.trades == second.trades
    assert first.n_events == second.n_events


def test_different_seeds_differ(small_config):
    first = run_trial(small_config)
    second = run_trial(replace(small_config, seed=small_config.seed + 1))
    assert first.trades != second.trades or first.n_events != second.n_events


def test_trial_respects_event_cap(small_config):
    result = run_trial(replace(small_config, n_traders=500, max_events=50))
    assert result.n_events == 50
    assert result.end_reason == "max_events"


def test_trial_respects_horizon(small_config):
    result = run_trial(replace(small_config, n_traders=500, horizon_seconds=1.0))
    assert result.end_reason == "horizon"
    assert all(t.time <= 1.0 for t in result.trades)


def test_tape_is_time_ordered_with_positive_quantities(small_config):
    result = run_trial(replace(small_config, bias=Bias.QUANTITY))
    times = [t.time for t in result.trades]
    assert times == sorted(times)
    assert all(t.quantity >= 1 for t in result.trades)
    assert all(t.price > 0 for t in result.trades)


def test_every_trader_ends_with_an_exit_reason(small_config):
    result = run_trial(replace(small_config, max_events=100_000))
    assert result.end_reason in ("all_done", "quiescent")
    arrived = [t for t in result.traders if t.entry_time is not None]
    assert arrived
    for trader in arrived:
        if trader.phase is Phase.DONE:
            assert trader.exit_reason in ("filled", "expired", "budget_default")
        else:
            assert trader.exit_reason == "open_at_end"


def test_fixed_noise_fraction_builds_that_population():
    config = SimConfig(n_traders=200, noise_fraction=0.0, max_events=10, seed=1)
    simulator = MarketSimulator(config)
    assert simulator.noise_fraction == 0.0
    assert all(t.kind is TraderKind.STRATEGIC for t in simulator.traders)


def test_event_log_records_every_event(small_config):
    result = MarketSimulator(small_config, record_events=True).run()
    assert len(result.events) == result.n_events
    times = [e["time"] for e in result.events]
    assert np.all(np.diff(times) >= 0)
    assert {e["action"] for e in result.events} <= {"arrival", "continuation", "activation", "idle"}
    assert all(e["activated"] <= 1 for e in result.events)


def test_latent_activation_takes_its_own_event():
    config = SimConfig(n_traders=2, event_rate=10.0, seed=5, max_events=100, limit_probability=0.0)
    strategic = TraderState(
        trader_id=0,
        kind=TraderKind.STRATEGIC,
        side_sign=1,
        velocity=1e-9,
        flight_time=1e6,
    )
    result = MarketSimulator(config, traders=[strategic, noise_trader(1, -1)], record_events=True).run()

    actions = Counter(e["action"] for e in result.events)
    assert actions == Counter({"arrival": 2, "activation": 1, "continuation": 1})
    activation = next(e for e in result.events if e["action"] == "activation")
    assert activation["trader_id"] == 0
    assert len(result.trades) == 1
    assert result.trades[0].buyer_trader_id == 0
    assert strategic.exit_reason == "filled"


def test_noise_trader_never_continues_after_its_flight(small_config):
    config = replace(small_config, n_traders=100, noise_fraction=1.0, max_events=20_000)
    result = MarketSimulator(config, record_events=True).run()
    deadlines = {t.trader_id: t.flight_deadline for t in result.traders}

    continuations = [e for e in result.events if e["action"] == "continuation"]
    assert continuations
    assert all(e["time"] < deadlines[e["trader_id"]] for e in continuations)


def test_quote_walk_log_starts_at_origin(small_config):
    log = run_trial(small_config).quote_walk_log()
    assert list(log.columns) == ["walker", "time", "position"]
    assert not log.empty
    starts = log.groupby("walker").first()
    assert (starts["time"] == 0.0).all()
    assert (starts["position"] == 0.0).all()
