import math

import numpy as np
import pytest
from scipy import stats

from agents import (
    ExponentialFlightTimeDist,
    FlightTimeDist,
    VelocityDist,
    make_rng,
    open_uniform,
    sample_flight_time,
    sample_quantity,
    sample_velocity,
    trial_seed,
)


@pytest.mark.parametrize("u, expected", [(0.5, 0.0), (0.75, 1.0), (0.25, -1.0)])
def test_velocity_quantiles(u, expected):
    assert sample_velocity(VelocityDist(u0=1.0), u) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("u", [0.01, 0.3, 0.49, 0.9])
def test_velocity_is_antisymmetric(u):
    dist = VelocityDist(u0=2.0)
    assert sample_velocity(dist, u) == pytest.approx(-sample_velocity(dist, 1.0 - u), rel=1e-12)


@pytest.mark.parametrize("u", [0.0, 1.0, -0.1, 1.5])
def test_uniform_outside_open_interval_is_rejected(u):
    with pytest.raises(ValueError):
        sample_velocity(VelocityDist(), u)
    with pytest.raises(ValueError):
        sample_flight_time(FlightTimeDist(), u)


def test_flight_time_quantiles():
    dist = FlightTimeDist(gamma=1.0)
    assert sample_flight_time(dist, 0.5) == pytest.approx(1.0)
    assert sample_flight_time(dist, 1e-12) == pytest.approx(0.0, abs=1e-9)


def test_flight_time_is_monotone_in_u():
    u = np.linspace(0.01, 0.99, 99)
    tau = sample_flight_time(FlightTimeDist(gamma=0.5), u)
    assert np.all(np.diff(tau) > 0)


def test_velocity_empirical_cdf_matches_arctan():
    dist = VelocityDist(u0=1.0)
    draws = sample_velocity(dist, open_uniform(make_rng(1), 100_000))
    result = stats.kstest(draws, lambda v: dist.cdf(v))
    assert result.statistic < 0.01


def test_truncated_velocity_stays_inside_cone():
    dist = VelocityDist(u0=1.0, v_max=3.0)
    draws = sample_velocity(dist, open_uniform(make_rng(2), 10_000))
    assert np.max(np.abs(draws)) <= 3.0
    assert dist.cdf(3.0) == pytest.approx(1.0)
    assert dist.cdf(0.0) == pytest.approx(0.5)


def test_truncated_pdf_integrates_to_one():
    from scipy import integrate

    dist = VelocityDist(u0=1.0, v_max=2.0)
    value, _ = integrate.quad(lambda v: dist.pdf(v), -2.0, 2.0)
    assert value == pytest.approx(1.0, rel=1e-8)


@pytest.mark.slow
def test_flight_time_tail_slope():
    gamma = 1.5
    draws = sample_flight_time(FlightTimeDist(gamma=gamma), open_uniform(make_rng(3), 1_000_000))
    thresholds = np.logspace(0.5, 2.5, 10)
    survival = np.array([(draws > t).mean() for t in thresholds])
    slope = stats.linregress(np.log(1.0 + thresholds), np.log(survival)).slope
    assert slope == pytest.approx(-gamma, abs=0.05)


def test_exponential_reference_mean():
    draws = sample_flight_time(ExponentialFlightTimeDist(rate=2.0), open_uniform(make_rng(4), 100_000))
    assert draws.mean() == pytest.approx(0.5, rel=0.02)


def test_flight_mean_is_infinite_below_one():
    assert math.isinf(FlightTimeDist(gamma=0.5).mean)
    assert FlightTimeDist(gamma=2.0).mean == pytest.approx(1.0)


@pytest.mark.parametrize("bad", [{"u0": 0.0}, {"u0": 1.0, "v_max": -1.0}])
def test_velocity_parameters_are_validated(bad):
    with pytest.raises(ValueError):
        VelocityDist(**bad)


def test_open_uniform_never_returns_zero():
    rng = make_rng(5)
    u = open_uniform(rng, 10_000)
    assert np.all((u > 0) & (u < 1))
    assert 0 < open_uniform(rng) < 1


def test_philox_streams_are_reproducible():
    assert np.array_equal(make_rng(9).random(5), make_rng(9).random(5))
    assert not np.array_equal(make_rng(9).random(5), make_rng(10).random(5))


def test_quantity_bias():
    rng = make_rng(6)
    assert {sample_quantity(rng, biased=False) for _ in range(50)} == {1}
    assert {sample_quantity(rng, biased=True, max_quantity=5) for _ in range(500)} == {1, 2, 3, 4, 5}


def test_trial_seeds_are_disjoint_across_cells():
    first = {trial_seed(0, 0, 10, t) for t in range(10)}
    second = {trial_seed(0, 1, 10, t) for t in range(10)}
    assert first.isdisjoint(second)
