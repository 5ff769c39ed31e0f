import cmath
import math

import pytest

from agents import ExponentialFlightTimeDist, FlightTimeDist, VelocityDist, make_rng
from analytics import (
    SearchModel,
    asymptotic_propagator,
    ballistic_scaling_function,
    cauchy_propagator,
    flight_time_laplace,
    make_grid,
    propagator_fl,
    propagator_grid,
    trade_density_fl,
    velocity_characteristic,
)
from analytics.search import _laplace
from simulation import monte_carlo_propagator
from utils.quadrature import velocity_average


def cauchy_model(gamma=1.5, u0=1.0, v_max=None):
    return SearchModel(velocity=VelocityDist(u0=u0, v_max=v_max), flight=FlightTimeDist(gamma=gamma))


@pytest.mark.parametrize("method", ["auto", "quadrature"])
def test_position_form_collapses_for_lorentzian(method):
    value = propagator_fl(cauchy_model(), 0.5, 1.0, form="position", method=method)
    assert value.real == pytest.approx(1.0 / 1.5, rel=1e-6)
    assert abs(value.imag) < 1e-9


def test_renewal_form_at_zero_wavenumber():
    flight = FlightTimeDist(gamma=1.0)
    f_hat = flight_time_laplace(flight, 1.0).real
    assert f_hat == pytest.approx(0.4036526, rel=1e-6)

    value = propagator_fl(SearchModel(VelocityDist(), flight), 0.0, 1.0, form="renewal")
    assert value.real == pytest.approx(f_hat / (1.0 - f_hat), rel=1e-6)


@pytest.mark.parametrize("z", [1.0, 0.5 + 2.0j, 3.0 - 1.0j])
def test_closed_form_laplace_matches_quadrature(z):
    flight = FlightTimeDist(gamma=1.0)
    numeric = _laplace(lambda tau: float(flight.pdf(tau)), z)
    assert abs(flight_time_laplace(flight, z) - numeric) < 1e-7


def test_exponential_flights_give_lorentzian_renewal():
    model = SearchModel(VelocityDist(u0=2.0), ExponentialFlightTimeDist(rate=1.0))
    value = propagator_fl(model, 0.25, 1.0, form="renewal")
    assert value.real == pytest.approx(1.0 / 1.5, rel=1e-9)


@pytest.mark.parametrize("method", ["auto", "quadrature"])
def test_position_form_is_normalized(method):
    model = cauchy_model(v_max=5.0)
    assert propagator_fl(model, 0.0, 2.0, form="position", method=method).real == pytest.approx(0.5, rel=1e-6)


def test_truncated_propagator_is_conjugate_symmetric():
    model = cauchy_model(v_max=5.0)
    s = 1.0 + 0.5j
    upper = propagator_fl(model, 0.3, s, form="renewal", method="quadrature")
    lower = propagator_fl(model, 0.3, s.conjugate(), form="renewal", method="quadrature")
    assert abs(upper - lower.conjugate()) < 1e-6 * abs(upper)

    mirrored = propagator_fl(model, -0.3, s, form="renewal", method="quadrature")
    assert abs(upper - mirrored) < 1e-6 * abs(upper)


def test_truncated_characteristic_function():
    velocity = VelocityDist(u0=1.0, v_max=3.0)
    assert velocity_characteristic(velocity, 0.0) == 1.0
    assert velocity_characteristic(velocity, 1.0) > math.exp(-1.0)


@pytest.mark.parametrize("k", [0.0, 0.1, -0.1])
def test_asymptotic_propagator_for_lorentzian(k):
    value = asymptotic_propagator(cauchy_model(gamma=1.5), k, 0.2)
    assert value.real == pytest.approx(1.0 / (0.2 + abs(k)), rel=1e-9)
    assert abs(value.imag) < 1e-12


@pytest.mark.parametrize("gamma", [1.0, 2.0, 1.0 + 1e-10])
def test_asymptotic_rejects_poles(gamma):
    with pytest.raises(ValueError):
        asymptotic_propagator(cauchy_model(gamma=gamma), 0.1, 0.2)


def test_ballistic_scaling_closed_form():
    model = cauchy_model(gamma=0.5)
    estimate = ballistic_scaling_function(model, 0.5, method="auto")
    assert estimate.value == pytest.approx(1.0 / (math.pi * 1.25), rel=1e-6)
    assert estimate.monotone
    assert estimate.raw[0] == pytest.approx(1.01 / (math.pi * (0.25 + 1.01**2)), rel=1e-9)


@pytest.mark.parametrize("y", [0.0, 1.0])
def test_ballistic_scaling_by_quadrature(y):
    estimate = ballistic_scaling_function(cauchy_model(gamma=0.5), y)
    assert estimate.value == pytest.approx(1.0 / (math.pi * (1.0 + y * y)), abs=1e-3)


def test_ballistic_scaling_needs_ballistic_gamma():
    with pytest.raises(ValueError):
        ballistic_scaling_function(cauchy_model(gamma=1.5), 0.0)


def test_cauchy_propagator_values():
    assert cauchy_propagator(1.0, 0.0, 1.0) == pytest.approx(1.0 / math.pi)
    assert cauchy_propagator(2.0, 1.0, 0.5) == pytest.approx(1.0 / (math.pi * 2.0))
    with pytest.raises(ValueError):
        cauchy_propagator(1.0, 0.0, 0.0)


@pytest.mark.parametrize(
    "k, s, v_max",
    [(0.5, 1.0, None), (0.2, 0.5, None), (1.0, 2.0, 5.0)],
)
def test_monte_carlo_agrees_with_position_form(k, s, v_max):
    model = cauchy_model(gamma=1.5, v_max=v_max)
    exact = propagator_fl(model, k, s, form="position").real
    mean, se = monte_carlo_propagator(model.velocity, model.flight, k, s, 20_000, make_rng(77))
    assert abs(mean - exact) <= max(4 * se, 0.01 * exact)


@pytest.mark.parametrize("v_max, method", [(None, "auto"), (None, "quadrature"), (5.0, "quadrature")])
def test_asymptotic_agrees_with_propagator_near_origin(v_max, method):
    model = cauchy_model(gamma=1.5, v_max=v_max)
    s = 1e-3
    k = 1e-3 * s
    exact = propagator_fl(model, k, s, form="position", method=method)
    approx = asymptotic_propagator(model, k, s, method=method)
    assert abs(approx - exact) <= 0.05 * abs(exact)


def test_truncated_characteristic_function_at_high_frequency():
    velocity = VelocityDist(u0=1.0, v_max=3.0)
    assert abs(velocity_characteristic(velocity, 1e6)) < 1e-4
    generic = velocity_average(lambda v: math.cos(2.5 * v), 1.0, 3.0, complex_valued=False)
    assert velocity_characteristic(velocity, 2.5) == pytest.approx(generic, rel=1e-7)


def test_trade_density_scales_with_initial_density():
    gaussian = lambda x: math.exp(-0.5 * x * x) / math.sqrt(2 * math.pi)
    model = SearchModel(VelocityDist(), FlightTimeDist(gamma=1.5), n0=gaussian, efficiency_const=2.0)
    assert model.initial_mass() == pytest.approx(1.0, rel=1e-7)
    assert model.initial_density_fourier(1.0).real == pytest.approx(math.exp(-0.5), rel=1e-6)

    G = propagator_fl(model, 1.0, 1.0, form="renewal")
    assert trade_density_fl(model, 1.0, 1.0) == pytest.approx(cmath.exp(-0.5) * G / 2.0, rel=1e-6)


def test_bad_arguments():
    model = cauchy_model()
    with pytest.raises(ValueError):
        propagator_fl(model, 0.1, -1.0)
    with pytest.raises(ValueError):
        propagator_fl(model, 0.1, 1.0, form="velocity")
    with pytest.raises(ValueError):
        SearchModel(VelocityDist(), FlightTimeDist(), efficiency_const=0.0)
    with pytest.raises(ValueError):
        make_grid(0.0, 1.0, 5, scale="log")


def test_propagator_grid_shape():
    frame = propagator_grid(cauchy_model(), [0.0, 0.5], [1.0, 2.0, 3.0])
    assert list(frame.columns) == ["k", "s", "value_re", "value_im"]
    assert len(frame) == 6
    assert frame.loc[(frame.k == 0.5) & (frame.s == 3.0), "value_re"].item() == pytest.approx(1 / 3.5)


def test_cauchy_propagator_integrates_to_one():
    from scipy import integrate

    value, _ = integrate.quad(lambda x: cauchy_propagator(1.5, x, 2.0), -math.inf, math.inf, epsabs=1e-12)
    assert value == pytest.approx(1.0, abs=1e-6)


@pytest.mark.slow
@pytest.mark.parametrize("y", [-5.0, -2.0, -0.5, 0.5, 2.0, 5.0])
def test_ballistic_scaling_across_velocity_range(y):
    estimate = ballistic_scaling_function(cauchy_model(gamma=0.5), y)
    assert estimate.value == pytest.approx(1.0 / (math.pi * (1.0 + y * y)), abs=1e-3)
