import numpy as np
import pytest

from analytics import (
    DiracMass,
    GaussianBump,
    GaussianSource,
    InflowSource,
    ScenarioParams,
    master_density,
    solve_finite_difference,
)

SAMPLE_X = np.linspace(-4.0, 4.0, 41)


def relative_sup_error(numeric, exact):
    return float(np.max(np.abs(numeric - exact)) / np.max(np.abs(exact)))


def test_pure_diffusion_matches_closed_form():
    params = ScenarioParams(D=1.0)
    bump = GaussianBump(sigma=0.5)
    result = solve_finite_difference(params, 1.0, initial=bump)
    exact = master_density(params, x=SAMPLE_X, t=1.0, initial=bump)
    assert relative_sup_error(result.interpolate(SAMPLE_X, 1.0), exact) < 0.02


def test_self_drift_matches_closed_form():
    params = ScenarioParams(D=1.0, lambda2=0.8)
    bump = GaussianBump(sigma=0.5)
    result = solve_finite_difference(params, 1.5, initial=bump, times=[0.75, 1.5])

    for t in (0.75, 1.5):
        exact = master_density(params, x=SAMPLE_X, t=t, initial=bump)
        assert relative_sup_error(result.interpolate(SAMPLE_X, t), exact) < 0.02
    peak = result.x[np.argmax(result.at(1.5))]
    assert peak == pytest.approx(0.8 * 1.5, abs=0.05)


def test_full_scenario_matches_closed_form():
    params = ScenarioParams(D=1.0, v=0.3, v1=0.1, lambda1=0.5, phi2=0.4)
    bump = GaussianBump(sigma=0.5)
    source = GaussianSource(rate=0.4, x0=0.5, sigma=0.5)
    result = solve_finite_difference(params, 1.0, initial=bump, source=source, times=[0.5, 1.0])

    for t in (0.5, 1.0):
        exact = master_density(params, source, x=SAMPLE_X, t=t, initial=bump)
        assert relative_sup_error(result.interpolate(SAMPLE_X, t), exact) < 0.02


def test_snapshots_are_kept_in_order():
    result = solve_finite_difference(ScenarioParams(D=1.0), 1.0, initial=GaussianBump(), times=[1.0, 0.25, 0.5])
    np.testing.assert_array_equal(result.times, [0.25, 0.5, 1.0])
    assert result.values.shape == (3, len(result.x))
    assert result.n_steps > 0
    assert result.values[0, 0] == 0.0 and result.values[-1, -1] == 0.0


@pytest.mark.parametrize(
    "kwargs",
    [
        {"initial": DiracMass()},
        {"initial": GaussianBump(), "source": InflowSource(rate=1.0)},
    ],
)
def test_point_like_data_is_rejected(kwargs):
    with pytest.raises(ValueError):
        solve_finite_difference(ScenarioParams(D=1.0), 1.0, **kwargs)


def test_snapshot_outside_horizon_is_rejected():
    with pytest.raises(ValueError):
        solve_finite_difference(ScenarioParams(D=1.0), 1.0, initial=GaussianBump(), times=[2.0])
