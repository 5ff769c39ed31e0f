import pytest

from simulation import Bias, SimConfig, SweepGrid, env_seed, sweep_from_mapping
from utils import ConfigError, load_config, parse_config_text, parse_list, parse_overrides, resolve_config_path


def test_parse_config_text():
    text = """
    # comment
    n_traders = 50
    gamma=2.5   # trailing comment

    bias = quantity
    """
    assert parse_config_text(text) == {"n_traders": "50", "gamma": "2.5", "bias": "quantity"}


@pytest.mark.parametrize("text", ["gamma 2.5", "= 3", "gamma=1\ngamma=2"])
def test_malformed_config_text(text):
    with pytest.raises(ConfigError):
        parse_config_text(text)


def test_from_mapping_parses_every_kind():
    config = SimConfig.from_mapping(
        {
            "n_traders": "50",
            "max_events": "1e4",
            "v_max": "none",
            "noise_fraction": "0.25",
            "bias": "quantity",
            "horizon_seconds": "30",
        }
    )
    assert config.n_traders == 50
    assert config.max_events == 10_000
    assert config.v_max is None
    assert config.noise_fraction == 0.25
    assert config.bias is Bias.QUANTITY
    assert config.horizon_seconds == 30.0


def test_mapping_snapshot_round_trip():
    config = SimConfig(n_traders=12, gamma=0.75, bias=Bias.QUANTITY, v_max=4.0)
    assert SimConfig.from_mapping(config.to_mapping()) == config
    assert SimConfig().to_mapping()["noise_fraction"] == "random-uniform"


def test_unknown_key_is_named():
    with pytest.raises(ConfigError) as info:
        SimConfig.from_mapping({"gama": "1.5"})
    assert info.value.key == "gama"


@pytest.mark.parametrize(
    "key, raw",
    [("gamma", "0"), ("event_rate", "-1"), ("noise_fraction", "1.5"), ("n_traders", "ten"), ("bias", "huge")],
)
def test_invalid_values(key, raw):
    with pytest.raises(ConfigError) as info:
        SimConfig.from_mapping({key: raw})
    assert info.value.key == key


def test_overrides_win_over_base():
    base = SimConfig.from_mapping({"gamma": "0.5", "seed": "3"})
    config = SimConfig.from_mapping(parse_overrides(["gamma=2.5"]), base=base)
    assert (config.gamma, config.seed) == (2.5, 3)
    with pytest.raises(ConfigError):
        parse_overrides(["gamma"])


def test_env_seed(monkeypatch):
    assert env_seed() is None
    monkeypatch.setenv("LEVY_AUCTION_SEED", "41")
    assert env_seed() == 41
    monkeypatch.setenv("LEVY_AUCTION_SEED", "forty")
    with pytest.raises(ConfigError):
        env_seed()


def test_bundled_configs_resolve():
    assert resolve_config_path("default").name == "default.cfg"
    assert SimConfig.from_mapping(load_config("default")) == SimConfig()
    with pytest.raises(ConfigError):
        load_config("does_not_exist")


@pytest.mark.parametrize("name, size", [("desk_scale", 240), ("paper_grid", 3960)])
def test_bundled_grid_sizes(name, size):
    grid, base = sweep_from_mapping(load_config(name))
    assert grid.size == size
    assert base.n_traders == 1000


def test_sweep_mapping_splits_grid_and_base():
    grid, base = sweep_from_mapping({"event_rates": "1, 10", "biases": "none", "trials": "3", "n_traders": "20"})
    assert grid.event_rates == [1.0, 10.0]
    assert grid.biases == [Bias.NO_BIAS]
    assert grid.size == 2 * 3 * 1 * 3
    assert base.n_traders == 20


@pytest.mark.parametrize("values", [{"event_rates": ""}, {"trials": "0"}, {"gammas": "1, -2"}])
def test_empty_or_invalid_grid(values):
    with pytest.raises(ConfigError):
        sweep_from_mapping(values)


def test_grid_cell_order():
    grid = SweepGrid(event_rates=[1.0, 2.0], gammas=[0.5], biases=[Bias.NO_BIAS, Bias.QUANTITY], trials=1)
    assert [(c["event_rate"], c["bias"]) for c in grid.cells] == [
        (1.0, Bias.NO_BIAS),
        (1.0, Bias.QUANTITY),
        (2.0, Bias.NO_BIAS),
        (2.0, Bias.QUANTITY),
    ]


def test_parse_list():
    assert parse_list("1, 10,100") == [1.0, 10.0, 100.0]
    with pytest.raises(ConfigError):
        parse_list("1, x")
