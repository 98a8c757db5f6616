import pytest

from waveletls.cli.config import deep_update, load_config, load_defaults, save_config, to_run_config
from waveletls.models.config import FitConfig, RunConfig, SimulationScenario, validate_model
from waveletls.utils.errors import ConfigError
from waveletls.utils.rng import DEFAULT_SEED, SEED_ENV_VAR


def test_defaults():
    config = load_defaults()
    assert config["wavelet"]["filter"] == "coif24tap"
    assert config["wavelet"]["depth"] == 53
    assert config["evaluate"]["folds"] == 2


def test_precedence(tmp_path):
    user = tmp_path / "user.yaml"
    user.write_text("wavelet:\n  filter: db4tap\nfit:\n  J: 3\n")
    config = load_config(str(user), {"fit": {"J": 4}})
    assert config["wavelet"]["filter"] == "db4tap"
    assert config["fit"]["J"] == 4
    assert config["fit"]["sigma_method"] == "mad_detail"


def test_unknown_keys(tmp_path):
    user = tmp_path / "user.yaml"
    user.write_text("fit:\n  lambda: 3\n")
    with pytest.raises(ConfigError, match="fit.lambda"):
        load_config(str(user))
    with pytest.raises(ConfigError):
        load_config(updates={"plots": {}})


def test_missing_and_invalid_files(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "absent.yaml"))
    bad = tmp_path / "bad.yaml"
    bad.write_text("- just\n- a list\n")
    with pytest.raises(ConfigError):
        load_config(str(bad))


def test_deep_update():
    source = {"a": {"b": 1, "c": 2}, "d": 3}
    deep_update(source, {"a": {"b": 5}, "d": 4})
    assert source == {"a": {"b": 5, "c": 2}, "d": 4}


def test_save_and_reload(tmp_path):
    config = load_config(updates={"simulate": {"replications": 7}})
    path = save_config(config, str(tmp_path / "saved" / "run.yaml"))
    assert load_config(path)["simulate"]["replications"] == 7


def test_run_config_seed_from_environment(monkeypatch):
    monkeypatch.setenv(SEED_ENV_VAR, "99")
    assert to_run_config(load_defaults(), "simulate").seed == 99
    monkeypatch.delenv(SEED_ENV_VAR)
    assert to_run_config(load_defaults(), "simulate").seed == DEFAULT_SEED


def test_run_config_scenarios():
    config = load_config(
        updates={"simulate": {"n": [256, 512], "sigma2": [0.25, 0.75], "filters": ["db4tap"], "seed": 1}}
    )
    run = to_run_config(config, "simulate")
    scenarios = run.scenarios()
    assert len(scenarios) == 4
    assert {s.n for s in scenarios} == {256, 512}
    assert all(s.filter_name == "db4tap" and s.seed == 1 for s in scenarios)
    assert scenarios[0].fit_config().unit_box


def test_invalid_values():
    with pytest.raises(ConfigError, match="filter_name"):
        to_run_config(load_config(updates={"wavelet": {"filter": "sym8"}}), "fit")
    with pytest.raises(ConfigError):
        to_run_config(load_config(updates={"evaluate": {"folds": 1}}), "evaluate")
    with pytest.raises(ConfigError):
        validate_model(SimulationScenario, {"functions": (0, 1)})
    with pytest.raises(ConfigError):
        validate_model(FitConfig, {"quantile_coverage": 1.5})


def test_fit_config_from_run():
    run = validate_model(RunConfig, {"subcommand": "fit", "J_override": 3, "ridge_lambda": 0.5})
    config = run.fit_config()
    assert config.J_override == 3 and config.ridge_lambda == 0.5 and not config.unit_box


def test_beta_grid_keys():
    run = to_run_config(load_config(), "fit")
    assert run.beta_grid == [] and run.beta_folds == 5

    run = to_run_config(load_config(updates={"fit": {"beta_grid": [1.0, 4.0], "beta_folds": 3}}), "fit")
    assert run.beta_grid == [1.0, 4.0] and run.beta_folds == 3

    with pytest.raises(ConfigError, match="beta_grid"):
        to_run_config(load_config(updates={"fit": {"beta_grid": [0.0]}}), "fit")
    with pytest.raises(ConfigError, match="beta_folds"):
        to_run_config(load_config(updates={"fit": {"beta_folds": 1}}), "fit")
