"""
Configuration handling for waveletls.

Settings are resolved in three layers: the packaged default.yaml, an optional
user YAML file given with --config, and command-line flags.
"""
import copy
import os
from typing import Any, Dict, Optional

import yaml

from waveletls.models.config import RunConfig, validate_model
from waveletls.utils.errors import ConfigError
from waveletls.utils.rng import default_seed

# Default configuration path
DEFAULT_CONFIG_PATH = os.path.join(os.path.dirname(os.path.dirname(__file__)), "config", "default.yaml")


def _read_yaml(path: str) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            content = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigError(f"configuration file {path} is not valid YAML: {e}")
    if content is None:
        return {}
    if not isinstance(content, dict):
        raise ConfigError(f"configuration file {path} must contain a mapping of sections")
    return content


def load_defaults() -> Dict[str, Any]:
    """
    Load the packaged default configuration.

    Returns:
        Dict[str, Any]: Configuration dictionary
    """
    return _read_yaml(DEFAULT_CONFIG_PATH)


def _check_keys(reference: Dict[str, Any], updates: Dict[str, Any], prefix: str = "") -> None:
    for key, value in updates.items():
        name = f"{prefix}{key}"
        if key not in reference:
            raise ConfigError(f"unknown configuration key {name!r}")
        if isinstance(reference[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"configuration key {name!r} must be a section")
            _check_keys(reference[key], value, prefix=f"{name}.")


def deep_update(source: Dict[str, Any], updates: Dict[str, Any]) -> None:
    """Merge updates into source in place, section by section."""
    for key, value in updates.items():
        if key in source and isinstance(source[key], dict) and isinstance(value, dict):
            deep_update(source[key], value)
        else:
            source[key] = value


def load_config(path: Optional[str] = None, updates: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """
    Load the merged configuration.

    Args:
        path (Optional[str]): User YAML file merged over the defaults
        updates (Optional[Dict[str, Any]]): Flag values merged last

    Returns:
        Dict[str, Any]: Configuration dictionary
    """
    config = load_defaults()
    layers = []
    if path is not None:
        if not os.path.exists(path):
            raise ConfigError(f"configuration file not found: {path}")
        layers.append(_read_yaml(path))
    if updates:
        layers.append(updates)

    for layer in layers:
        _check_keys(config, layer)
        deep_update(config, copy.deepcopy(layer))
    return config


def save_config(config: Dict[str, Any], path: str) -> str:
    """
    Save a configuration for later use with --config.

    Args:
        config (Dict[str, Any]): Configuration dictionary
        path (str): Destination file

    Returns:
        str: The path written
    """
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        yaml.safe_dump(config, f, default_flow_style=False, sort_keys=False)
    return path


def to_run_config(
    config: Dict[str, Any],
    subcommand: str,
    pretty: bool = False,
    **paths: Optional[str],
) -> RunConfig:
    """
    Validate a merged configuration into a RunConfig.

    Args:
        config (Dict[str, Any]): Merged configuration dictionary
        subcommand (str): Command being run
        pretty (bool): Aligned tables instead of CSV
        **paths: input_path, output_path and model_path

    Returns:
        RunConfig: Validated settings
    """
    wavelet = config.get("wavelet", {})
    fit = config.get("fit", {})
    simulate = config.get("simulate", {})
    evaluate = config.get("evaluate", {})
    system = config.get("system", {})

    seed = simulate.get("seed")
    filters = simulate.get("filters") or [wavelet.get("filter")]
    values = {
        "subcommand": subcommand,
        **{key: value for key, value in paths.items() if value is not None},
        "filter_name": wavelet.get("filter"),
        "depth": wavelet.get("depth"),
        "J_override": fit.get("J"),
        "beta_override": fit.get("beta"),
        "sigma_method": fit.get("sigma_method"),
        "ridge_lambda": fit.get("ridge"),
        "quantile_coverage": fit.get("quantile"),
        "strict": fit.get("strict"),
        "beta_grid": fit.get("beta_grid") or [],
        "beta_folds": fit.get("beta_folds"),
        "seed": default_seed() if seed is None else seed,
        "replications": simulate.get("replications"),
        "n_grid": simulate.get("n"),
        "sigma2_list": simulate.get("sigma2"),
        "designs": simulate.get("design"),
        "filters": filters,
        "functions": tuple(simulate.get("functions") or ()),
        "gamma": simulate.get("gamma"),
        "protocol": evaluate.get("protocol"),
        "folds": evaluate.get("folds"),
        "repetitions": evaluate.get("repetitions"),
        "train_fraction": evaluate.get("train_fraction"),
        "target": evaluate.get("target"),
        "features": evaluate.get("features") or [],
        "threads": system.get("threads"),
        "grid_points": system.get("grid_points"),
        "pretty": pretty,
    }
    return validate_model(RunConfig, values)
