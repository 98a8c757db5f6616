"""
waveletls CLI command definitions.
"""
import logging
import sys
from contextlib import contextmanager
from typing import Any, Dict, Iterator, List, Optional

import numpy as np
import pandas as pd
import typer
import yaml
from rich.console import Console
from rich.progress import (
    BarColumn,
    Progress,
    SpinnerColumn,
    TextColumn,
    TimeElapsedColumn,
)

from waveletls.cli.config import load_config, save_config, to_run_config
from waveletls.core import dataio, simbench
from waveletls.core.model import fit as fit_model
from waveletls.core.model import cv_select_beta, fitted_summary, predict_unit, rescale
from waveletls.models.config import RunConfig
from waveletls.utils.errors import ConfigError, WaveletLSError
from waveletls.utils.helpers import render_table, setup_logging
from waveletls.utils.state import load_model, save_model

logger = logging.getLogger(__name__)

STUDY_N_GRID = [256, 512, 1024, 2048, 4096]
STUDY_SIGMA2 = [0.25, 0.75]
STUDY_DESIGNS = ["uniform", "beta_3half"]
STUDY_FILTERS = ["db4tap", "coif24tap"]
STUDY_REPLICATIONS = 200

# Create Typer app
app = typer.Typer(
    name="waveletls",
    help="Wavelet least-squares estimation of additive regression models",
    add_completion=False,
)

# Status and logs go to stderr so that CSV on stdout stays clean
console = Console(stderr=True)

ConfigOption = typer.Option(None, "--config", "-c", help="YAML configuration file")
VerboseOption = typer.Option(False, "--verbose", "-v", help="Debug logging")
FilterOption = typer.Option(None, "--filter", help="Wavelet filter (haar, db4tap, coif24tap)")
LevelOption = typer.Option(None, "--J", "-J", help="Resolution level (default: J(n) rule)")
BetaOption = typer.Option(None, "--beta", help="Truncation threshold on the standardized scale")
SigmaOption = typer.Option(None, "--sigma-method", help="Noise estimate: mad_detail or sample_sd")
RidgeOption = typer.Option(None, "--ridge", help="Ridge penalty (default: minimum-norm least squares)")
QuantileOption = typer.Option(None, "--quantile", help="Restrict to the central quantile box, e.g. 0.95")
DepthOption = typer.Option(None, "--depth", help="Dyadic digits of the scaling-function evaluation")
SeedOption = typer.Option(None, "--seed", help="Random seed (default: WAVELETLS_SEED or built-in)")
TargetOption = typer.Option(None, "--target", help="Response column (default: last column)")
FeatureOption = typer.Option(None, "--feature", help="Feature column; repeat for several")
OutputOption = typer.Option(None, "--output", "-o", help="Output CSV (default: stdout)")
PrettyOption = typer.Option(False, "--pretty", help="Aligned table instead of CSV")


def _section(**values: Any) -> Dict[str, Any]:
    return {key: value for key, value in values.items() if value is not None}


def _fit_updates(
    filter_name: Optional[str] = None,
    depth: Optional[int] = None,
    J: Optional[int] = None,
    beta: Optional[float] = None,
    sigma_method: Optional[str] = None,
    ridge: Optional[float] = None,
    quantile: Optional[float] = None,
) -> Dict[str, Any]:
    updates = {
        "wavelet": _section(filter=filter_name, depth=depth),
        "fit": _section(J=J, beta=beta, sigma_method=sigma_method, ridge=ridge, quantile=quantile),
    }
    return {key: value for key, value in updates.items() if value}


def _prepare(
    subcommand: str,
    config_path: Optional[str],
    updates: Dict[str, Any],
    verbose: bool,
    pretty: bool = False,
    **paths: Optional[str],
) -> RunConfig:
    config = load_config(config_path, updates)
    system = config.get("system", {})
    setup_logging("DEBUG" if verbose else system.get("log_level", "INFO"), system.get("log_file"))
    run = to_run_config(config, subcommand, pretty=pretty, **paths)
    logger.debug("Run configuration: %s", run)
    return run


@contextmanager
def _handle_errors() -> Iterator[None]:
    try:
        yield
    except WaveletLSError as e:
        console.print(f"[bold red]Error:[/bold red] {e}")
        raise typer.Exit(code=e.exit_code)
    except OSError as e:
        console.print(f"[bold red]Error:[/bold red] cannot access {e.filename or 'file'}: {e.strerror or e}")
        raise typer.Exit(code=ConfigError.exit_code)


@contextmanager
def _progress(description: str) -> Iterator:
    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TextColumn("[progress.percentage]{task.percentage:>3.0f}%"),
        TimeElapsedColumn(),
        console=console,
        transient=True,
    ) as progress:
        task = progress.add_task(f"[cyan]{description}", total=None)

        def progress_hook(done: int, total: int):
            progress.update(task, completed=done, total=total)

        yield progress_hook


def _emit(frame: pd.DataFrame, output: Optional[str], pretty: bool, title: str) -> None:
    if output:
        frame.to_csv(output, index=False, float_format="%.17g")
        console.print(f"[bold green]Wrote[/bold green] {output}")
    elif pretty:
        Console().print(render_table(title, list(frame.columns), frame.itertuples(index=False)))
    else:
        sys.stdout.write(frame.to_csv(index=False, float_format="%.17g"))


@app.command()
def fit(
    input_path: str = typer.Argument(..., help="Training CSV with a header row"),
    model: str = typer.Option("model.yaml", "--model", "-m", help="Model file to write"),
    target: Optional[str] = TargetOption,
    feature: Optional[List[str]] = FeatureOption,
    filter_name: Optional[str] = FilterOption,
    J: Optional[int] = LevelOption,
    beta: Optional[float] = BetaOption,
    beta_grid: Optional[List[float]] = typer.Option(
        None, "--beta-grid", help="Candidate threshold for k-fold CV; repeat for a grid"
    ),
    beta_folds: Optional[int] = typer.Option(None, "--beta-folds", help="Folds of the threshold CV"),
    seed: Optional[int] = SeedOption,
    sigma_method: Optional[str] = SigmaOption,
    ridge: Optional[float] = RidgeOption,
    quantile: Optional[float] = QuantileOption,
    depth: Optional[int] = DepthOption,
    summary: Optional[str] = typer.Option(None, "--summary", help="Write observed/fitted/residual CSV"),
    config_path: Optional[str] = ConfigOption,
    verbose: bool = VerboseOption,
):
    """
    Fit an additive wavelet model and save it.
    """
    with _handle_errors():
        updates = _fit_updates(filter_name, depth, J, beta, sigma_method, ridge, quantile)
        updates.setdefault("fit", {}).update(
            _section(beta_grid=list(beta_grid) if beta_grid else None, beta_folds=beta_folds)
        )
        if seed is not None:
            updates["simulate"] = {"seed": seed}
        updates["evaluate"] = _section(target=target, features=list(feature) if feature else None)
        run = _prepare("fit", config_path, updates, verbose, input_path=input_path, model_path=model)

        data = dataio.load_csv(run.input_path, run.target, run.features or None)
        config = run.fit_config()
        if run.beta_grid:
            if run.beta_override is not None:
                raise ConfigError("give either a fixed beta or a beta grid, not both")
            chosen = cv_select_beta(
                data.X_raw, data.y_raw, config, run.beta_folds, run.beta_grid, seed=run.seed
            )
            console.print(f"[bold]CV-selected beta:[/bold] {chosen:.6g} from {len(run.beta_grid)} candidates")
            config = config.model_copy(update={"beta_override": chosen})
        m = fit_model(data.X_raw, data.y_raw, config)
        save_model(m, run.model_path)

        d = m.diagnostics
        console.print(f"[bold green]Model saved:[/bold green] {run.model_path}")
        console.print(f"[bold]Features:[/bold] {', '.join(data.feature_names)} -> {data.target_name}")
        console.print(f"J: {m.J}")
        console.print(f"beta_n: {m.beta_n:.6g}")
        console.print(f"sigma_hat: {m.sigma_hat:.6g}")
        console.print(f"effective rank: {d.effective_rank} of {m.p * 2**m.J}")
        console.print(f"rows used: {d.n_train}, dropped: {d.n_dropped}")
        if d.sigma_floored:
            console.print("[yellow]Noise estimate was 0; the truncation threshold uses the 1e-12 floor.[/yellow]")

        if summary:
            frame = fitted_summary(m, data.X_raw, data.y_raw)
            frame.to_csv(summary, index=False, float_format="%.17g")
            console.print(f"[bold green]Fit summary:[/bold green] {summary}")


@app.command()
def predict(
    input_path: str = typer.Argument(..., help="CSV with the predictor columns"),
    model: str = typer.Option("model.yaml", "--model", "-m", help="Model file from `waveletls fit`"),
    output: Optional[str] = OutputOption,
    target: Optional[str] = TargetOption,
    feature: Optional[List[str]] = FeatureOption,
    strict: bool = typer.Option(False, "--strict", help="Reject inputs outside the training box"),
    config_path: Optional[str] = ConfigOption,
    verbose: bool = VerboseOption,
):
    """
    Predict responses with a saved model.
    """
    with _handle_errors():
        updates: Dict[str, Any] = {"fit": {"strict": True}} if strict else {}
        updates["evaluate"] = _section(target=target, features=list(feature) if feature else None)
        run = _prepare("predict", config_path, updates, verbose, input_path=input_path, model_path=model)

        m = load_model(run.model_path)
        X = dataio.load_features(run.input_path, m.p, run.features or None, run.target)
        U, clipped = rescale(m, X, strict=run.strict)
        if clipped:
            console.print(f"[yellow]{clipped} input row(s) were clipped to the training box.[/yellow]")
        predictions = predict_unit(m, U)

        frame = pd.DataFrame({"row": np.arange(predictions.size), "prediction": predictions})
        _emit(frame, output, pretty=False, title="Predictions")


@app.command()
def simulate(
    n: Optional[List[int]] = typer.Option(None, "--n", help="Sample size; repeat for a grid"),
    sigma2: Optional[List[float]] = typer.Option(None, "--sigma2", help="Noise variance; repeat for several"),
    design: Optional[List[str]] = typer.Option(None, "--design", help="uniform or beta_3half; repeat for both"),
    filter_name: Optional[List[str]] = typer.Option(None, "--filter", help="Wavelet filter; repeat to compare"),
    function: Optional[List[int]] = typer.Option(None, "--function", help="Baseline function per coordinate"),
    replications: Optional[int] = typer.Option(None, "--replications", "-B", help="Replications per scenario"),
    seed: Optional[int] = SeedOption,
    J: Optional[int] = LevelOption,
    sigma_method: Optional[str] = SigmaOption,
    depth: Optional[int] = DepthOption,
    threads: Optional[int] = typer.Option(None, "--threads", help="Worker threads for replications"),
    full_study: bool = typer.Option(False, "--full-study", help="Full study grid with 200 replications"),
    rates: bool = typer.Option(False, "--rates", help="Print log-log rate slopes over the n grid"),
    gamma: Optional[float] = typer.Option(None, "--gamma", help="Smoothness for the reference slope"),
    output: Optional[str] = OutputOption,
    pretty: bool = PrettyOption,
    config_path: Optional[str] = ConfigOption,
    verbose: bool = VerboseOption,
):
    """
    Run the Monte-Carlo benchmark and print an RMSE table.
    """
    with _handle_errors():
        simulate_section: Dict[str, Any] = {}
        if full_study:
            simulate_section = {
                "n": STUDY_N_GRID,
                "sigma2": STUDY_SIGMA2,
                "design": STUDY_DESIGNS,
                "filters": STUDY_FILTERS,
                "replications": STUDY_REPLICATIONS,
            }
        simulate_section.update(
            _section(
                n=list(n) if n else None,
                sigma2=list(sigma2) if sigma2 else None,
                design=list(design) if design else None,
                filters=list(filter_name) if filter_name else None,
                functions=list(function) if function else None,
                replications=replications,
                seed=seed,
                gamma=gamma,
            )
        )
        updates = _fit_updates(depth=depth, J=J, sigma_method=sigma_method)
        if simulate_section:
            updates["simulate"] = simulate_section
        if threads is not None:
            updates["system"] = {"threads": threads}
        run = _prepare("simulate", config_path, updates, verbose, pretty=pretty, output_path=output)

        scenarios = run.scenarios()
        console.print(
            f"[bold]Running {len(scenarios)} scenario(s), "
            f"{run.replications} replication(s) each, seed {run.seed}[/bold]"
        )
        with _progress("Simulating...") as progress_hook:
            table = simbench.run_grid(scenarios, threads=run.threads, progress_hook=progress_hook)
        _emit(table, run.output_path, run.pretty, "Simulation RMSE")

        if rates:
            _emit(simbench.rate_table(table, run.gamma), None, run.pretty, "Rate slopes (log RMSE^2 vs log n)")


@app.command()
def evaluate(
    input_path: str = typer.Argument(..., help="Dataset CSV with a header row"),
    protocol: Optional[str] = typer.Option(None, "--protocol", help="cv or holdout"),
    folds: Optional[int] = typer.Option(None, "--folds", "-k", help="Folds per CV repetition"),
    repetitions: Optional[int] = typer.Option(None, "--repetitions", "-r", help="Protocol repetitions"),
    train_fraction: Optional[float] = typer.Option(None, "--train-fraction", help="Holdout training share"),
    target: Optional[str] = TargetOption,
    feature: Optional[List[str]] = FeatureOption,
    filter_name: Optional[str] = FilterOption,
    J: Optional[int] = LevelOption,
    beta: Optional[float] = BetaOption,
    sigma_method: Optional[str] = SigmaOption,
    ridge: Optional[float] = RidgeOption,
    quantile: Optional[float] = QuantileOption,
    depth: Optional[int] = DepthOption,
    seed: Optional[int] = SeedOption,
    output: Optional[str] = OutputOption,
    pretty: bool = PrettyOption,
    config_path: Optional[str] = ConfigOption,
    verbose: bool = VerboseOption,
):
    """
    Estimate out-of-sample RMSE by repeated cross-validation or hold-out.
    """
    with _handle_errors():
        updates = _fit_updates(filter_name, depth, J, beta, sigma_method, ridge, quantile)
        updates["evaluate"] = _section(
            protocol=protocol,
            folds=folds,
            repetitions=repetitions,
            train_fraction=train_fraction,
            target=target,
            features=list(feature) if feature else None,
        )
        if seed is not None:
            updates["simulate"] = {"seed": seed}
        run = _prepare("evaluate", config_path, updates, verbose, pretty=pretty, input_path=input_path, output_path=output)

        data = dataio.load_csv(run.input_path, run.target, run.features or None)
        with _progress(f"Evaluating ({run.protocol})...") as progress_hook:
            if run.protocol == "cv":
                scores = dataio.cv_experiment(
                    data, run.fit_config(), run.folds, run.repetitions, run.seed, progress_hook
                )
            else:
                scores = dataio.holdout_experiment(
                    data, run.fit_config(), run.train_fraction, run.repetitions, run.seed, progress_hook
                )

        frame = pd.DataFrame({"repetition": np.arange(1, len(scores) + 1), "rmse": scores})
        _emit(frame, run.output_path, run.pretty, f"Out-of-sample RMSE ({data.target_name})")
        console.print(
            f"[bold]Mean RMSE:[/bold] {np.mean(scores):.6g} "
            f"(sd {np.std(scores):.3g}, {len(scores)} repetition(s), features {', '.join(data.feature_names)})"
        )


@app.command()
def components(
    model: str = typer.Option("model.yaml", "--model", "-m", help="Model file from `waveletls fit`"),
    function: Optional[List[int]] = typer.Option(None, "--function", help="True baseline per predictor"),
    grid_points: Optional[int] = typer.Option(None, "--grid-points", help="Grid size on [0, 1]"),
    output: Optional[str] = OutputOption,
    config_path: Optional[str] = ConfigOption,
    verbose: bool = VerboseOption,
):
    """
    Export the estimated component curves as plot-ready CSV.
    """
    with _handle_errors():
        updates = {"system": {"grid_points": grid_points}} if grid_points is not None else {}
        run = _prepare("components", config_path, updates, verbose, model_path=model, output_path=output)

        m = load_model(run.model_path)
        curves = simbench.component_curves(m, run.grid_points, list(function) if function else None)
        _emit(curves, run.output_path, pretty=False, title="Components")


@app.command()
def config(
    show: bool = typer.Option(False, "--show", help="Show the merged configuration"),
    write: Optional[str] = typer.Option(None, "--write", help="Save the merged configuration to a file"),
    config_path: Optional[str] = ConfigOption,
):
    """
    Show or save waveletls settings.
    """
    with _handle_errors():
        current_config = load_config(config_path)
        to_run_config(current_config, "config")

        if write:
            save_config(current_config, write)
            console.print(f"[bold green]Configuration written:[/bold green] {write}")
        if show or not write:
            sys.stdout.write(yaml.safe_dump(current_config, default_flow_style=False, sort_keys=False))


if __name__ == "__main__":
    app()
