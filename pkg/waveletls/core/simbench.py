"""
Monte-Carlo benchmark for the additive estimator.

Nine baseline functions of mixed smoothness are placed one per coordinate, the
predictors are drawn from a Uniform or Beta(3/2, 3/2) design and Gaussian noise
is added. Each replication uses its own random substream derived from
(seed, replication index), so serial and threaded runs give identical tables.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import stats

from waveletls.core.model import FittedAdditiveModel, component, fit, predict
from waveletls.models.config import BASELINE_INDICES, SimulationScenario
from waveletls.utils.errors import DomainError, WaveletLSError
from waveletls.utils.rng import make_rng

logger = logging.getLogger(__name__)

ProgressHook = Callable[[int, int], None]

RESULT_COLUMNS = ["design", "filter", "sigma2", "n", "function_index", "rmse", "replications", "seed"]
AGGREGATE_INDEX = 0
BETA_SHAPE = 1.5

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


def _f1(x):
    return _INV_SQRT2 * np.sin(2 * np.pi * x)


def _f2(x):
    return 1.0 - 4.0 * np.abs(x - 0.5)


def _f3(x):
    return -np.cos(4 * np.pi * x + 1.0)


def _f4(x):
    return 8.0 * (x - 0.5) ** 2 - 2.0 / 3.0


def _f5(x):
    return _INV_SQRT2 * np.cos(2 * np.pi * x)


def _f6(x):
    return _INV_SQRT2 * np.cos(4 * np.pi * x)


def _f7(x):
    return (
        -0.5275
        + 4.0 * np.exp(-500.0 * (x - 0.23) ** 2)
        + 2.0 * np.exp(-2000.0 * (x - 0.33) ** 2)
        + 4.0 * np.exp(-8000.0 * (x - 0.47) ** 2)
        + 3.0 * np.exp(-16000.0 * (x - 0.69) ** 2)
        + np.exp(-32000.0 * (x - 0.83) ** 2)
    )


def _f8(x):
    return 0.2 * np.cos(4 * np.pi * x + 1.0) + 0.1 * np.cos(24 * np.pi * x + 1.0)


def _f9(x):
    middle = (x > 0.5) & (x <= 0.8)
    upper = (x > 0.8) & (x <= 1.0)
    return -0.1744 + 2.0 * x**3 * middle + 2.0 * (x - 1.0) ** 3 * upper


BASELINES: Dict[int, Callable[[np.ndarray], np.ndarray]] = {
    1: _f1, 2: _f2, 3: _f3, 4: _f4, 5: _f5, 6: _f6, 7: _f7, 8: _f8, 9: _f9,
}


def eval_baseline(i: int, x):
    """
    Evaluate baseline function f_i on [0, 1].

    Args:
        i (int): Function number, 1..9
        x: Scalar or array of points in [0, 1]

    Returns:
        Function values, same shape as x
    """
    if i not in BASELINES:
        raise DomainError(f"baseline functions are numbered 1..9, got {i}")
    scalar = np.ndim(x) == 0
    points = np.atleast_1d(np.asarray(x, dtype=float))
    if points.size and (points.min() < 0.0 or points.max() > 1.0):
        raise DomainError("baseline functions are defined on [0, 1]")
    values = BASELINES[i](points)
    return float(values[0]) if scalar else values


def draw_design(design: str, n: int, p: int, rng: np.random.Generator) -> np.ndarray:
    """
    Draw an (n, p) design with i.i.d. coordinates.

    Beta(3/2, 3/2) samples come from the inverse CDF applied to uniforms.
    """
    u = rng.random((n, p))
    if design == "uniform":
        return u
    if design == "beta_3half":
        return stats.beta.ppf(u, BETA_SHAPE, BETA_SHAPE)
    raise DomainError(f"unknown design {design!r} (known: uniform, beta_3half)")


def true_components(functions: Sequence[int], X: np.ndarray) -> np.ndarray:
    """Matrix of f_{functions[j]}(X[:, j]), one column per coordinate."""
    return np.column_stack([BASELINES[i](X[:, j]) for j, i in enumerate(functions)])


@dataclass(frozen=True)
class ReplicationResult:
    """Mean squared errors of one replication."""

    index: int
    aggregate_mse: float
    component_mse: Tuple[float, ...]


@dataclass(frozen=True, eq=False)
class ScenarioResult:
    """RMSE of one scenario, aggregated over replications."""

    scenario: SimulationScenario
    aggregate_rmse: float
    function_rmse: Dict[int, float] = field(default_factory=dict)

    def to_frame(self) -> pd.DataFrame:
        """One table row for the aggregate (function_index 0) and one per baseline."""
        s = self.scenario
        rows = [(AGGREGATE_INDEX, self.aggregate_rmse)] + sorted(self.function_rmse.items())
        return pd.DataFrame(
            [
                {
                    "design": s.design,
                    "filter": s.filter_name,
                    "sigma2": s.sigma2,
                    "n": s.n,
                    "function_index": index,
                    "rmse": value,
                    "replications": s.replications,
                    "seed": s.seed,
                }
                for index, value in rows
            ],
            columns=RESULT_COLUMNS,
        )


def run_replication(s: SimulationScenario, index: int) -> ReplicationResult:
    """
    Draw one data set, fit it and score the fit against the noiseless truth.

    Args:
        s (SimulationScenario): Scenario settings
        index (int): Replication number, selects the random substream

    Returns:
        ReplicationResult: Aggregate and per-component mean squared errors
    """
    rng = make_rng(s.seed, stream=index)
    X = draw_design(s.design, s.n, s.p, rng)
    truth = true_components(s.functions, X)
    f = truth.sum(axis=1)
    Y = f + np.sqrt(s.sigma2) * rng.standard_normal(s.n)

    model = fit(X, Y, s.fit_config())
    aggregate = float(np.mean((f - predict(model, X)) ** 2))
    per_component = tuple(
        float(np.mean((truth[:, j] - model.y_std * component(model, j + 1, X[:, j])) ** 2))
        for j in range(s.p)
    )
    return ReplicationResult(index=index, aggregate_mse=aggregate, component_mse=per_component)


def _label(s: SimulationScenario) -> str:
    return f"scenario design={s.design} filter={s.filter_name} sigma2={s.sigma2} n={s.n}"


def run_scenario(
    s: SimulationScenario,
    threads: int = 1,
    progress_hook: Optional[ProgressHook] = None,
) -> ScenarioResult:
    """
    Run all replications of a scenario.

    RMSE = sqrt(mean over replications of the in-sample mean squared error),
    both for the full regression function and for each component.

    Args:
        s (SimulationScenario): Scenario settings
        threads (int): Worker threads; results do not depend on it
        progress_hook (Optional[ProgressHook]): Called with (done, total)

    Returns:
        ScenarioResult: Aggregate and per-function RMSE
    """
    total = s.replications
    done = 0

    def tick():
        nonlocal done
        done += 1
        if progress_hook:
            progress_hook(done, total)

    try:
        if threads <= 1:
            results = []
            for index in range(total):
                results.append(run_replication(s, index))
                tick()
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                futures = [pool.submit(run_replication, s, index) for index in range(total)]
                results = []
                for future in futures:
                    results.append(future.result())
                    tick()
    except WaveletLSError as e:
        raise type(e)(f"{_label(s)}: {e}") from e

    results.sort(key=lambda r: r.index)
    aggregate = float(np.sqrt(np.mean([r.aggregate_mse for r in results])))
    per_function = {
        i: float(np.sqrt(np.mean([r.component_mse[j] for r in results])))
        for j, i in enumerate(s.functions)
    }
    logger.debug("%s: aggregate RMSE %.6g", _label(s), aggregate)
    return ScenarioResult(scenario=s, aggregate_rmse=aggregate, function_rmse=per_function)


def run_grid(
    scenarios: Sequence[SimulationScenario],
    threads: int = 1,
    progress_hook: Optional[ProgressHook] = None,
) -> pd.DataFrame:
    """
    Run a list of scenarios and stack their tables.

    The progress hook counts replications across the whole grid.
    """
    total = sum(s.replications for s in scenarios)
    offset = 0
    frames = []
    for s in scenarios:
        def hook(done: int, _total: int, start=offset):
            if progress_hook:
                progress_hook(start + done, total)

        frames.append(run_scenario(s, threads=threads, progress_hook=hook).to_frame())
        offset += s.replications
    if not frames:
        return pd.DataFrame(columns=RESULT_COLUMNS)
    return pd.concat(frames, ignore_index=True)


@dataclass(frozen=True)
class RateCheck:
    """Empirical log-log slope of RMSE^2 against n."""

    slope: float
    theoretical_slope: Optional[float]
    points: int

    @property
    def rmse_slope(self) -> float:
        return self.slope / 2.0


def rate_check(n_values: Sequence[int], rmse_values: Sequence[float], gamma: Optional[float] = None) -> RateCheck:
    """
    Least-squares slope of log(RMSE^2) on log(n).

    Args:
        n_values (Sequence[int]): Sample sizes, at least three distinct
        rmse_values (Sequence[float]): Positive RMSE per sample size
        gamma (Optional[float]): Smoothness for the reference slope -2 gamma / (2 gamma + 1)

    Returns:
        RateCheck: Fitted and reference slope
    """
    n = np.asarray(n_values, dtype=float)
    r = np.asarray(rmse_values, dtype=float)
    if n.shape != r.shape or n.ndim != 1:
        raise DomainError(f"need matching 1-D inputs, got {n.shape} and {r.shape}")
    if np.unique(n).size < 3:
        raise DomainError(f"rate check needs at least 3 distinct sample sizes, got {np.unique(n).size}")
    if np.any(n <= 0) or np.any(r <= 0):
        raise DomainError("sample sizes and RMSE values must be positive")

    slope = float(np.polyfit(np.log(n), 2.0 * np.log(r), 1)[0])
    theoretical = None if gamma is None else -2.0 * gamma / (2.0 * gamma + 1.0)
    return RateCheck(slope=slope, theoretical_slope=theoretical, points=int(n.size))


def rate_table(results: pd.DataFrame, gamma: Optional[float] = None) -> pd.DataFrame:
    """
    rate_check for every (design, filter, sigma2, function_index) group that
    covers at least three sample sizes.
    """
    keys = ["design", "filter", "sigma2", "function_index"]
    rows = []
    for group, frame in results.groupby(keys, sort=True):
        if frame["n"].nunique() < 3:
            continue
        frame = frame.sort_values("n")
        check = rate_check(frame["n"].to_numpy(), frame["rmse"].to_numpy(), gamma)
        rows.append({**dict(zip(keys, group)), "slope": check.slope, "theoretical_slope": check.theoretical_slope})
    return pd.DataFrame(rows, columns=[*keys, "slope", "theoretical_slope"])


def component_curves(
    m: FittedAdditiveModel,
    grid_points: int = 1025,
    functions: Optional[Sequence[int]] = None,
) -> pd.DataFrame:
    """
    Plot-ready curves of every estimated component in response units.

    Args:
        m (FittedAdditiveModel): Fitted model
        grid_points (int): Points of the equispaced grid on [0, 1]
        functions (Optional[Sequence[int]]): Baseline number per predictor;
            adds the true curve when given

    Returns:
        pd.DataFrame: Columns predictor, x, x_raw, estimate and optionally truth
    """
    if grid_points < 2:
        raise DomainError(f"need at least 2 grid points, got {grid_points}")
    if functions is not None:
        functions = tuple(functions)
        if len(functions) != m.p or any(i not in BASELINE_INDICES for i in functions):
            raise DomainError(f"need one baseline number in 1..9 per predictor, got {functions}")

    grid = np.linspace(0.0, 1.0, grid_points)
    frames: List[pd.DataFrame] = []
    for j in range(1, m.p + 1):
        columns = {
            "predictor": j,
            "x": grid,
            "x_raw": m.x_min[j - 1] + grid * (m.x_max[j - 1] - m.x_min[j - 1]),
            "estimate": m.y_std * component(m, j, grid),
        }
        if functions is not None:
            columns["truth"] = BASELINES[functions[j - 1]](grid)
        frames.append(pd.DataFrame(columns))
    return pd.concat(frames, ignore_index=True)
