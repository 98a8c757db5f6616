"""
Additive wavelet least-squares estimator.

fit() standardizes the response, rescales the predictors into [0, 1]^p,
chooses the resolution level J, solves the least-squares problem on the
periodized scaling basis and derives the truncation threshold beta_n from a
noise estimate. predict() evaluates B(x)^T c* and truncates it at beta_n on the
standardized scale.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import pywt
from scipy.integrate import trapezoid

from waveletls.core.design import build_design, column_index, design_rows
from waveletls.core.solver import solve_lsq, solve_ridge
from waveletls.core.wavelet import (
    FILTER_REGISTRY,
    ScalingEvaluator,
    get_evaluator,
    make_filter,
    periodized_block,
)
from waveletls.models.config import FitConfig
from waveletls.utils.errors import DimensionError, DomainError, PredictorIndexError
from waveletls.utils.helpers import (
    empirical_quantile_box,
    ensure_finite,
    inside_box,
    rmse,
    truncate,
)
from waveletls.utils.rng import fold_assignments, make_rng

logger = logging.getLogger(__name__)

SIGMA_FLOOR = 1e-12
MAD_NORMALIZER = 0.6745
# detail coefficients within this many ulps of max|y| are rounding noise
DETAIL_ROUNDING_ULPS = 64
COMPONENT_GRID_POINTS = 1025
MIN_SAMPLES_FOR_J = 8


@dataclass(frozen=True)
class FitDiagnostics:
    """Bookkeeping reported by fit and stored with the model."""

    n_train: int
    n_dropped: int
    effective_rank: int
    residual_norm: float
    sigma_floored: bool


@dataclass(frozen=True, eq=False)
class FittedAdditiveModel:
    """Immutable result of fit(); everything predict() and component() need."""

    filter_name: str
    J: int
    p: int
    c_star: np.ndarray = field(repr=False)
    beta0: float
    y_mean: float
    y_std: float
    x_min: np.ndarray = field(repr=False)
    x_max: np.ndarray = field(repr=False)
    beta_n: float
    sigma_hat: float
    quantile_bounds: Optional[np.ndarray] = field(default=None, repr=False)
    depth: int = 53
    diagnostics: Optional[FitDiagnostics] = None

    def __post_init__(self):
        if not self.beta_n > 0:
            raise DomainError(f"beta_n must be positive, got {self.beta_n}")
        if not self.y_std > 0:
            raise DomainError(f"y_std must be positive, got {self.y_std}")
        if np.any(self.x_max <= self.x_min):
            raise DomainError("every predictor needs x_max > x_min")
        if self.c_star.size != self.p * 2**self.J:
            raise DimensionError(
                f"c_star has {self.c_star.size} entries, expected p * 2^J = {self.p * 2**self.J}"
            )
        for array in (self.c_star, self.x_min, self.x_max):
            array.setflags(write=False)

    @property
    def evaluator(self) -> ScalingEvaluator:
        return get_evaluator(self.filter_name, self.depth)

    def coefficients(self, j: int) -> np.ndarray:
        """Coefficients c_{J,k}^{(j)} of predictor j (1-based)."""
        start = column_index(j, 0, self.J, self.p)
        return self.c_star[start : start + 2**self.J]


def select_J(n: int) -> int:
    """
    Practical resolution level J(n) = 1 + floor(log2(n) - log2(ln(n) (ln(n) + 1))).

    Args:
        n (int): Sample count, at least 8

    Returns:
        int: Resolution level J >= 0
    """
    if n < MIN_SAMPLES_FOR_J:
        raise DomainError(f"select_J needs n >= {MIN_SAMPLES_FOR_J}, got {n}")
    log_n = np.log(n)
    J = 1 + int(np.floor(np.log2(n) - np.log2(log_n * (log_n + 1.0))))
    return max(J, 0)


def estimate_sigma(y: np.ndarray, method: str = "mad_detail", filter_name: str = "coif24tap") -> float:
    """
    Estimate the noise standard deviation of a response sequence.

    sample_sd is the population standard deviation. mad_detail takes the
    largest power-of-two prefix of y, runs one level of the periodic discrete
    wavelet transform with the model's filter and returns
    median(|finest detail coefficients|) / 0.6745. It depends on the order of y.

    Args:
        y (np.ndarray): Response values
        method (str): sample_sd or mad_detail
        filter_name (str): Registry filter for the transform

    Returns:
        float: sigma_hat >= 0
    """
    y = ensure_finite(y, "response")
    if y.ndim != 1 or y.size < 4:
        raise DomainError(f"noise estimation needs at least 4 values, got shape {y.shape}")

    if method == "sample_sd":
        return float(np.std(y))
    if method != "mad_detail":
        raise DomainError(f"unknown sigma method {method!r}")

    length = 2 ** int(np.floor(np.log2(y.size)))
    table_name = FILTER_REGISTRY[make_filter(filter_name).name][0]
    segment = y[:length]
    _, detail = pywt.dwt(segment, pywt.Wavelet(table_name), mode="periodization")
    cutoff = DETAIL_ROUNDING_ULPS * np.finfo(float).eps * float(np.abs(segment).max())
    detail = np.where(np.abs(detail) <= cutoff, 0.0, detail)
    return float(np.median(np.abs(detail)) / MAD_NORMALIZER)


def select_beta(sigma: float, n: int) -> float:
    """
    Truncation threshold beta_n = 4 sigma sqrt(ln n).

    A zero sigma is floored at 1e-12 so that beta_n stays positive.
    """
    if n < 2:
        raise DomainError(f"select_beta needs n >= 2, got {n}")
    if not np.isfinite(sigma) or sigma < 0:
        raise DomainError(f"sigma must be finite and non-negative, got {sigma}")
    if sigma == 0:
        logger.warning("Noise estimate is 0; flooring sigma at %g for the truncation threshold", SIGMA_FLOOR)
        sigma = SIGMA_FLOOR
    return float(4.0 * sigma * np.sqrt(np.log(n)))


def _check_inputs(X_raw: np.ndarray, Y_raw: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    X = ensure_finite(X_raw, "predictor matrix")
    Y = ensure_finite(Y_raw, "response")
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or Y.ndim != 1:
        raise DimensionError(f"expected X of shape (n, p) and Y of shape (n,), got {X.shape} and {Y.shape}")
    if X.shape[0] != Y.size:
        raise DimensionError(f"X has {X.shape[0]} rows but Y has {Y.size} values")
    if Y.size == 0 or X.shape[1] == 0:
        raise DimensionError("cannot fit an empty sample")
    return X, Y


def _standardize(Y: np.ndarray) -> Tuple[np.ndarray, float, float]:
    if np.ptp(Y) == 0:
        # constant response: exact mean, unit scale
        return np.zeros_like(Y), float(Y[0]), 1.0
    y_mean = float(np.mean(Y))
    y_std = float(np.std(Y))
    return (Y - y_mean) / y_std, y_mean, y_std


def _box(X: np.ndarray, config: FitConfig) -> Tuple[np.ndarray, np.ndarray, Optional[np.ndarray], np.ndarray]:
    """Rescaling box (x_min, x_max), optional quantile bounds and the rows to keep."""
    n, p = X.shape
    keep = np.ones(n, dtype=bool)
    bounds = None

    if config.unit_box:
        if X.min() < 0.0 or X.max() > 1.0:
            raise DomainError("unit_box fits need predictors already in [0, 1]")
        x_min, x_max = np.zeros(p), np.ones(p)
    elif config.quantile_coverage is not None:
        bounds = empirical_quantile_box(X, config.quantile_coverage)
        keep = inside_box(X, bounds)
        x_min, x_max = bounds[:, 0].copy(), bounds[:, 1].copy()
    else:
        x_min, x_max = X.min(axis=0), X.max(axis=0)

    degenerate = np.nonzero(x_max <= x_min)[0]
    if degenerate.size:
        column = int(degenerate[0]) + 1
        raise DomainError(
            f"predictor column {column} is degenerate (x_max = x_min = {x_min[degenerate[0]]!r})"
        )
    return x_min, x_max, bounds, keep


def fit(X_raw: np.ndarray, Y_raw: np.ndarray, config: Optional[FitConfig] = None) -> FittedAdditiveModel:
    """
    Fit the additive wavelet least-squares estimator.

    Args:
        X_raw (np.ndarray): Predictors, shape (n, p)
        Y_raw (np.ndarray): Response, shape (n,)
        config (Optional[FitConfig]): Fit settings; defaults to FitConfig()

    Returns:
        FittedAdditiveModel: The fitted model
    """
    config = config or FitConfig()
    X, Y = _check_inputs(X_raw, Y_raw)
    z, y_mean, y_std = _standardize(Y)

    x_min, x_max, bounds, keep = _box(X, config)
    n_dropped = int(np.count_nonzero(~keep))
    X, z = X[keep], z[keep]
    n_train, p = X.shape
    if n_train == 0:
        raise DomainError("no rows left inside the restriction region")
    if n_dropped:
        logger.info("Dropped %d of %d rows outside the quantile box", n_dropped, n_dropped + n_train)

    U = np.clip((X - x_min) / (x_max - x_min), 0.0, 1.0)
    J = config.J_override if config.J_override is not None else select_J(n_train)

    ev = get_evaluator(config.filter_name, config.depth)
    design = build_design(U, J, ev)
    if config.ridge_lambda:
        solution = solve_ridge(design, z, config.ridge_lambda, config.rank_tolerance)
    else:
        solution = solve_lsq(design, z, config.rank_tolerance)

    expected_rank = design.n_columns - (p - 1)
    if solution.effective_rank < expected_rank:
        logger.warning(
            "Design rank %d is below the expected %d (p * 2^J - (p - 1)); "
            "some translates have too few samples",
            solution.effective_rank, expected_rank,
        )

    sigma_hat = estimate_sigma(z, config.sigma_method, config.filter_name)
    sigma_floored = False
    if config.beta_override is not None:
        beta_n = float(config.beta_override)
    else:
        sigma_floored = sigma_hat == 0
        beta_n = select_beta(sigma_hat, n_train)

    logger.debug(
        "Fit: n=%d, p=%d, J=%d, rank=%d, sigma_hat=%.6g, beta_n=%.6g",
        n_train, p, J, solution.effective_rank, sigma_hat, beta_n,
    )
    return FittedAdditiveModel(
        filter_name=config.filter_name,
        J=J,
        p=p,
        c_star=np.array(solution.c_star, dtype=float),
        beta0=0.0,
        y_mean=y_mean,
        y_std=y_std,
        x_min=np.asarray(x_min, dtype=float),
        x_max=np.asarray(x_max, dtype=float),
        beta_n=beta_n,
        sigma_hat=sigma_hat,
        quantile_bounds=bounds,
        depth=config.depth,
        diagnostics=FitDiagnostics(
            n_train=n_train,
            n_dropped=n_dropped,
            effective_rank=solution.effective_rank,
            residual_norm=solution.residual_norm,
            sigma_floored=sigma_floored,
        ),
    )


def rescale(m: FittedAdditiveModel, X: np.ndarray, strict: bool = False) -> Tuple[np.ndarray, int]:
    """
    Map raw predictors into the model's [0, 1]^p box.

    Rows outside [x_min, x_max] are clipped to the boundary (and counted) or,
    in strict mode, rejected.

    Args:
        m (FittedAdditiveModel): Fitted model
        X (np.ndarray): Raw predictors, shape (q, p)
        strict (bool): Reject out-of-box rows instead of clipping

    Returns:
        Tuple[np.ndarray, int]: Rescaled predictors and the number of clipped rows
    """
    X = ensure_finite(X, "prediction inputs")
    if X.ndim == 1:
        X = X[None, :] if m.p > 1 else X[:, None]
    if X.ndim != 2 or X.shape[1] != m.p:
        raise DimensionError(f"model has {m.p} predictors, inputs have shape {X.shape}")

    outside = np.any((X < m.x_min) | (X > m.x_max), axis=1)
    clipped = int(np.count_nonzero(outside))
    if clipped:
        if strict:
            first = int(np.nonzero(outside)[0][0])
            raise DomainError(f"{clipped} input row(s) lie outside the training box (first: row {first})")
        logger.warning("Clipped %d input row(s) to the training box", clipped)

    U = np.clip((X - m.x_min) / (m.x_max - m.x_min), 0.0, 1.0)
    return U, clipped


def _standardized_from_unit(m: FittedAdditiveModel, U: np.ndarray, truncated: bool = True) -> np.ndarray:
    values = m.beta0 + design_rows(U, m.J, m.evaluator) @ m.c_star
    return truncate(values, m.beta_n) if truncated else values


def predict_standardized(
    m: FittedAdditiveModel,
    X_new: np.ndarray,
    strict: bool = False,
    truncated: bool = True,
) -> np.ndarray:
    """Predictions on the standardized response scale, truncated at beta_n by default."""
    U, _ = rescale(m, X_new, strict)
    return _standardized_from_unit(m, U, truncated)


def predict(m: FittedAdditiveModel, X_new: np.ndarray, strict: bool = False) -> np.ndarray:
    """
    Predict responses in original units: y_mean + y_std * T_beta(B(x)^T c*).

    Args:
        m (FittedAdditiveModel): Fitted model
        X_new (np.ndarray): Raw predictors, shape (q, p)
        strict (bool): Reject rows outside the training box instead of clipping

    Returns:
        np.ndarray: Predictions, shape (q,)
    """
    return m.y_mean + m.y_std * predict_standardized(m, X_new, strict)


def predict_unit(m: FittedAdditiveModel, U: np.ndarray) -> np.ndarray:
    """Predictions in original units for inputs already mapped by `rescale`."""
    return m.y_mean + m.y_std * _standardized_from_unit(m, U)


def _check_predictor(m: FittedAdditiveModel, j: int) -> None:
    if not 1 <= j <= m.p:
        raise PredictorIndexError(f"predictor index {j} outside 1..{m.p}")


def _raw_component(m: FittedAdditiveModel, j: int, x: np.ndarray) -> np.ndarray:
    return periodized_block(m.evaluator, m.J, x) @ m.coefficients(j)


def component_means(m: FittedAdditiveModel) -> np.ndarray:
    """Mean over [0, 1] of each uncentered component (1025-point trapezoid rule)."""
    grid = np.linspace(0.0, 1.0, COMPONENT_GRID_POINTS)
    block = periodized_block(m.evaluator, m.J, grid)
    return np.array([trapezoid(block @ m.coefficients(j), grid) for j in range(1, m.p + 1)])


def component(m: FittedAdditiveModel, j: int, x) -> np.ndarray:
    """
    Estimated additive component f_j on the rescaled coordinate, centered to mean zero.

    Args:
        m (FittedAdditiveModel): Fitted model
        j (int): Predictor index, 1..p
        x: Scalar or array of points in [0, 1]

    Returns:
        Component values on the standardized response scale
    """
    _check_predictor(m, j)
    scalar = np.ndim(x) == 0
    points = np.atleast_1d(np.asarray(x, dtype=float))
    grid = np.linspace(0.0, 1.0, COMPONENT_GRID_POINTS)
    mean = trapezoid(_raw_component(m, j, grid), grid)
    values = _raw_component(m, j, points) - mean
    return float(values[0]) if scalar else values


def intercept(m: FittedAdditiveModel) -> float:
    """beta0 plus the component means removed by component()."""
    return float(m.beta0 + component_means(m).sum())


def fitted_summary(m: FittedAdditiveModel, X: np.ndarray, y: np.ndarray) -> pd.DataFrame:
    """
    Observed, fitted and residual values on the standardized scale.

    Args:
        m (FittedAdditiveModel): Fitted model
        X (np.ndarray): Raw predictors
        y (np.ndarray): Raw responses

    Returns:
        pd.DataFrame: Columns row, observed, fitted, residual
    """
    y = ensure_finite(y, "response")
    fitted = predict_standardized(m, X)
    if fitted.shape != y.shape:
        raise DimensionError(f"{fitted.size} predictions for {y.size} responses")
    observed = (y - m.y_mean) / m.y_std
    return pd.DataFrame(
        {
            "row": np.arange(y.size),
            "observed": observed,
            "fitted": fitted,
            "residual": observed - fitted,
        }
    )


def cv_select_beta(
    X: np.ndarray,
    Y: np.ndarray,
    config: Optional[FitConfig],
    folds: int,
    grid: Sequence[float],
    seed: int = 0,
) -> float:
    """
    Choose the truncation threshold by k-fold cross-validation.

    Each fold is fitted once; every candidate beta is scored by the out-of-fold
    RMSE in original response units, averaged over folds. Ties go to the larger
    beta (less truncation).

    Args:
        X (np.ndarray): Predictors, shape (n, p)
        Y (np.ndarray): Response, shape (n,)
        config (Optional[FitConfig]): Fit settings shared by all folds
        folds (int): Number of folds, at least 2
        grid (Sequence[float]): Candidate thresholds on the standardized scale
        seed (int): Seed of the fold assignment

    Returns:
        float: Selected beta
    """
    candidates = [float(beta) for beta in grid]
    if not candidates:
        raise DomainError("the beta grid must not be empty")
    if any(not beta > 0 for beta in candidates):
        raise DomainError(f"beta candidates must be positive, got {candidates}")
    if folds < 2:
        raise DomainError(f"need at least 2 folds, got {folds}")
    if len(candidates) == 1:
        return candidates[0]

    config = config or FitConfig()
    X, Y = _check_inputs(X, Y)
    labels = fold_assignments(Y.size, folds, make_rng(seed))

    scores: Dict[float, List[float]] = {beta: [] for beta in candidates}
    for fold in range(folds):
        test = labels == fold
        try:
            model = fit(X[~test], Y[~test], config)
        except DimensionError as e:
            raise DimensionError(f"fold {fold + 1} of {folds} is too small to fit: {e}")
        raw = predict_standardized(model, X[test], truncated=False)
        for beta in candidates:
            predicted = model.y_mean + model.y_std * truncate(raw, beta)
            scores[beta].append(rmse(predicted, Y[test]))

    ranked = sorted(candidates, reverse=True)
    best = ranked[0]
    best_score = float(np.mean(scores[best]))
    for beta in ranked[1:]:
        score = float(np.mean(scores[beta]))
        if score < best_score:
            best, best_score = beta, score
    logger.debug("CV selected beta=%.6g (mean RMSE %.6g)", best, best_score)
    return best
