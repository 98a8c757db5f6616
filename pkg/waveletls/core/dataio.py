"""
Dataset ingestion, transforms, splits and the real-data evaluation protocols.
"""
import logging
import os
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from waveletls.core.model import FittedAdditiveModel, fit, predict
from waveletls.models.config import FitConfig
from waveletls.utils.errors import ConfigError, DataError, DomainError
from waveletls.utils.helpers import empirical_quantile_box, inside_box, rmse
from waveletls.utils.rng import fold_assignments, make_rng, shuffled_indices

logger = logging.getLogger(__name__)

ProgressHook = Callable[[int, int], None]


@dataclass(frozen=True, eq=False)
class Dataset:
    """Predictor matrix, response and column names (features first, target last)."""

    X_raw: np.ndarray = field(repr=False)
    y_raw: np.ndarray = field(repr=False)
    column_names: Tuple[str, ...]

    def __post_init__(self):
        if self.X_raw.ndim != 2 or self.y_raw.ndim != 1 or self.X_raw.shape[0] != self.y_raw.size:
            raise DataError(f"inconsistent dataset shapes {self.X_raw.shape} and {self.y_raw.shape}")
        if self.y_raw.size == 0:
            raise DataError("dataset has no rows")
        if len(self.column_names) != self.p + 1:
            raise DataError(f"expected {self.p + 1} column names, got {len(self.column_names)}")

    @property
    def n(self) -> int:
        return int(self.y_raw.size)

    @property
    def p(self) -> int:
        return int(self.X_raw.shape[1])

    @property
    def feature_names(self) -> Tuple[str, ...]:
        return self.column_names[:-1]

    @property
    def target_name(self) -> str:
        return self.column_names[-1]

    def take(self, rows: np.ndarray) -> "Dataset":
        """Subset of rows (index array or boolean mask), in the given order."""
        return Dataset(self.X_raw[rows], self.y_raw[rows], self.column_names)


def _parse_float(cell: str) -> float:
    # correctly rounded, so values written with 17 digits read back exactly
    try:
        return float(cell.strip())
    except ValueError:
        return np.nan


def _read_frame(path: str) -> pd.DataFrame:
    if not os.path.exists(path):
        raise ConfigError(f"input file not found: {path}")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise DataError(f"{path} is empty")
    except (pd.errors.ParserError, UnicodeDecodeError) as e:
        raise DataError(f"{path} is not a readable CSV file: {e}")

    frame.columns = [str(c).strip() for c in frame.columns]
    if frame.empty:
        raise DataError(f"{path} has a header but no data rows")
    return frame


def _numeric(frame: pd.DataFrame, columns: Sequence[str], path: str) -> np.ndarray:
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise DataError(f"{path}: missing column(s) {', '.join(missing)} (have {', '.join(frame.columns)})")
    values = np.empty((len(frame), len(columns)))
    for position, name in enumerate(columns):
        column = frame[name].map(_parse_float).to_numpy(dtype=float)
        bad = ~np.isfinite(column)
        if bad.any():
            row = int(np.nonzero(bad)[0][0])
            raise DataError(
                f"{path}: data row {row + 1} (line {row + 2}), column {name!r}: "
                f"expected a finite number, got {frame[name].iloc[row]!r}"
            )
        values[:, position] = column
    return values


def load_csv(
    path: str,
    target_column: Optional[str] = None,
    feature_columns: Optional[Sequence[str]] = None,
) -> Dataset:
    """
    Read a headed CSV file into a Dataset.

    Args:
        path (str): CSV file with a header row
        target_column (Optional[str]): Response column; defaults to the last column
        feature_columns (Optional[Sequence[str]]): Predictor columns; defaults to
            every column except the target

    Returns:
        Dataset: Rows in file order
    """
    frame = _read_frame(path)
    target = target_column or frame.columns[-1]
    features = list(feature_columns) if feature_columns else [c for c in frame.columns if c != target]
    if target in features:
        raise ConfigError(f"column {target!r} cannot be both target and feature")
    if not features:
        raise DataError(f"{path}: no feature columns besides the target {target!r}")

    columns = [*features, target]
    values = _numeric(frame, columns, path)
    logger.debug("Loaded %d rows, %d features from %s", len(frame), len(features), path)
    return Dataset(values[:, :-1].copy(), values[:, -1].copy(), tuple(columns))


def load_features(
    path: str,
    p: int,
    feature_columns: Optional[Sequence[str]] = None,
    target_column: Optional[str] = None,
) -> np.ndarray:
    """
    Read the predictor columns of a headed CSV file for prediction.

    Without explicit feature columns the file must hold exactly p columns, or
    p + 1 columns of which the target (named, or else the last) is ignored.

    Returns:
        np.ndarray: Matrix of shape (q, p)
    """
    frame = _read_frame(path)
    if feature_columns:
        columns = list(feature_columns)
    elif target_column is not None:
        columns = [c for c in frame.columns if c != target_column]
    elif len(frame.columns) in (p, p + 1):
        columns = list(frame.columns[:p])
    else:
        raise DataError(f"{path} has {len(frame.columns)} columns; the model expects {p} predictors")
    if len(columns) != p:
        raise DataError(f"{path}: selected {len(columns)} feature columns, the model expects {p}")
    return _numeric(frame, columns, path)


def save_csv(d: Dataset, path: str) -> str:
    """Write a dataset with 17 significant digits so that load_csv reads it back exactly."""
    frame = pd.DataFrame(np.column_stack([d.X_raw, d.y_raw]), columns=list(d.column_names))
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.17g")
    return path


def quantile_restrict(d: Dataset, coverage: float = 0.95) -> Tuple[Dataset, np.ndarray]:
    """
    Keep the rows inside the per-coordinate central empirical-quantile box.

    Args:
        d (Dataset): Input data
        coverage (float): Fraction in (0, 1]; the box spans [alpha/2, 1 - alpha/2]
            quantiles with alpha = 1 - coverage

    Returns:
        Tuple[Dataset, np.ndarray]: Restricted data and the (p, 2) bounds
    """
    bounds = empirical_quantile_box(d.X_raw, coverage)
    return apply_bounds(d, bounds), bounds


def apply_bounds(d: Dataset, bounds: np.ndarray) -> Dataset:
    """Restrict a dataset to previously computed quantile bounds."""
    keep = inside_box(d.X_raw, bounds)
    if not keep.any():
        raise DomainError("quantile restriction left no rows")
    logger.debug("Quantile box keeps %d of %d rows", int(keep.sum()), d.n)
    return d.take(keep)


def select_features(d: Dataset, features: Sequence[str]) -> Dataset:
    """Dataset restricted to a subset of its feature columns."""
    unknown = [name for name in features if name not in d.feature_names]
    if unknown:
        raise ConfigError(f"unknown feature(s) {', '.join(unknown)} (have {', '.join(d.feature_names)})")
    positions = [d.feature_names.index(name) for name in features]
    return Dataset(d.X_raw[:, positions], d.y_raw, (*features, d.target_name))


def split(d: Dataset, train_fraction: float = 0.85, seed: int = 0) -> Tuple[Dataset, Dataset]:
    """
    Seeded shuffle, then the first round(train_fraction * n) rows train.

    Args:
        d (Dataset): Input data
        train_fraction (float): Fraction in (0, 1)
        seed (int): Shuffle seed

    Returns:
        Tuple[Dataset, Dataset]: (train, test)
    """
    if not 0 < train_fraction < 1:
        raise DomainError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    n_train = int(round(train_fraction * d.n))
    if n_train == 0 or n_train == d.n:
        raise DomainError(f"a {train_fraction} split of {d.n} rows leaves an empty part")
    order = shuffled_indices(d.n, make_rng(seed))
    return d.take(order[:n_train]), d.take(order[n_train:])


def kfold(d: Dataset, k: int = 2, seed: int = 0) -> np.ndarray:
    """Fold label 0..k-1 per row; fold sizes differ by at most one."""
    return fold_assignments(d.n, k, make_rng(seed))


def evaluate(m: FittedAdditiveModel, test: Dataset) -> float:
    """RMSE of the model's predictions on test, in original response units."""
    if test.n == 0:
        raise DomainError("cannot evaluate on an empty test set")
    if test.p != m.p:
        raise DomainError(f"model has {m.p} predictors, test data has {test.p}")
    return rmse(predict(m, test.X_raw), test.y_raw)


def holdout_experiment(
    d: Dataset,
    config: Optional[FitConfig] = None,
    train_fraction: float = 0.85,
    repetitions: int = 1,
    seed: int = 0,
    progress_hook: Optional[ProgressHook] = None,
) -> List[float]:
    """
    Repeated train/test evaluation.

    When config.quantile_coverage is set the data are restricted to the
    quantile box once, before splitting; the fits then use the min/max of each
    training part.

    Returns:
        List[float]: Test RMSE per repetition
    """
    config = config or FitConfig()
    data = d
    if config.quantile_coverage is not None:
        data, _ = quantile_restrict(d, config.quantile_coverage)
        config = config.model_copy(update={"quantile_coverage": None})

    results = []
    for repetition in range(repetitions):
        train, test = split(data, train_fraction, seed=_derived_seed(seed, repetition))
        model = fit(train.X_raw, train.y_raw, config)
        results.append(evaluate(model, test))
        if progress_hook:
            progress_hook(repetition + 1, repetitions)
    logger.debug("Hold-out RMSE over %d repetitions: %s", repetitions, results)
    return results


def cv_experiment(
    d: Dataset,
    config: Optional[FitConfig] = None,
    folds: int = 2,
    repetitions: int = 10,
    seed: int = 0,
    progress_hook: Optional[ProgressHook] = None,
) -> List[float]:
    """
    Repeated k-fold cross-validation on the full sample.

    Returns:
        List[float]: Mean out-of-fold RMSE per repetition
    """
    config = config or FitConfig()
    if folds > d.n:
        raise DomainError(f"cannot split {d.n} rows into {folds} folds")

    results = []
    for repetition in range(repetitions):
        labels = kfold(d, folds, seed=_derived_seed(seed, repetition))
        fold_scores = []
        for fold in range(folds):
            test = labels == fold
            model = fit(d.X_raw[~test], d.y_raw[~test], config)
            fold_scores.append(evaluate(model, d.take(test)))
        results.append(float(np.mean(fold_scores)))
        if progress_hook:
            progress_hook(repetition + 1, repetitions)
    logger.debug("CV RMSE over %d repetitions: %s", repetitions, results)
    return results


def _derived_seed(seed: int, repetition: int) -> int:
    # one independent 64-bit seed per repetition
    return int(make_rng(seed, stream=repetition).integers(0, 2**63))
