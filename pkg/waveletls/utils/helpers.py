"""
Shared helpers for waveletls: logging setup and small numeric utilities.
"""
import logging
import os
from typing import Optional, Sequence

import numpy as np
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from waveletls.utils.errors import DomainError, NumericError

LOG_FORMAT = "%(message)s"
FILE_LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def setup_logging(level: str = "INFO", log_file: Optional[str] = None) -> None:
    """
    Configure the root logger for the CLI.

    Console records go to stderr through rich so that tables written to
    stdout stay machine readable.

    Args:
        level (str): Log level name (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file (Optional[str]): Optional path of a plain-text log file
    """
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)

    console_handler = RichHandler(
        console=Console(stderr=True),
        show_path=False,
        rich_tracebacks=False,
    )
    console_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(console_handler)

    if log_file:
        log_dir = os.path.dirname(log_file)
        if log_dir:
            os.makedirs(log_dir, exist_ok=True)
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(logging.Formatter(FILE_LOG_FORMAT))
        root.addHandler(file_handler)

    root.setLevel(level.upper())


def ensure_finite(values: np.ndarray, what: str) -> np.ndarray:
    """
    Reject arrays containing NaN or infinity.

    Args:
        values (np.ndarray): Array to check
        what (str): Name used in the error message

    Returns:
        np.ndarray: The same array, as float64
    """
    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        bad = int(np.count_nonzero(~np.isfinite(arr)))
        raise NumericError(f"{what} contains {bad} non-finite value(s)")
    return arr


def truncate(values: np.ndarray, beta: float) -> np.ndarray:
    """
    Truncation operator T_beta: identity on [-beta, beta], clamps outside.

    Args:
        values (np.ndarray): Values to truncate
        beta (float): Positive threshold

    Returns:
        np.ndarray: Truncated values
    """
    if not beta > 0:
        raise DomainError(f"truncation threshold must be positive, got {beta}")
    return np.clip(np.asarray(values, dtype=float), -beta, beta)


def rmse(predicted: np.ndarray, observed: np.ndarray) -> float:
    """Root mean squared error between two equally long vectors."""
    predicted = np.asarray(predicted, dtype=float)
    observed = np.asarray(observed, dtype=float)
    if predicted.shape != observed.shape:
        raise DomainError(
            f"shape mismatch: {predicted.shape} predictions vs {observed.shape} observations"
        )
    if predicted.size == 0:
        raise DomainError("cannot compute RMSE of an empty sample")
    return float(np.sqrt(np.mean((predicted - observed) ** 2)))


def render_table(title: str, columns: Sequence[str], rows: Sequence[Sequence[object]]) -> Table:
    """
    Build an aligned rich table for the --pretty output mode.

    Args:
        title (str): Table title
        columns (Sequence[str]): Column headers
        rows (Sequence[Sequence[object]]): Row values

    Returns:
        Table: Table ready for console.print
    """
    table = Table(title=title)
    for name in columns:
        table.add_column(str(name), justify="right")
    for row in rows:
        table.add_row(*[_format_cell(value) for value in row])
    return table


def _format_cell(value: object) -> str:
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.6g}"
    return str(value)


def empirical_quantile_box(X: np.ndarray, coverage: float) -> np.ndarray:
    """
    Per-column central empirical-quantile interval.

    Uses linear order-statistic interpolation. With alpha = 1 - coverage the
    box spans the [alpha/2, 1 - alpha/2] quantiles of each column; coverage 1
    gives the column minimum and maximum.

    Args:
        X (np.ndarray): Matrix of shape (n, p)
        coverage (float): Fraction in (0, 1]

    Returns:
        np.ndarray: Array of shape (p, 2) holding (low, high) per column
    """
    if not 0 < coverage <= 1:
        raise DomainError(f"coverage must lie in (0, 1], got {coverage}")
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise DomainError(f"need a non-empty (n, p) matrix, got shape {X.shape}")
    alpha = 1.0 - coverage
    bounds = np.quantile(X, [alpha / 2.0, 1.0 - alpha / 2.0], axis=0, method="linear")
    return np.ascontiguousarray(bounds.T)


def inside_box(X: np.ndarray, bounds: np.ndarray) -> np.ndarray:
    """Boolean mask of rows of X lying inside the closed box `bounds` (p x 2)."""
    X = np.asarray(X, dtype=float)
    return np.all((X >= bounds[:, 0]) & (X <= bounds[:, 1]), axis=1)
