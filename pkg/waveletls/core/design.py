"""
Design matrix for the additive wavelet least-squares estimator.

Row i of B stacks, predictor by predictor, the periodized scaling functions
of level J evaluated at x_i:

    B[i, (j - 1) * 2**J + k] = phi^per_{J,k}(x_ij),   j = 1..p, k = 0..2**J - 1

Each block of a row sums to 2**(J/2) (periodized partition of unity). For
p >= 2 the block-sum columns coincide, so rank(B) <= p * 2**J - (p - 1); the
solver returns the minimum-norm solution rather than assuming full rank.
"""
import logging
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from waveletls.core.wavelet import ScalingEvaluator, periodized_block
from waveletls.utils.errors import DimensionError, DomainError, PredictorIndexError
from waveletls.utils.helpers import ensure_finite

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    """The n x (p * 2**J) matrix B with its coefficient layout."""

    B: np.ndarray = field(repr=False)
    J: int
    p: int

    @property
    def n(self) -> int:
        return int(self.B.shape[0])

    @property
    def n_columns(self) -> int:
        return int(self.B.shape[1])

    def column(self, j: int, k: int) -> int:
        """Column index of predictor j (1-based) and translate k."""
        return column_index(j, k, self.J, self.p)

    def block(self, j: int) -> np.ndarray:
        """Columns belonging to predictor j (1-based)."""
        start = column_index(j, 0, self.J, self.p)
        return self.B[:, start : start + 2**self.J]


def column_index(j: int, k: int, J: int, p: int) -> int:
    """
    Map (predictor j, translate k) to its column in B.

    Args:
        j (int): Predictor index, 1..p
        k (int): Translate, 0..2**J - 1
        J (int): Resolution level
        p (int): Number of predictors

    Returns:
        int: (j - 1) * 2**J + k
    """
    if not 1 <= j <= p:
        raise PredictorIndexError(f"predictor index {j} outside 1..{p}")
    if not 0 <= k < 2**J:
        raise DomainError(f"translate {k} outside 0..{2**J - 1}")
    return (j - 1) * 2**J + k


def layout(J: int, p: int) -> Tuple[Tuple[int, int], ...]:
    """(predictor, translate) pairs in column order."""
    return tuple((j, k) for j in range(1, p + 1) for k in range(2**J))


def _check_unit_box(X: np.ndarray) -> None:
    if X.size and (X.min() < 0.0 or X.max() > 1.0):
        rows, cols = np.nonzero((X < 0.0) | (X > 1.0))
        raise DomainError(
            f"predictor values must lie in [0, 1]; first offending entry at row {rows[0]}, "
            f"column {cols[0]} ({X[rows[0], cols[0]]!r}). Rescale or clip first."
        )


def design_rows(X: np.ndarray, J: int, ev: ScalingEvaluator) -> np.ndarray:
    """
    Evaluate the basis rows B(x) for every row of X.

    Args:
        X (np.ndarray): Matrix of shape (n, p) with entries in [0, 1]
        J (int): Resolution level
        ev (ScalingEvaluator): Scaling function evaluator

    Returns:
        np.ndarray: Matrix of shape (n, p * 2**J)
    """
    X = ensure_finite(X, "predictor matrix")
    if X.ndim != 2:
        raise DimensionError(f"predictor matrix must be 2-D, got shape {X.shape}")
    _check_unit_box(X)
    blocks = [periodized_block(ev, J, X[:, j]) for j in range(X.shape[1])]
    if not blocks:
        return np.zeros((X.shape[0], 0))
    return np.hstack(blocks)


def build_design(X: np.ndarray, J: int, ev: ScalingEvaluator) -> DesignMatrix:
    """
    Assemble the design matrix B for predictors in [0, 1]^p.

    Args:
        X (np.ndarray): Matrix of shape (n, p) with entries in [0, 1]
        J (int): Resolution level
        ev (ScalingEvaluator): Scaling function evaluator

    Returns:
        DesignMatrix: B with its layout
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0 or X.shape[1] == 0:
        raise DimensionError(f"need a non-empty (n, p) predictor matrix, got shape {X.shape}")

    n, p = X.shape
    columns = p * 2**J
    if columns > n:
        raise DimensionError(
            f"p * 2^J = {p} * 2^{J} = {columns} exceeds n = {n}; the design matrix B "
            "cannot be non-singular. Lower J or supply more samples."
        )

    B = design_rows(X, J, ev)
    B.setflags(write=False)
    logger.debug("Built design matrix: n=%d, p=%d, J=%d, columns=%d", n, p, J, columns)
    return DesignMatrix(B=B, J=J, p=p)


def predict_row(x: np.ndarray, J: int, ev: ScalingEvaluator) -> np.ndarray:
    """
    Basis row B(x) for a single point x in [0, 1]^p, in the layout of build_design.

    Args:
        x (np.ndarray): Vector of length p
        J (int): Resolution level
        ev (ScalingEvaluator): Scaling function evaluator

    Returns:
        np.ndarray: Vector of length p * 2**J
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DimensionError(f"expected a single point (1-D vector), got shape {x.shape}")
    return design_rows(x[None, :], J, ev)[0]
