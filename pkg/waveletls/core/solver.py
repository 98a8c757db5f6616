"""
Least-squares solvers for the wavelet design matrix.

The primary path is the minimum-norm solution from a singular value
decomposition (LAPACK gelsd); the normal equations are never formed.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
import scipy.linalg as spla

from waveletls.core.design import DesignMatrix
from waveletls.utils.errors import DimensionError, DomainError, NumericError
from waveletls.utils.helpers import ensure_finite

logger = logging.getLogger(__name__)

MatrixLike = Union[DesignMatrix, np.ndarray]


@dataclass(frozen=True, eq=False)
class LsqSolution:
    """Coefficient vector and diagnostics of a least-squares solve."""

    c_star: np.ndarray = field(repr=False)
    effective_rank: int
    residual_norm: float
    rank_tolerance: float

    def fitted(self, B: MatrixLike) -> np.ndarray:
        """Fitted values B @ c_star."""
        return _as_matrix(B) @ self.c_star


def _as_matrix(B: MatrixLike) -> np.ndarray:
    return B.B if isinstance(B, DesignMatrix) else np.asarray(B, dtype=float)


def _prepare(B: MatrixLike, y: np.ndarray):
    matrix = _as_matrix(B)
    y = np.asarray(y, dtype=float)
    if matrix.ndim != 2 or matrix.size == 0 or y.size == 0:
        raise DimensionError(f"least squares needs non-empty inputs, got B {matrix.shape}, y {y.shape}")
    if y.ndim != 1 or matrix.shape[0] != y.size:
        raise DimensionError(f"B has {matrix.shape[0]} rows but y has shape {y.shape}")
    ensure_finite(matrix, "design matrix")
    ensure_finite(y, "response")
    return matrix, y


def default_rank_tolerance(n_rows: int, n_columns: int) -> float:
    """Relative singular-value cutoff eps * max(n, p * 2**J)."""
    return float(np.finfo(float).eps * max(n_rows, n_columns))


def solve_lsq(B: MatrixLike, y: np.ndarray, rank_tolerance: Optional[float] = None) -> LsqSolution:
    """
    Minimum-norm solution of min_c ||B c - y||^2.

    Singular values below rank_tolerance * sigma_max count as zero, so the
    (p - 1)-dimensional null space of an additive design is detected and the
    returned coefficients have the smallest Euclidean norm among all minimizers.

    Args:
        B (MatrixLike): Design matrix (n x m)
        y (np.ndarray): Response of length n
        rank_tolerance (Optional[float]): Relative cutoff; defaults to
            default_rank_tolerance(n, m)

    Returns:
        LsqSolution: Coefficients and rank diagnostics
    """
    matrix, y = _prepare(B, y)
    tolerance = default_rank_tolerance(*matrix.shape) if rank_tolerance is None else float(rank_tolerance)
    if tolerance < 0:
        raise DomainError(f"rank tolerance must be non-negative, got {tolerance}")

    try:
        c_star, _, rank, _ = spla.lstsq(
            matrix, y, cond=tolerance, lapack_driver="gelsd", check_finite=False
        )
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NumericError(f"least-squares factorization failed: {e}")

    residual = float(np.linalg.norm(y - matrix @ c_star))
    logger.debug(
        "Minimum-norm solve: %d x %d, effective rank %d, residual %.6g",
        matrix.shape[0], matrix.shape[1], rank, residual,
    )
    return LsqSolution(
        c_star=c_star,
        effective_rank=int(rank),
        residual_norm=residual,
        rank_tolerance=tolerance,
    )


def solve_ridge(
    B: MatrixLike,
    y: np.ndarray,
    lam: float,
    rank_tolerance: Optional[float] = None,
) -> LsqSolution:
    """
    Ridge-regularized solve of min_c ||B c - y||^2 + lam ||c||^2.

    At lam = 0 this is the minimum-norm solve.

    Args:
        B (MatrixLike): Design matrix (n x m)
        y (np.ndarray): Response of length n
        lam (float): Non-negative penalty weight
        rank_tolerance (Optional[float]): Relative cutoff used for the
            reported effective rank

    Returns:
        LsqSolution: Coefficients and diagnostics
    """
    if lam is None or not np.isfinite(lam) or lam < 0:
        raise DomainError(f"ridge penalty must be a finite non-negative number, got {lam}")
    if lam == 0:
        return solve_lsq(B, y, rank_tolerance)

    matrix, y = _prepare(B, y)
    tolerance = default_rank_tolerance(*matrix.shape) if rank_tolerance is None else float(rank_tolerance)

    try:
        U, s, Vt = np.linalg.svd(matrix, full_matrices=False)
    except np.linalg.LinAlgError as e:
        raise NumericError(f"singular value decomposition failed: {e}")

    shrink = s / (s**2 + lam)
    c_star = Vt.T @ (shrink * (U.T @ y))
    rank = int(np.count_nonzero(s > tolerance * s[0])) if s.size else 0
    residual = float(np.linalg.norm(y - matrix @ c_star))
    logger.debug("Ridge solve: lambda=%g, effective rank %d, residual %.6g", lam, rank, residual)
    return LsqSolution(
        c_star=c_star,
        effective_rank=rank,
        residual_norm=residual,
        rank_tolerance=tolerance,
    )
