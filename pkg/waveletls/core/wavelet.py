"""
Orthonormal scaling filters and exact point evaluation of scaling functions.

Scaling functions are evaluated with the Daubechies-Lagarias product of two
fixed matrices. For a filter h_0..h_{L-1} the scaling function phi is
supported on [0, L-1]; with N = L - 1 we track the vector

    v(t) = (phi(t), phi(t+1), ..., phi(t+N-1)),   t in [0, 1)

which satisfies v(t) = T_d v(2t - d) for the leading binary digit d of t,
where T_d[i, j] = sqrt(2) * h_{2i+d-j}. Unrolling the recursion over the
binary digits d_1 d_2 ... d_m of t gives

    v(t) = T_{d_1} T_{d_2} ... T_{d_m} v(0)

and v(0) holds phi at the integers, the eigenvector of T_0 for eigenvalue 1
normalized to unit sum. phi(m + t) is entry m of v(t). Remaining digits beyond
the configured depth are taken as zero (right-continuous evaluation at dyadic
points). Each v(t) is finally divided by its sum, since the integer translates
of phi form a partition of unity.
"""
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Tuple, Union

import numpy as np
import pywt

from waveletls.utils.errors import (
    DomainError,
    NumericError,
    RegistryError,
    TranslateIndexError,
)

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

DEFAULT_DEPTH = 53
SUM_TOLERANCE = 1e-12
ORTHONORMALITY_TOLERANCE = 1e-10

# registry name -> (PyWavelets table name, vanishing moments of the wavelet)
FILTER_REGISTRY: Dict[str, Tuple[str, int]] = {
    "haar": ("haar", 1),
    "db4tap": ("db2", 2),
    "coif24tap": ("coif4", 8),
}


@dataclass(frozen=True, eq=False)
class WaveletFilter:
    """Orthonormal scaling filter h with its metadata."""

    name: str
    h: np.ndarray = field(repr=False)
    vanishing_moments: int

    @property
    def length(self) -> int:
        return int(self.h.size)

    @property
    def support(self) -> Tuple[int, int]:
        return 0, self.length - 1


def check_filter(h: np.ndarray, name: str = "filter") -> None:
    """
    Verify the normalization and orthonormality conditions of a scaling filter.

    Args:
        h (np.ndarray): Filter coefficients h_0..h_{L-1}
        name (str): Name used in error messages

    Raises:
        RegistryError: If the coefficients violate an invariant
    """
    h = np.asarray(h, dtype=float)
    if h.ndim != 1 or h.size < 2 or h.size % 2:
        raise RegistryError(f"{name}: filter length must be even and >= 2, got {h.size}")

    if abs(h.sum() - np.sqrt(2.0)) > SUM_TOLERANCE:
        raise RegistryError(f"{name}: coefficients sum to {h.sum()!r}, expected sqrt(2)")

    length = h.size
    for m in range(length // 2):
        overlap = float(np.dot(h[: length - 2 * m], h[2 * m :]))
        expected = 1.0 if m == 0 else 0.0
        if abs(overlap - expected) > ORTHONORMALITY_TOLERANCE:
            raise RegistryError(
                f"{name}: sum_k h_k h_(k+{2 * m}) = {overlap!r}, expected {expected}"
            )


@lru_cache(maxsize=None)
def make_filter(name: str) -> WaveletFilter:
    """
    Look up a filter in the registry of standard coefficient tables.

    Args:
        name (str): One of FILTER_REGISTRY (haar, db4tap, coif24tap)

    Returns:
        WaveletFilter: Filter that passed the invariant checks
    """
    try:
        table_name, vanishing_moments = FILTER_REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(FILTER_REGISTRY))
        raise RegistryError(f"unknown wavelet filter {name!r} (known: {known})")

    h = np.array(pywt.Wavelet(table_name).rec_lo, dtype=float)
    check_filter(h, name)
    h.setflags(write=False)
    return WaveletFilter(name=name, h=h, vanishing_moments=vanishing_moments)


def _integer_values(t0: np.ndarray) -> np.ndarray:
    """Solve (T0 - I) v = 0 with sum(v) = 1 for the integer samples of phi."""
    size = t0.shape[0]
    system = np.vstack([t0 - np.eye(size), np.ones((1, size))])
    rhs = np.zeros(size + 1)
    rhs[-1] = 1.0
    values, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    residual = np.abs(system @ values - rhs).max()
    if residual > 1e-10:
        raise NumericError(f"no unit-sum fixed point of T0 (residual {residual:.3e})")
    return values


def _step(t0: np.ndarray, t1: np.ndarray, digits: np.ndarray, values: np.ndarray) -> np.ndarray:
    """
    T_d @ v for every column, with d the column's digit, summed in a fixed order.

    Each output column depends only on its own input column, so a point
    evaluates to the same bits alone or inside a batch.
    """
    result = np.zeros_like(values)
    for j in range(values.shape[0]):
        result += np.where(digits, t1[:, j : j + 1], t0[:, j : j + 1]) * values[j]
    return result


class ScalingEvaluator:
    """
    Precomputed Daubechies-Lagarias matrices for one filter.

    Instances are immutable after construction and can be shared between
    threads.
    """

    def __init__(self, wavelet_filter: WaveletFilter, depth: int = DEFAULT_DEPTH):
        if depth < 1:
            raise DomainError(f"depth must be a positive number of digits, got {depth}")

        self.filter = wavelet_filter
        self.depth = int(depth)

        h = wavelet_filter.h
        size = wavelet_filter.length - 1
        root2 = np.sqrt(2.0)

        def entry(index: int) -> float:
            return root2 * h[index] if 0 <= index < h.size else 0.0

        i, j = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
        self.T0 = np.vectorize(entry, otypes=[float])(2 * i - j)
        self.T1 = np.vectorize(entry, otypes=[float])(2 * i + 1 - j)
        self.integer_values = _integer_values(self.T0)

        for matrix in (self.T0, self.T1, self.integer_values):
            matrix.setflags(write=False)

    @property
    def size(self) -> int:
        """Number of integer translates overlapping a unit interval (L - 1)."""
        return self.T0.shape[0]

    def __repr__(self) -> str:
        return f"ScalingEvaluator(filter={self.filter.name!r}, depth={self.depth})"

    def _digits(self, t: np.ndarray) -> np.ndarray:
        """Leading `depth` binary digits of each t in [0, 1)."""
        digits = np.empty((self.depth, t.size), dtype=bool)
        rest = t.copy()
        for position in range(self.depth):
            rest = 2.0 * rest
            digits[position] = rest >= 1.0
            rest = rest - digits[position]
        return digits

    def translates(self, t: ArrayLike) -> np.ndarray:
        """
        Evaluate v(t) = (phi(t), ..., phi(t + L - 2)) for fractional parts t.

        Args:
            t (ArrayLike): Values in [0, 1)

        Returns:
            np.ndarray: Array of shape (len(t), L - 1)
        """
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if t.size and (t.min() < 0.0 or t.max() >= 1.0):
            raise DomainError("fractional parts must lie in [0, 1)")

        digits = self._digits(t)
        values = np.repeat(self.integer_values[:, None], t.size, axis=1)
        for position in range(self.depth - 1, -1, -1):
            values = _step(self.T0, self.T1, digits[position], values)
        # sum_k phi(t + k) = 1
        total = np.zeros(t.size)
        for row in values:
            total += row
        values = values / total
        return values.T

    def product(self, t: float) -> np.ndarray:
        """
        Raw Daubechies-Lagarias product T_{d_1} ... T_{d_depth} for one t.

        All columns converge to v(t); `column_spread` reports how far apart
        they still are.
        """
        digits = self._digits(np.array([float(t)]))[:, 0]
        result = np.eye(self.size)
        for digit in digits:
            result = result @ (self.T1 if digit else self.T0)
        return result

    def column_spread(self, x: float) -> float:
        """Largest row-wise spread across the columns of the product at x."""
        if not np.isfinite(x):
            raise DomainError(f"cannot evaluate phi at non-finite x={x!r}")
        t = float(x) - np.floor(x)
        matrix = self.product(t)
        return float(np.max(matrix.max(axis=1) - matrix.min(axis=1)))


@lru_cache(maxsize=None)
def get_evaluator(filter_name: str, depth: int = DEFAULT_DEPTH) -> ScalingEvaluator:
    """Shared evaluator for a registry filter and depth."""
    return ScalingEvaluator(make_filter(filter_name), depth=depth)


def eval_phi(ev: ScalingEvaluator, x: ArrayLike) -> ArrayLike:
    """
    Evaluate the scaling function phi at arbitrary real points.

    Args:
        ev (ScalingEvaluator): Evaluator for the filter
        x (ArrayLike): Scalar or array of points

    Returns:
        ArrayLike: phi(x), exactly 0 outside [0, L - 1]
    """
    scalar = np.ndim(x) == 0
    points = np.atleast_1d(np.asarray(x, dtype=float))
    if not np.all(np.isfinite(points)):
        raise DomainError("cannot evaluate phi at non-finite points")

    whole = np.floor(points)
    inside = (whole >= 0) & (whole <= ev.size - 1)
    result = np.zeros_like(points)
    if np.any(inside):
        frac = points[inside] - whole[inside]
        values = ev.translates(frac)
        result[inside] = values[np.arange(values.shape[0]), whole[inside].astype(int)]

    return float(result[0]) if scalar else result


def periodized_block(ev: ScalingEvaluator, J: int, x: ArrayLike) -> np.ndarray:
    """
    Evaluate all periodized scaling functions of level J at points of [0, 1].

    Entry (i, k) is phi^per_{J,k}(x_i) = 2^{J/2} sum_l phi(2^J (x_i - l) - k).
    With y = 2^J x = m + t, every translate phi(t + j), j = 0..L-2, lands on
    k = (m - j) mod 2^J, so one Daubechies-Lagarias evaluation per point fills
    the whole row.

    Args:
        ev (ScalingEvaluator): Evaluator for the filter
        J (int): Resolution level, J >= 0
        x (ArrayLike): Points in [0, 1]

    Returns:
        np.ndarray: Array of shape (len(x), 2**J)
    """
    if J < 0:
        raise DomainError(f"resolution level must be non-negative, got {J}")
    points = np.atleast_1d(np.asarray(x, dtype=float))
    if not np.all(np.isfinite(points)):
        raise DomainError("periodized scaling functions need finite points")
    if points.size and (points.min() < 0.0 or points.max() > 1.0):
        raise DomainError("periodized scaling functions are evaluated on [0, 1] only")

    width = 2**J
    scaled = points * width
    whole = np.floor(scaled)
    values = ev.translates(scaled - whole)

    columns = (whole.astype(np.int64)[:, None] - np.arange(ev.size)[None, :]) % width
    rows = np.repeat(np.arange(points.size), ev.size)
    block = np.zeros((points.size, width))
    np.add.at(block, (rows, columns.ravel()), values.ravel())
    return np.sqrt(width) * block


def eval_phi_periodized(ev: ScalingEvaluator, J: int, k: int, x: ArrayLike) -> ArrayLike:
    """
    Evaluate phi^per_{J,k} at points of [0, 1].

    Args:
        ev (ScalingEvaluator): Evaluator for the filter
        J (int): Resolution level
        k (int): Translate, 0 <= k <= 2**J - 1
        x (ArrayLike): Scalar or array of points in [0, 1]

    Returns:
        ArrayLike: Function values
    """
    if not 0 <= k < 2**J:
        raise TranslateIndexError(f"translate k={k} outside 0..{2**J - 1} for level J={J}")
    scalar = np.ndim(x) == 0
    column = periodized_block(ev, J, x)[:, k]
    return float(column[0]) if scalar else column
