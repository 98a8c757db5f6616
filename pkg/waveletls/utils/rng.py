"""
Seeded random streams for reproducible simulations and data splits.

All randomness goes through numpy Generators backed by the counter-based
Philox bit generator. Independent substreams are derived from
(seed, stream index) with SeedSequence spawn keys, so a replication draws the
same numbers whether it runs serially or on a worker thread.
"""
import os
from typing import Optional

import numpy as np

from waveletls.utils.errors import ConfigError, DomainError

SEED_ENV_VAR = "WAVELETLS_SEED"
DEFAULT_SEED = 20240101


def default_seed() -> int:
    """
    Seed used when neither a flag nor a config file provides one.

    Returns:
        int: Value of WAVELETLS_SEED if set, else DEFAULT_SEED
    """
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None or raw.strip() == "":
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}")


def make_rng(seed: int, stream: Optional[int] = None) -> np.random.Generator:
    """
    Create a Philox-backed generator.

    Args:
        seed (int): Non-negative 64-bit seed
        stream (Optional[int]): Substream index (e.g. replication number)

    Returns:
        np.random.Generator: Independent generator for (seed, stream)
    """
    if seed < 0 or seed >= 2**64:
        raise ConfigError(f"seed must be a non-negative 64-bit integer, got {seed}")
    spawn_key = () if stream is None else (int(stream),)
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=spawn_key)
    return np.random.Generator(np.random.Philox(sequence))


def shuffled_indices(n: int, rng: np.random.Generator) -> np.ndarray:
    """Fisher-Yates permutation of range(n) drawn from rng."""
    return rng.permutation(n)


def fold_assignments(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """
    Assign each of n rows to one of k folds after a seeded shuffle.

    Fold sizes differ by at most one row.

    Args:
        n (int): Number of rows
        k (int): Number of folds
        rng (np.random.Generator): Random source

    Returns:
        np.ndarray: Integer fold label per row, in row order
    """
    if k < 2:
        raise DomainError(f"need at least 2 folds, got {k}")
    if k > n:
        raise DomainError(f"cannot split {n} rows into {k} folds")
    order = shuffled_indices(n, rng)
    folds = np.empty(n, dtype=int)
    folds[order] = np.arange(n) % k
    return folds
