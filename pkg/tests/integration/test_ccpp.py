"""
Combined-cycle power plant benchmark.

Enabled by environment variables:
    WAVELETLS_CCPP_CSV     path of the CSV export (columns AT, V, AP, RH, PE)
    WAVELETLS_CCPP_TARGET  response column, default PE
"""
import os

import numpy as np
import pytest

from waveletls.core import dataio
from waveletls.models.config import FitConfig

CCPP_CSV = os.environ.get("WAVELETLS_CCPP_CSV")
CCPP_TARGET = os.environ.get("WAVELETLS_CCPP_TARGET", "PE")

pytestmark = [
    pytest.mark.ccpp,
    pytest.mark.skipif(not CCPP_CSV, reason="WAVELETLS_CCPP_CSV is not set"),
]


def test_two_fold_cv_rmse():
    data = dataio.load_csv(CCPP_CSV, target_column=CCPP_TARGET)
    assert data.p == 4
    scores = dataio.cv_experiment(data, FitConfig(filter_name="coif24tap"), folds=2, repetitions=10, seed=1)
    assert np.mean(scores) <= 5.0


def test_single_feature_is_worse():
    data = dataio.load_csv(CCPP_CSV, target_column=CCPP_TARGET)
    full = np.mean(dataio.cv_experiment(data, folds=2, repetitions=2, seed=1))
    only_at = dataio.select_features(data, ["AT"])
    single = np.mean(dataio.cv_experiment(only_at, folds=2, repetitions=2, seed=1))
    assert full < single
