import logging

import numpy as np
import pytest
from rich.table import Table

from waveletls.utils.errors import (
    ConfigError,
    DataError,
    DimensionError,
    DomainError,
    NumericError,
    PredictorIndexError,
    RegistryError,
    TranslateIndexError,
    WaveletLSError,
)
from waveletls.utils.helpers import (
    empirical_quantile_box,
    ensure_finite,
    inside_box,
    render_table,
    rmse,
    setup_logging,
    truncate,
)
from waveletls.utils.rng import DEFAULT_SEED, SEED_ENV_VAR, default_seed, fold_assignments, make_rng


class TestTruncate:
    def test_identity_inside(self, rng):
        values = rng.uniform(-2.0, 2.0, 100)
        np.testing.assert_array_equal(truncate(values, 2.0), values)

    def test_clamps_outside(self):
        np.testing.assert_array_equal(truncate(np.array([-5.0, 0.5, 7.0]), 1.0), [-1.0, 0.5, 1.0])

    def test_threshold_must_be_positive(self):
        with pytest.raises(DomainError):
            truncate(np.zeros(3), 0.0)


class TestNumeric:
    def test_ensure_finite(self):
        assert ensure_finite([1, 2], "x").dtype == float
        with pytest.raises(NumericError, match="2 non-finite"):
            ensure_finite([np.nan, np.inf, 1.0], "x")

    def test_rmse(self):
        assert rmse(np.array([1.0, 3.0]), np.array([1.0, 1.0])) == pytest.approx(np.sqrt(2.0))
        with pytest.raises(DomainError):
            rmse(np.zeros(2), np.zeros(3))

    def test_quantile_box(self):
        X = np.arange(101, dtype=float)[:, None]
        np.testing.assert_allclose(empirical_quantile_box(X, 0.9), [[5.0, 95.0]])
        mask = inside_box(X, np.array([[5.0, 95.0]]))
        assert mask.sum() == 91

    @pytest.mark.parametrize("coverage", [0.0, 1.5])
    def test_quantile_box_coverage(self, coverage):
        with pytest.raises(DomainError):
            empirical_quantile_box(np.zeros((3, 1)), coverage)

    def test_render_table(self):
        table = render_table("RMSE", ["n", "rmse"], [(256, 0.123456789)])
        assert isinstance(table, Table)
        assert table.row_count == 1


def test_setup_logging_writes_file(tmp_path):
    log_file = tmp_path / "logs" / "run.log"
    setup_logging("DEBUG", str(log_file))
    logging.getLogger("waveletls.test").debug("hello from the test")
    for handler in logging.getLogger().handlers:
        handler.flush()
    assert "hello from the test" in log_file.read_text()
    setup_logging("WARNING")
    assert logging.getLogger().level == logging.WARNING


class TestErrors:
    def test_exit_codes(self):
        assert ConfigError("x").exit_code == 2
        assert DataError("x").exit_code == 3
        assert DimensionError("x").exit_code == 3
        assert NumericError("x").exit_code == 4
        assert WaveletLSError("x").exit_code == 1

    def test_index_errors(self):
        assert issubclass(TranslateIndexError, IndexError)
        assert issubclass(PredictorIndexError, DomainError)

    def test_registry_error_message(self):
        error = RegistryError("unknown wavelet filter 'x'")
        assert str(error) == "unknown wavelet filter 'x'"
        assert isinstance(error, KeyError) and error.exit_code == 2


class TestRandomStreams:
    def test_same_seed_same_stream(self):
        np.testing.assert_array_equal(make_rng(5, 3).random(10), make_rng(5, 3).random(10))

    def test_streams_differ(self):
        assert not np.array_equal(make_rng(5, 0).random(10), make_rng(5, 1).random(10))
        assert not np.array_equal(make_rng(5).random(10), make_rng(6).random(10))

    def test_negative_seed(self):
        with pytest.raises(ConfigError):
            make_rng(-1)

    def test_default_seed_from_environment(self, monkeypatch):
        monkeypatch.delenv(SEED_ENV_VAR, raising=False)
        assert default_seed() == DEFAULT_SEED
        monkeypatch.setenv(SEED_ENV_VAR, "42")
        assert default_seed() == 42
        monkeypatch.setenv(SEED_ENV_VAR, "forty-two")
        with pytest.raises(ConfigError):
            default_seed()

    def test_fold_assignments(self):
        labels = fold_assignments(10, 3, make_rng(1))
        assert sorted(np.bincount(labels)) == [3, 3, 4]
        with pytest.raises(DomainError):
            fold_assignments(10, 1, make_rng(1))
