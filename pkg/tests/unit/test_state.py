import numpy as np
import pytest
import yaml

from waveletls.core.model import fit, predict
from waveletls.models.config import FitConfig
from waveletls.utils.errors import ConfigError, DataError, ModelVersionError
from waveletls.utils.state import from_document, load_model, save_model, to_document


@pytest.fixture
def model(rng):
    X = rng.random((300, 2))
    Y = np.sin(2 * np.pi * X[:, 0]) + X[:, 1] ** 2 + 0.2 * rng.standard_normal(300)
    return fit(X, Y, FitConfig(filter_name="db4tap"))


def test_round_trip_predicts_bit_for_bit(model, rng, tmp_path):
    path = str(tmp_path / "model.yaml")
    save_model(model, path)
    loaded = load_model(path)

    np.testing.assert_array_equal(loaded.c_star, model.c_star)
    np.testing.assert_array_equal(loaded.x_min, model.x_min)
    np.testing.assert_array_equal(loaded.x_max, model.x_max)
    assert (loaded.y_mean, loaded.y_std, loaded.beta_n) == (model.y_mean, model.y_std, model.beta_n)
    assert loaded.diagnostics == model.diagnostics

    X_new = rng.uniform(-0.1, 1.1, size=(100, 2))
    np.testing.assert_array_equal(predict(loaded, X_new), predict(model, X_new))


def test_quantile_bounds_survive(rng, tmp_path):
    X = rng.random((500, 1))
    m = fit(X, X[:, 0] ** 2 + 0.1 * rng.standard_normal(500), FitConfig(quantile_coverage=0.9))
    path = str(tmp_path / "q.yaml")
    save_model(m, path)
    np.testing.assert_array_equal(load_model(path).quantile_bounds, m.quantile_bounds)


def test_document_layout(model, tmp_path):
    path = tmp_path / "model.yaml"
    save_model(model, str(path))
    raw = yaml.safe_load(path.read_text())
    assert raw["schema"] == "waveletls-model"
    assert raw["version"] == 1
    assert raw["J"] == model.J
    assert len(raw["c_star"]) == model.p * 2**model.J


def test_no_temporary_files_left(model, tmp_path):
    save_model(model, str(tmp_path / "model.yaml"))
    assert sorted(p.name for p in tmp_path.iterdir()) == ["model.yaml"]


def test_version_mismatch(model, tmp_path):
    raw = to_document(model)
    raw["version"] = 99
    path = tmp_path / "future.yaml"
    path.write_text(yaml.safe_dump(raw))
    with pytest.raises(ModelVersionError):
        load_model(str(path))


def test_corrupt_file(tmp_path):
    path = tmp_path / "broken.yaml"
    path.write_text("schema: [unclosed\n  version: 1: 2\n")
    with pytest.raises(DataError):
        load_model(str(path))


def test_wrong_schema(tmp_path):
    path = tmp_path / "other.yaml"
    path.write_text("schema: something-else\nversion: 1\n")
    with pytest.raises(DataError, match="not a waveletls model"):
        load_model(str(path))


def test_invalid_fields(model):
    raw = to_document(model)
    raw["y_std"] = -1.0
    with pytest.raises(DataError):
        from_document(raw)

    raw = to_document(model)
    raw["c_star"] = raw["c_star"][:-1]
    with pytest.raises(DataError):
        from_document(raw)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_model(str(tmp_path / "absent.yaml"))
