"""
Persistence of fitted models.

Models are written as versioned YAML documents. Floats carry 17 significant
digits so that a saved model predicts bit-for-bit like the original. Writes go
to a temporary file first and are moved into place atomically.
"""
import logging
import os
import shutil
import tempfile
from typing import Any, Dict

import numpy as np
import yaml
from pydantic import ValidationError

from waveletls.core.model import FitDiagnostics, FittedAdditiveModel
from waveletls.models.document import MODEL_SCHEMA, MODEL_SCHEMA_VERSION, ModelDocument
from waveletls.utils.errors import ConfigError, DataError, ModelVersionError, WaveletLSError

logger = logging.getLogger(__name__)


class _ModelDumper(yaml.SafeDumper):
    pass


def _represent_float(dumper: yaml.SafeDumper, value: float) -> yaml.ScalarNode:
    if not np.isfinite(value):
        return dumper.represent_float(value)
    text = f"{value:.17g}"
    if "e" in text and "." not in text:
        mantissa, exponent = text.split("e")
        text = f"{mantissa}.0e{exponent}"
    elif "e" not in text and "." not in text:
        text += ".0"
    return dumper.represent_scalar("tag:yaml.org,2002:float", text)


_ModelDumper.add_representer(float, _represent_float)


def to_document(m: FittedAdditiveModel) -> Dict[str, Any]:
    """Plain mapping of every model field, in file order."""
    diagnostics = None
    if m.diagnostics is not None:
        d = m.diagnostics
        diagnostics = {
            "n_train": int(d.n_train),
            "n_dropped": int(d.n_dropped),
            "effective_rank": int(d.effective_rank),
            "residual_norm": float(d.residual_norm),
            "sigma_floored": bool(d.sigma_floored),
        }
    return {
        "schema": MODEL_SCHEMA,
        "version": MODEL_SCHEMA_VERSION,
        "filter_name": m.filter_name,
        "J": int(m.J),
        "p": int(m.p),
        "depth": int(m.depth),
        "beta0": float(m.beta0),
        "y_mean": float(m.y_mean),
        "y_std": float(m.y_std),
        "beta_n": float(m.beta_n),
        "sigma_hat": float(m.sigma_hat),
        "x_min": [float(v) for v in m.x_min],
        "x_max": [float(v) for v in m.x_max],
        "quantile_bounds": (
            None if m.quantile_bounds is None else [[float(v) for v in row] for row in m.quantile_bounds]
        ),
        "c_star": [float(v) for v in m.c_star],
        "diagnostics": diagnostics,
    }


def from_document(raw: Any, source: str = "model file") -> FittedAdditiveModel:
    """
    Rebuild a model from a parsed document.

    Args:
        raw (Any): Parsed YAML content
        source (str): Name used in error messages

    Returns:
        FittedAdditiveModel: The stored model
    """
    if not isinstance(raw, dict):
        raise DataError(f"{source} is not a model document")
    if raw.get("schema") != MODEL_SCHEMA:
        raise DataError(f"{source} is not a waveletls model (schema {raw.get('schema')!r})")
    if raw.get("version") != MODEL_SCHEMA_VERSION:
        raise ModelVersionError(
            f"{source} has schema version {raw.get('version')!r}; "
            f"this release reads version {MODEL_SCHEMA_VERSION}"
        )
    try:
        doc = ModelDocument.model_validate(raw)
    except ValidationError as e:
        raise DataError(f"{source} is corrupt: {e.error_count()} invalid field(s); {e.errors()[0]['msg']}")

    diagnostics = None
    if doc.diagnostics is not None:
        diagnostics = FitDiagnostics(**doc.diagnostics.model_dump())
    try:
        return FittedAdditiveModel(
            filter_name=doc.filter_name,
            J=doc.J,
            p=doc.p,
            c_star=np.array(doc.c_star, dtype=float),
            beta0=doc.beta0,
            y_mean=doc.y_mean,
            y_std=doc.y_std,
            x_min=np.array(doc.x_min, dtype=float),
            x_max=np.array(doc.x_max, dtype=float),
            beta_n=doc.beta_n,
            sigma_hat=doc.sigma_hat,
            quantile_bounds=None if doc.quantile_bounds is None else np.array(doc.quantile_bounds, dtype=float),
            depth=doc.depth,
            diagnostics=diagnostics,
        )
    except (WaveletLSError, ValueError) as e:
        raise DataError(f"{source} is inconsistent: {e}")


def save_model(m: FittedAdditiveModel, path: str) -> str:
    """
    Save a model with an atomic write operation.

    Args:
        m (FittedAdditiveModel): Model to save
        path (str): Destination file

    Returns:
        str: The path written
    """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, temp_path = tempfile.mkstemp(prefix=".model-", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            yaml.dump(to_document(m), f, Dumper=_ModelDumper, sort_keys=False, default_flow_style=None)
        shutil.move(temp_path, path)
    except OSError as e:
        if os.path.exists(temp_path):
            os.remove(temp_path)
        raise DataError(f"could not write model file {path}: {e}")
    logger.debug("Saved model (J=%d, p=%d) to %s", m.J, m.p, path)
    return path


def load_model(path: str) -> FittedAdditiveModel:
    """
    Load a model saved by save_model.

    Args:
        path (str): Model file

    Returns:
        FittedAdditiveModel: The stored model
    """
    if not os.path.exists(path):
        raise ConfigError(f"model file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = yaml.safe_load(f)
    except (yaml.YAMLError, UnicodeDecodeError) as e:
        raise DataError(f"model file {path} is not valid YAML: {e}")
    return from_document(raw, source=f"model file {path}")
