"""
Schema of the model file written by save_model.
"""
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

MODEL_SCHEMA = "waveletls-model"
MODEL_SCHEMA_VERSION = 1


class DiagnosticsDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n_train: int = Field(ge=1)
    n_dropped: int = Field(ge=0)
    effective_rank: int = Field(ge=0)
    residual_norm: float = Field(ge=0)
    sigma_floored: bool


class ModelDocument(BaseModel):
    """One fitted additive model, as stored on disk."""

    model_config = ConfigDict(extra="forbid")

    schema_name: Literal["waveletls-model"] = Field(default=MODEL_SCHEMA, alias="schema")
    version: int
    filter_name: str
    J: int = Field(ge=0)
    p: int = Field(ge=1)
    depth: int = Field(ge=1)
    beta0: float
    y_mean: float
    y_std: float = Field(gt=0)
    beta_n: float = Field(gt=0)
    sigma_hat: float = Field(ge=0)
    x_min: List[float]
    x_max: List[float]
    quantile_bounds: Optional[List[List[float]]] = None
    c_star: List[float]
    diagnostics: Optional[DiagnosticsDocument] = None
