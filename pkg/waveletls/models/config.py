"""
Validated configuration models.

Every computation takes one of these models; unknown keys and out-of-range
values are rejected before any work starts.
"""
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from waveletls.core.wavelet import DEFAULT_DEPTH, FILTER_REGISTRY
from waveletls.utils.errors import ConfigError

SigmaMethod = Literal["sample_sd", "mad_detail"]
DesignName = Literal["uniform", "beta_3half"]
Subcommand = Literal["fit", "predict", "simulate", "evaluate", "components", "config"]
Protocol = Literal["cv", "holdout"]

BASELINE_INDICES: Tuple[int, ...] = tuple(range(1, 10))


def _check_filter_name(name: str) -> str:
    if name not in FILTER_REGISTRY:
        known = ", ".join(sorted(FILTER_REGISTRY))
        raise ValueError(f"unknown wavelet filter {name!r} (known: {known})")
    return name


class FitConfig(BaseModel):
    """Settings of one additive-model fit."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    filter_name: str = "coif24tap"
    J_override: Optional[int] = Field(default=None, ge=0, le=30)
    beta_override: Optional[float] = Field(default=None, gt=0)
    sigma_method: SigmaMethod = "mad_detail"
    ridge_lambda: Optional[float] = Field(default=None, ge=0)
    quantile_coverage: Optional[float] = Field(default=None, gt=0, le=1)
    unit_box: bool = False
    depth: int = Field(default=DEFAULT_DEPTH, ge=1, le=1100)
    rank_tolerance: Optional[float] = Field(default=None, ge=0)

    @field_validator("filter_name")
    @classmethod
    def check_filter(cls, value: str) -> str:
        return _check_filter_name(value)


class SimulationScenario(BaseModel):
    """One cell of the Monte-Carlo study: design, noise, size, filter, seed."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    design: DesignName = "uniform"
    sigma2: float = Field(default=0.25, ge=0)
    n: int = Field(default=1024, ge=8)
    filter_name: str = "coif24tap"
    replications: int = Field(default=25, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    functions: Tuple[int, ...] = BASELINE_INDICES
    J_override: Optional[int] = Field(default=None, ge=0, le=30)
    sigma_method: SigmaMethod = "mad_detail"
    depth: int = Field(default=DEFAULT_DEPTH, ge=1, le=1100)

    @field_validator("filter_name")
    @classmethod
    def check_filter(cls, value: str) -> str:
        return _check_filter_name(value)

    @field_validator("functions")
    @classmethod
    def check_functions(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        if not value:
            raise ValueError("at least one baseline function is required")
        unknown = [i for i in value if i not in BASELINE_INDICES]
        if unknown:
            raise ValueError(f"baseline functions are numbered 1..9, got {unknown}")
        return tuple(value)

    @property
    def p(self) -> int:
        return len(self.functions)

    def fit_config(self) -> FitConfig:
        """Fit settings used for every replication of this scenario."""
        return FitConfig(
            filter_name=self.filter_name,
            J_override=self.J_override,
            sigma_method=self.sigma_method,
            unit_box=True,
            depth=self.depth,
        )


class RunConfig(BaseModel):
    """Fully merged settings of one CLI invocation."""

    model_config = ConfigDict(extra="forbid", frozen=True, protected_namespaces=())

    subcommand: Subcommand
    input_path: Optional[str] = None
    output_path: Optional[str] = None
    model_path: Optional[str] = None

    filter_name: str = "coif24tap"
    J_override: Optional[int] = Field(default=None, ge=0, le=30)
    beta_override: Optional[float] = Field(default=None, gt=0)
    sigma_method: SigmaMethod = "mad_detail"
    ridge_lambda: Optional[float] = Field(default=None, ge=0)
    quantile_coverage: Optional[float] = Field(default=None, gt=0, le=1)
    depth: int = Field(default=DEFAULT_DEPTH, ge=1, le=1100)
    strict: bool = False
    beta_grid: List[float] = Field(default_factory=list)
    beta_folds: int = Field(default=5, ge=2)

    target: Optional[str] = None
    features: List[str] = Field(default_factory=list)

    seed: int = Field(default=0, ge=0, lt=2**64)
    replications: int = Field(default=25, ge=1)
    n_grid: List[int] = Field(default_factory=lambda: [1024])
    sigma2_list: List[float] = Field(default_factory=lambda: [0.25])
    designs: List[DesignName] = Field(default_factory=lambda: ["uniform"])
    filters: List[str] = Field(default_factory=lambda: ["coif24tap"])
    functions: Tuple[int, ...] = BASELINE_INDICES
    gamma: Optional[float] = Field(default=None, gt=0)

    folds: int = Field(default=2, ge=2)
    repetitions: int = Field(default=10, ge=1)
    train_fraction: float = Field(default=0.85, gt=0, lt=1)
    protocol: Protocol = "cv"

    threads: int = Field(default=1, ge=1)
    pretty: bool = False
    grid_points: int = Field(default=1025, ge=2)

    @field_validator("filter_name")
    @classmethod
    def check_filter(cls, value: str) -> str:
        return _check_filter_name(value)

    @field_validator("filters")
    @classmethod
    def check_filters(cls, value: List[str]) -> List[str]:
        for name in value:
            _check_filter_name(name)
        return value

    @field_validator("n_grid")
    @classmethod
    def check_n_grid(cls, value: List[int]) -> List[int]:
        if not value or min(value) < 8:
            raise ValueError("sample sizes must be at least 8")
        return value

    @field_validator("beta_grid")
    @classmethod
    def check_beta_grid(cls, value: List[float]) -> List[float]:
        if any(not beta > 0 for beta in value):
            raise ValueError("beta candidates must be positive")
        return value

    @field_validator("sigma2_list")
    @classmethod
    def check_sigma2(cls, value: List[float]) -> List[float]:
        if not value or min(value) < 0:
            raise ValueError("noise variances must be non-negative")
        return value

    def fit_config(self) -> FitConfig:
        """Fit settings derived from this run."""
        return FitConfig(
            filter_name=self.filter_name,
            J_override=self.J_override,
            beta_override=self.beta_override,
            sigma_method=self.sigma_method,
            ridge_lambda=self.ridge_lambda,
            quantile_coverage=self.quantile_coverage,
            depth=self.depth,
        )

    def scenarios(self) -> List[SimulationScenario]:
        """Every (design, filter, sigma2, n) cell of the simulation grid."""
        return [
            SimulationScenario(
                design=design,
                sigma2=sigma2,
                n=n,
                filter_name=filter_name,
                replications=self.replications,
                seed=self.seed,
                functions=self.functions,
                J_override=self.J_override,
                sigma_method=self.sigma_method,
                depth=self.depth,
            )
            for design in self.designs
            for filter_name in self.filters
            for sigma2 in self.sigma2_list
            for n in self.n_grid
        ]


def validate_model(model_cls, values: dict):
    """
    Build a configuration model, turning validation failures into ConfigError.

    Args:
        model_cls: FitConfig, SimulationScenario or RunConfig
        values (dict): Raw settings

    Returns:
        The validated model instance
    """
    try:
        return model_cls(**values)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(part) for part in err['loc']) or 'config'}: {err['msg']}"
            for err in e.errors()
        )
        raise ConfigError(f"invalid configuration: {problems}")
