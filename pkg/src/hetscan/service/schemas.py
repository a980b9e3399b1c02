"""Request and response models for the HTTP service."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field

Family = Literal["gaussian", "bernoulli"]


class AssessRequest(BaseModel):
    csv_text: str
    response: str
    groups: list[str] = Field(min_length=1)
    family: Family
    threshold: float = Field(default=1.0, ge=0.0, le=1.0)
    seed: int = 0
    restarts: int = Field(default=5, ge=1)


class HyperparametersModel(BaseModel):
    lengthscales: list[float]
    signal_variance: float
    noise_variance: float | None = None


class AssessResponse(BaseModel):
    predictors: list[str]
    groupings: list[str]
    slope_matrix: list[list[float]]
    intercept_vector: list[float]
    grouping_totals: list[float]
    hyperparameters: HyperparametersModel
    formula: str
    threshold: float
    chosen_grouping: str
    seed: int
    config: dict


class SimulateRequest(BaseModel):
    seed: int
    family: Family = "gaussian"
    n_obs: int = Field(default=300, ge=1)
    n_predictors: int = Field(default=5, ge=1)
    n_groupings: int = Field(default=1, ge=1)
    n_levels: int = Field(default=5, ge=2)
    sparsity: float = Field(default=0.4, ge=0.0, le=1.0)
    snr: float = Field(default=3.0, gt=0.0)
    slope_mean: float | None = None
    slope_var: float | None = None
    intercept_mean: float | None = None
    intercept_var: float | None = None
    group_slope_mean: float | None = None
    group_slope_var: float | None = None
    group_intercept_mean: float | None = None
    group_intercept_var: float | None = None


class SimulateResponse(BaseModel):
    data_csv: str
    truth: dict


class BenchmarkRequest(BaseModel):
    reps: int = Field(ge=2)
    thresholds: list[float] = Field(min_length=1)
    seed: int = 0
    restarts: int = Field(default=5, ge=1)
    grid_text: str | None = None


class BenchmarkResponse(BaseModel):
    csv_text: str


class VerifyRequest(BaseModel):
    family: Family
    trials: int = Field(default=20, ge=1)
    seed: int = 0
    tol: float = Field(default=1e-3, gt=0.0)


class VerifyResponse(BaseModel):
    family: str
    trials: int
    tolerance: float
    errors: dict[str, float]
    passed: bool
    failing: list[str]
