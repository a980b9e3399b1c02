"""End-to-end heterogeneity assessment.

Fits the GP surrogate to a dataset, averages the pointwise KL sensitivity
measures over the training points, ranks predictor x grouping interactions,
applies the top-T selection rule, and emits a recommended multilevel model
formula.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import BERNOULLI, GAUSSIAN, Dataset, standardize
from .formula import build_formula, parse_formula  # noqa: F401  (parse re-exported)
from .gp import (
    fit_exact,
    fit_laplace,
    predict_exact_with_derivatives,
    predict_laplace_with_derivatives,
)
from .kernel import Hyperparameters
from .sensitivity import kl_diff, kl_diff2
from .tuning import OptConfig, optimize


@dataclass(frozen=True)
class HeterogeneityReport:
    """Averaged sensitivity measures for one dataset.

    ``slope_matrix[d, k]`` is the mean over training points of the
    interaction strength between predictor d and grouping k;
    ``intercept_vector[k]`` the mean varying-intercept strength of grouping
    k; ``grouping_totals`` the column sums of the slope matrix.
    """

    slope_matrix: np.ndarray
    intercept_vector: np.ndarray
    grouping_totals: np.ndarray
    hyperparameters: Hyperparameters
    predictor_names: tuple[str, ...]
    grouping_names: tuple[str, ...]
    response_name: str
    family: str
    n_obs: int

    def __post_init__(self):
        for name in ("slope_matrix", "intercept_vector", "grouping_totals"):
            arr = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, arr)
            if not np.all(np.isfinite(arr)) or np.any(arr < 0.0):
                raise ValueError(f"{name} must be finite and nonnegative")


@dataclass(frozen=True)
class Selection:
    """Per-grouping selected predictor indices (ranked, strongest first)."""

    selected: tuple[tuple[int, ...], ...]
    threshold: float


def assess(
    dataset: Dataset,
    opt_cfg: OptConfig | None = None,
    hyperparameters: Hyperparameters | None = None,
) -> HeterogeneityReport:
    """Run the full pipeline on a dataset with at least one grouping.

    Regression responses are standardized internally, so reported values
    live on that scale.  ``hyperparameters`` skips the marginal-likelihood
    search and fits with the given values.
    """
    if dataset.n_groupings < 1:
        raise ValueError("assessment requires at least one grouping column")
    design, _ = standardize(dataset)
    n, d_num, k_grp = dataset.n_obs, dataset.n_predictors, dataset.n_groupings

    y = dataset.y
    if dataset.family == GAUSSIAN:
        sd = y.std(ddof=1) if n > 1 else 0.0
        if not np.isfinite(sd) or sd <= 0.0:
            raise ValueError("constant response")
        y = (y - y.mean()) / sd

    hyp = hyperparameters
    if hyp is None:
        hyp = optimize(design, y, dataset.family, opt_cfg or OptConfig())

    if dataset.family == GAUSSIAN:
        post = fit_exact(design, y, hyp)
        predict = predict_exact_with_derivatives
    else:
        post = fit_laplace(design, y, hyp)
        predict = predict_laplace_with_derivatives

    slope_sum = np.zeros((d_num, k_grp))
    intercept_sum = np.zeros(k_grp)
    for i in range(n):
        dist, derivs = predict(post, design.z[i])
        for k in range(k_grp):
            intercept_sum[k] += kl_diff(dist, derivs, d_num + k)
            for d in range(d_num):
                slope_sum[d, k] += kl_diff2(dist, derivs, d, d_num + k)

    slope_matrix = slope_sum / n
    return HeterogeneityReport(
        slope_matrix=slope_matrix,
        intercept_vector=intercept_sum / n,
        grouping_totals=slope_matrix.sum(axis=0),
        hyperparameters=hyp,
        predictor_names=dataset.predictor_names,
        grouping_names=dataset.grouping_names,
        response_name=dataset.response_name,
        family=dataset.family,
        n_obs=n,
    )


def select_top_t(report: HeterogeneityReport, t: float) -> Selection:
    """Keep the top T = floor(t D) interactions per grouping.

    Ranking is by slope_matrix column, ties broken toward the lower
    predictor index.  The floor gets a 1e-9 nudge so decimal thresholds
    like 0.29 * 100 do not lose a slot to float rounding.
    """
    if not (0.0 <= t <= 1.0):
        raise ValueError("threshold must lie in [0, 1]")
    d_num = report.slope_matrix.shape[0]
    top = int(np.floor(t * d_num + 1e-9))
    selected = []
    for k in range(report.slope_matrix.shape[1]):
        order = np.argsort(-report.slope_matrix[:, k], kind="stable")
        selected.append(tuple(int(d) for d in order[:top]))
    return Selection(selected=tuple(selected), threshold=t)


def choose_grouping(report: HeterogeneityReport) -> int:
    """Index of the grouping with the largest total interaction."""
    return int(np.argmax(report.grouping_totals))


def recommend_formula(schema, selection: Selection) -> str:
    """Formula string for a schema (anything with the three name attributes)."""
    return build_formula(
        schema.response_name,
        schema.predictor_names,
        schema.grouping_names,
        selection.selected,
    )


def report_to_dict(
    report: HeterogeneityReport, formula: str, threshold: float
) -> dict:
    """JSON-ready view of a report plus the selection outcome."""
    hyp = {
        "lengthscales": [float(v) for v in report.hyperparameters.lengthscales],
        "signal_variance": float(report.hyperparameters.signal_variance),
    }
    if report.hyperparameters.noise_variance is not None:
        hyp["noise_variance"] = float(report.hyperparameters.noise_variance)
    return {
        "predictors": list(report.predictor_names),
        "groupings": list(report.grouping_names),
        "slope_matrix": [[float(v) for v in row] for row in report.slope_matrix],
        "intercept_vector": [float(v) for v in report.intercept_vector],
        "grouping_totals": [float(v) for v in report.grouping_totals],
        "hyperparameters": hyp,
        "formula": formula,
        "threshold": float(threshold),
    }
