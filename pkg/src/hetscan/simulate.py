"""Seeded data generator with ground-truth bookkeeping for benchmarks.

The generative process draws, in a fixed order from one seeded stream:

    x_id ~ Normal(0, 1)
    b_d ~ Normal(slope_mean, slope_var),  a ~ Normal(intercept_mean, intercept_var)
    z_d ~ Bernoulli(1 - sparsity)
    g_ik ~ DiscreteUniform(1, L)
    b_lkd ~ Normal(group_slope_mean, group_slope_var)
    a_lk ~ Normal(group_intercept_mean, group_intercept_var)
    mu_i = a + sum_d z_d b_d x_id
             + sum_k [ a_{g_ik,k} + sum_d z_d b_{g_ik,k,d} x_id ]

Gaussian responses add Normal(0, phi^2) noise with phi = sd(mu) / snr;
Bernoulli responses are Bernoulli(Phi(mu / c)) with c = sd(mu), which keeps
the classes overlapping at any signal strength.

A predictor d is heterogeneous (a positive for ROC scoring) in every
grouping exactly when z_d = 1, since active predictors receive sampled
group slopes in all groupings.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .data import BERNOULLI, FAMILIES, GAUSSIAN, Dataset, encode_groups
from .heterogeneity import Selection

FAMILY_DEFAULTS = {
    GAUSSIAN: {
        "slope_mean": 5.0,
        "slope_var": 10.0,
        "intercept_mean": 0.0,
        "intercept_var": 20.0,
        "group_slope_mean": 0.0,
        "group_slope_var": 5.0,
        "group_intercept_mean": 0.0,
        "group_intercept_var": 5.0,
    },
    BERNOULLI: {
        "slope_mean": 0.0,
        "slope_var": 2.0,
        "intercept_mean": 0.0,
        "intercept_var": 4.0,
        "group_slope_mean": 0.0,
        "group_slope_var": 3.0,
        "group_intercept_mean": 0.0,
        "group_intercept_var": 3.0,
    },
}


@dataclass(frozen=True)
class SimConfig:
    """Generator settings; family parameters default per family when None."""

    family: str = GAUSSIAN
    n_obs: int = 300
    n_predictors: int = 5
    n_groupings: int = 1
    n_levels: int = 5
    sparsity: float = 0.4
    snr: float = 3.0
    seed: int = 0
    slope_mean: float | None = None
    slope_var: float | None = None
    intercept_mean: float | None = None
    intercept_var: float | None = None
    group_slope_mean: float | None = None
    group_slope_var: float | None = None
    group_intercept_mean: float | None = None
    group_intercept_var: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if min(self.n_obs, self.n_predictors, self.n_groupings) < 1:
            raise ValueError("n_obs, n_predictors and n_groupings must be >= 1")
        if self.n_levels < 2:
            raise ValueError("n_levels must be >= 2")
        if not (0.0 <= self.sparsity <= 1.0):
            raise ValueError("sparsity must lie in [0, 1]")
        if self.snr <= 0.0:
            raise ValueError("snr must be positive")
        defaults = FAMILY_DEFAULTS[self.family]
        for name, value in defaults.items():
            if getattr(self, name) is None:
                object.__setattr__(self, name, value)
        for name in defaults:
            if name.endswith("_var") and getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be nonnegative")


@dataclass(frozen=True)
class GroundTruth:
    """Sampled coefficients behind one generated dataset.

    ``group_intercepts``/``group_slopes`` are indexed by the sampled level
    values (1..L), which may differ from the dataset's first-appearance
    level codes; ROC scoring uses only ``z``.
    """

    z: np.ndarray
    a: float
    b: np.ndarray
    group_intercepts: np.ndarray
    group_slopes: np.ndarray
    mu: np.ndarray
    noise_sd: float | None
    latent_scale: float | None


def _dispersion_scale(mu: np.ndarray) -> float:
    sd = float(mu.std(ddof=1)) if mu.size > 1 else 0.0
    return sd if np.isfinite(sd) and sd > 0.0 else 1.0


def generate(cfg: SimConfig) -> tuple[Dataset, GroundTruth]:
    """Sample one dataset and its ground truth; bitwise-reproducible by seed."""
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    n, d_num, k_grp, levels = cfg.n_obs, cfg.n_predictors, cfg.n_groupings, cfg.n_levels

    x = rng.normal(0.0, 1.0, size=(n, d_num))
    b = rng.normal(cfg.slope_mean, np.sqrt(cfg.slope_var), size=d_num)
    a = float(rng.normal(cfg.intercept_mean, np.sqrt(cfg.intercept_var)))
    z = (rng.random(d_num) < 1.0 - cfg.sparsity).astype(float)
    g = rng.integers(1, levels + 1, size=(n, k_grp))
    group_slopes = rng.normal(
        cfg.group_slope_mean, np.sqrt(cfg.group_slope_var), size=(levels, k_grp, d_num)
    )
    group_intercepts = rng.normal(
        cfg.group_intercept_mean, np.sqrt(cfg.group_intercept_var), size=(levels, k_grp)
    )

    xz = x * z
    mu = a + x @ (z * b)
    for k in range(k_grp):
        lev = g[:, k] - 1
        mu = mu + group_intercepts[lev, k] + np.sum(group_slopes[lev, k, :] * xz, axis=1)

    noise_sd = None
    latent_scale = None
    if cfg.family == GAUSSIAN:
        noise_sd = _dispersion_scale(mu) / cfg.snr
        y = mu + noise_sd * rng.standard_normal(n)
    else:
        latent_scale = _dispersion_scale(mu)
        y = (rng.random(n) < ndtr(mu / latent_scale)).astype(float)

    # Sampled level values may skip a code at small N; re-code each column by
    # first appearance so the Dataset invariant holds, keeping the sampled
    # values as labels.
    codes = np.empty_like(g)
    level_labels = []
    for k in range(k_grp):
        codes[:, k], label_map = encode_groups(g[:, k].tolist())
        level_labels.append(tuple(str(lab) for lab in label_map))

    dataset = Dataset(
        x=x,
        groups=codes,
        y=y,
        family=cfg.family,
        predictor_names=tuple(f"x{d + 1}" for d in range(d_num)),
        grouping_names=tuple(f"g{k + 1}" for k in range(k_grp)),
        response_name="y",
        level_labels=tuple(level_labels),
    )
    truth = GroundTruth(
        z=z,
        a=a,
        b=b,
        group_intercepts=group_intercepts,
        group_slopes=group_slopes,
        mu=mu,
        noise_sd=noise_sd,
        latent_scale=latent_scale,
    )
    return dataset, truth


def score_selection(selection: Selection, truth: GroundTruth) -> tuple[float, float]:
    """True/false positive rates of a selection against the activity mask.

    A pair (d, k) is positive iff z_d = 1.  Degenerate denominators (no
    positives or no negatives) yield rate 0.
    """
    d_num = truth.z.size
    k_grp = truth.group_intercepts.shape[1]
    if len(selection.selected) != k_grp:
        raise ValueError("selection and truth disagree on the number of groupings")
    active = truth.z > 0.0
    n_pos = int(np.sum(active)) * k_grp
    n_neg = (d_num - int(np.sum(active))) * k_grp
    tp = fp = 0
    for chosen in selection.selected:
        for d in chosen:
            if not (0 <= d < d_num):
                raise ValueError(f"predictor index {d} out of range")
            if active[d]:
                tp += 1
            else:
                fp += 1
    tpr = tp / n_pos if n_pos else 0.0
    fpr = fp / n_neg if n_neg else 0.0
    return tpr, fpr
