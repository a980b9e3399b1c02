"""Pointwise sensitivity measures built on KL-divergence curvature.

Perturbing a prediction point x* along column d changes the predictive
parameters theta*; the KL divergence between the perturbed and original
predictive distributions grows quadratically from its minimum at zero
perturbation.  kl_diff is the square root of that curvature and kl_diff2
the analogous interaction measure using cross second derivatives:

    kl_diff(d)     = sqrt( g^T H g ),      g_k = d theta_k / d x_d
    kl_diff2(d, e) = sqrt( 2 h^T H h ),    h_k = d^2 theta_k / (d x_d d x_e)

where H is the Hessian of the KL divergence at coincident distributions
(the Fisher information in the predictive parameters).  All functions here
are pointwise; averaging over training points happens in the assessment
pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import BERNOULLI, GAUSSIAN
from .gp import PredictiveDerivatives, PredictiveDistribution

BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class FisherMatrix:
    """Hessian of D_KL at coincidence, in the predictive parameterization."""

    h: np.ndarray


def fisher_at_coincidence(family: str, params) -> FisherMatrix:
    """Fisher matrix for the (mean, sd) Gaussian or (p,) Bernoulli predictive.

    Gaussian: diag(1/sd^2, 2/sd^2).  Bernoulli: [[1 / (p (1 - p))]].
    """
    params = np.asarray(params, dtype=float)
    if family == GAUSSIAN:
        sd = params[1]
        if not np.isfinite(sd) or sd <= 0.0:
            raise ValueError("gaussian predictive sd must be positive")
        return FisherMatrix(h=np.diag([1.0 / sd**2, 2.0 / sd**2]))
    if family == BERNOULLI:
        p = params[0]
        if not np.isfinite(p) or p < BOUNDARY_TOL or p > 1.0 - BOUNDARY_TOL:
            raise ValueError("bernoulli predictive p must lie inside (0, 1)")
        return FisherMatrix(h=np.array([[1.0 / (p * (1.0 - p))]]))
    raise ValueError(f"unknown family {family!r}")


def kl_diff(dist: PredictiveDistribution, derivs: PredictiveDerivatives, d: int) -> float:
    """Square root of the KL curvature along input column d."""
    fisher = fisher_at_coincidence(dist.family, dist.params)
    g = derivs.first[:, d]
    return float(np.sqrt(g @ fisher.h @ g))


def kl_diff2(
    dist: PredictiveDistribution, derivs: PredictiveDerivatives, d: int, e: int
) -> float:
    """Interaction strength between input columns d and e."""
    if d == e:
        raise ValueError("kl_diff2 requires two distinct columns")
    fisher = fisher_at_coincidence(dist.family, dist.params)
    h = derivs.second[:, d, e]
    return float(np.sqrt(2.0 * (h @ fisher.h @ h)))


def gaussian_kl(mu1: float, sd1: float, mu2: float, sd2: float) -> float:
    """D_KL[ N(mu1, sd1^2) || N(mu2, sd2^2) ]."""
    return (
        np.log(sd2 / sd1) + (sd1**2 + (mu1 - mu2) ** 2) / (2.0 * sd2**2) - 0.5
    )


def bernoulli_kl(p: float, q: float) -> float:
    """D_KL[ Bern(p) || Bern(q) ]."""
    return p * np.log(p / q) + (1.0 - p) * np.log((1.0 - p) / (1.0 - q))


def _kl_between(a: PredictiveDistribution, b: PredictiveDistribution) -> float:
    if a.family != b.family:
        raise ValueError("families differ")
    if a.family == GAUSSIAN:
        return gaussian_kl(a.params[0], a.params[1], b.params[0], b.params[1])
    return bernoulli_kl(a.params[0], b.params[0])


def finite_difference_kl_oracle(
    predict_fn, x_star, d: int, e: int | None = None, h: float = 1e-3
) -> float:
    """Derivative-free reference value for kl_diff (e is None) or kl_diff2.

    Single-column mode: with g(s) = D_KL[p(x*) || p(x* + s e_d)], which has
    a quadratic minimum g(0) = 0, returns sqrt((g(h) + g(-h)) / h^2), the
    central second difference of g at 0.

    Pair mode: estimates each parameter's cross second derivative with the
    four-point stencil (theta(+h,+h) - theta(+h,-h) - theta(-h,+h)
    + theta(-h,-h)) / (4 h^2) and assembles sqrt(2 h_fd^T H h_fd) with the
    Fisher matrix evaluated at x*.
    """
    if h <= 0:
        raise ValueError("step must be positive")
    x_star = np.asarray(x_star, dtype=float)
    center = predict_fn(x_star)

    def shifted(step_d: float, step_e: float = 0.0) -> PredictiveDistribution:
        x = x_star.copy()
        x[d] += step_d
        if e is not None:
            x[e] += step_e
        return predict_fn(x)

    if e is None:
        plus = _kl_between(center, shifted(h))
        minus = _kl_between(center, shifted(-h))
        value = (plus + minus) / h**2
        if not np.isfinite(value):
            raise ValueError("non-finite KL evaluation in oracle")
        return float(np.sqrt(max(value, 0.0)))

    if e == d:
        raise ValueError("pair mode requires two distinct columns")
    cross = (
        shifted(h, h).params
        - shifted(h, -h).params
        - shifted(-h, h).params
        + shifted(-h, -h).params
    ) / (4.0 * h**2)
    if not np.all(np.isfinite(cross)):
        raise ValueError("non-finite parameter evaluation in oracle")
    fisher = fisher_at_coincidence(center.family, center.params)
    return float(np.sqrt(2.0 * (cross @ fisher.h @ cross)))
