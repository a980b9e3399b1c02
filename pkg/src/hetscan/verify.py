"""Randomized agreement checks between analytic derivatives and oracles.

Each trial builds a small random GP instance (mixed numerical and level
columns), then compares every analytic quantity the sensitivity pipeline
relies on against a derivative-free reference:

    kernel_first, kernel_second   central differences of kernel_eval
    predictive_first, predictive_second
                                  central differences of the predictive
                                  parameter vector
    fisher                        finite-difference Hessians of the
                                  closed-form KL divergences
    kl_diff, kl_diff2             the finite-difference KL oracle

Errors are block-relative: max absolute deviation over a block divided by
the block's largest reference magnitude.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import BERNOULLI, GAUSSIAN
from .gp import (
    fit_exact,
    fit_laplace,
    predict_exact,
    predict_exact_with_derivatives,
    predict_laplace,
    predict_laplace_with_derivatives,
)
from .kernel import Hyperparameters, kernel_eval, kernel_input_derivatives
from .sensitivity import (
    bernoulli_kl,
    finite_difference_kl_oracle,
    fisher_at_coincidence,
    gaussian_kl,
    kl_diff,
    kl_diff2,
)

CHECKS = (
    "kernel_first",
    "kernel_second",
    "predictive_first",
    "predictive_second",
    "fisher",
    "kl_diff",
    "kl_diff2",
)

FD_STEP = 1e-5
KL_STEP = 1e-3


@dataclass(frozen=True)
class VerificationResult:
    """Max block-relative error per check across all trials."""

    family: str
    trials: int
    tolerance: float
    errors: dict

    @property
    def passed(self) -> bool:
        return all(err < self.tolerance for err in self.errors.values())

    def failing(self) -> list[str]:
        return [name for name, err in self.errors.items() if err >= self.tolerance]


def _block_error(analytic: np.ndarray, reference: np.ndarray) -> float:
    analytic = np.asarray(analytic, dtype=float)
    reference = np.asarray(reference, dtype=float)
    scale = max(float(np.max(np.abs(reference))), 1e-12)
    return float(np.max(np.abs(analytic - reference))) / scale


def _fd_gradient(fn, x: np.ndarray, h: float) -> np.ndarray:
    cols = []
    for d in range(x.size):
        step = np.zeros_like(x)
        step[d] = h
        cols.append((fn(x + step) - fn(x - step)) / (2.0 * h))
    return np.stack(cols, axis=-1)


def _fd_hessian(fn, x: np.ndarray, h: float) -> np.ndarray:
    p = x.size
    probe = np.asarray(fn(x), dtype=float)
    hess = np.zeros(probe.shape + (p, p))
    for d in range(p):
        for e in range(p):
            sd = np.zeros_like(x)
            se = np.zeros_like(x)
            sd[d] = h
            se[e] = h
            hess[..., d, e] = (
                fn(x + sd + se) - fn(x + sd - se) - fn(x - sd + se) + fn(x - sd - se)
            ) / (4.0 * h * h)
    return hess


def _random_instance(family: str, rng: np.random.Generator):
    n = int(rng.integers(12, 30))
    d_num = int(rng.integers(1, 4))
    k_grp = int(rng.integers(1, 3))
    xmat = np.concatenate(
        [
            rng.normal(size=(n, d_num)),
            rng.integers(1, 4, size=(n, k_grp)).astype(float),
        ],
        axis=1,
    )
    p = d_num + k_grp
    hyp = Hyperparameters(
        lengthscales=rng.uniform(0.6, 2.0, size=p),
        signal_variance=float(rng.uniform(0.5, 2.0)),
        noise_variance=float(rng.uniform(0.1, 0.4)) if family == GAUSSIAN else None,
    )
    if family == GAUSSIAN:
        y = rng.normal(size=n)
    else:
        y = (rng.random(n) < 0.5).astype(float)
        if y.min() == y.max():
            y[0] = 1.0 - y[0]
    x_star = xmat[int(rng.integers(0, n))] + 0.1 * rng.normal(size=p)
    return xmat, y, hyp, x_star, d_num, k_grp


def _fisher_reference_error(family: str, rng: np.random.Generator) -> float:
    h = 1e-4
    if family == GAUSSIAN:
        mu = float(rng.normal())
        sd = float(rng.uniform(0.5, 2.0))
        fisher = fisher_at_coincidence(GAUSSIAN, [mu, sd]).h

        def kl_from(theta):
            return gaussian_kl(mu, sd, theta[0], theta[1])

        reference = _fd_hessian(kl_from, np.array([mu, sd]), h)
        return _block_error(fisher, reference)
    p = float(rng.uniform(0.2, 0.8))
    fisher = fisher_at_coincidence(BERNOULLI, [p]).h
    reference = (bernoulli_kl(p, p + h) + bernoulli_kl(p, p - h)) / h**2
    return _block_error(fisher, np.array([[reference]]))


def verify_derivatives(
    family: str, trials: int, seed: int, tolerance: float = 1e-3
) -> VerificationResult:
    """Run all checks over seeded random instances for one family."""
    if family not in (GAUSSIAN, BERNOULLI):
        raise ValueError(f"unknown family {family!r}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    errors = {name: 0.0 for name in CHECKS}

    for trial in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence((seed, trial)))
        xmat, y, hyp, x_star, d_num, k_grp = _random_instance(family, rng)
        p = d_num + k_grp

        dk, d2k = kernel_input_derivatives(x_star, xmat, hyp)
        kernel_fn = lambda x: np.array([kernel_eval(x, row, hyp) for row in xmat])
        errors["kernel_first"] = max(
            errors["kernel_first"],
            _block_error(dk, _fd_gradient(kernel_fn, x_star, FD_STEP)),
        )
        errors["kernel_second"] = max(
            errors["kernel_second"],
            _block_error(d2k, _fd_hessian(kernel_fn, x_star, FD_STEP)),
        )

        if family == GAUSSIAN:
            post = fit_exact(xmat, y, hyp)
            dist, derivs = predict_exact_with_derivatives(post, x_star)
            predict_fn = lambda x: predict_exact(post, x)
        else:
            post = fit_laplace(xmat, y, hyp)
            dist, derivs = predict_laplace_with_derivatives(post, x_star)
            predict_fn = lambda x: predict_laplace(post, x)

        params_fn = lambda x: predict_fn(x).params
        errors["predictive_first"] = max(
            errors["predictive_first"],
            _block_error(derivs.first, _fd_gradient(params_fn, x_star, FD_STEP)),
        )
        errors["predictive_second"] = max(
            errors["predictive_second"],
            _block_error(derivs.second, _fd_hessian(params_fn, x_star, FD_STEP)),
        )

        errors["fisher"] = max(errors["fisher"], _fisher_reference_error(family, rng))

        diffs = np.array([kl_diff(dist, derivs, d) for d in range(p)])
        oracle = np.array(
            [
                finite_difference_kl_oracle(predict_fn, x_star, d, None, KL_STEP)
                for d in range(p)
            ]
        )
        errors["kl_diff"] = max(errors["kl_diff"], _block_error(diffs, oracle))

        pairs = [(d, d_num + k) for d in range(d_num) for k in range(k_grp)]
        diffs2 = np.array([kl_diff2(dist, derivs, d, e) for d, e in pairs])
        oracle2 = np.array(
            [
                finite_difference_kl_oracle(predict_fn, x_star, d, e, KL_STEP)
                for d, e in pairs
            ]
        )
        errors["kl_diff2"] = max(errors["kl_diff2"], _block_error(diffs2, oracle2))

    return VerificationResult(
        family=family, trials=trials, tolerance=tolerance, errors=errors
    )
