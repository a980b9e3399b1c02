"""Gaussian-process surrogate with analytic predictive input derivatives.

Exact inference for the Gaussian family; Laplace approximation with a probit
link for the Bernoulli family.  Predictions return the predictive-parameter
vector together with its first and second derivatives with respect to the
prediction point, which downstream sensitivity measures consume.

The Gaussian predictive is over y* (observation noise included) and is
parameterized as (mean, standard deviation).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular
from scipy.special import log_ndtr, ndtr
from scipy.stats import norm

from .data import BERNOULLI, GAUSSIAN
from .kernel import (
    Hyperparameters,
    kernel_input_derivatives,
    kernel_matrix,
    kernel_vector,
)

MAX_NEWTON_ITERS = 100
NEWTON_TOL = 1e-10


class CholeskyError(RuntimeError):
    """Gram matrix stayed non positive definite through jitter escalation."""


class ConvergenceError(RuntimeError):
    """Newton iteration for the Laplace mode failed to converge."""

    def __init__(self, message: str, last_delta: float):
        super().__init__(message)
        self.last_delta = last_delta


def cholesky_with_jitter(a: np.ndarray) -> tuple[np.ndarray, float]:
    """Lower Cholesky factor of a symmetric matrix, escalating diagonal jitter.

    Jitter starts at 1e-10 * mean(diag) and grows tenfold up to
    1e-4 * mean(diag) before giving up.
    """
    scale = float(np.mean(np.diag(a)))
    if scale <= 0.0 or not np.isfinite(scale):
        scale = 1.0
    jitter = 0.0
    while True:
        try:
            lower = cholesky(a + jitter * np.eye(a.shape[0]), lower=True)
            return lower, jitter
        except np.linalg.LinAlgError:
            pass
        except Exception:
            pass
        jitter = 1e-10 * scale if jitter == 0.0 else jitter * 10.0
        if jitter > 1e-4 * scale:
            raise CholeskyError(
                f"matrix not positive definite up to jitter {1e-4 * scale:g}"
            )


def _design_matrix(design) -> np.ndarray:
    z = design.z if hasattr(design, "z") else design
    return np.asarray(z, dtype=float)


@dataclass(frozen=True)
class ExactPosterior:
    """State of an exact Gaussian-likelihood GP fit."""

    chol: np.ndarray
    alpha: np.ndarray
    xmat: np.ndarray
    hyp: Hyperparameters


@dataclass(frozen=True)
class LaplacePosterior:
    """State of a Laplace-approximate Bernoulli-probit GP fit."""

    mode: np.ndarray
    grad_at_mode: np.ndarray
    w_sqrt: np.ndarray
    chol_b: np.ndarray
    kmat: np.ndarray
    xmat: np.ndarray
    hyp: Hyperparameters


@dataclass(frozen=True)
class PredictiveDistribution:
    """Predictive-parameter vector: (mean, sd) for Gaussian, (p,) for Bernoulli."""

    family: str
    params: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "params", np.asarray(self.params, dtype=float))

    @property
    def n_params(self) -> int:
        return self.params.size


@dataclass(frozen=True)
class PredictiveDerivatives:
    """First (n_params x P) and second (n_params x P x P) parameter derivatives."""

    first: np.ndarray
    second: np.ndarray


def _symmetrize(second: np.ndarray) -> np.ndarray:
    return 0.5 * (second + second.transpose(0, 2, 1))


def fit_exact(design, y, hyp: Hyperparameters) -> ExactPosterior:
    """Factor K + noise*I and precompute alpha = (K + noise*I)^-1 y."""
    if hyp.noise_variance is None:
        raise ValueError("exact inference requires noise_variance")
    xmat = _design_matrix(design)
    y = np.asarray(y, dtype=float)
    kmat = kernel_matrix(xmat, xmat, hyp)
    a = kmat + hyp.noise_variance * np.eye(xmat.shape[0])
    lower, _ = cholesky_with_jitter(a)
    alpha = cho_solve((lower, True), y)
    return ExactPosterior(chol=lower, alpha=alpha, xmat=xmat, hyp=hyp)


def predict_exact(post: ExactPosterior, x_star) -> PredictiveDistribution:
    """Predictive (mean, sd) of y* at a point."""
    k_star = kernel_vector(x_star, post.xmat, post.hyp)
    mu = float(k_star @ post.alpha)
    solved = cho_solve((post.chol, True), k_star)
    latent_var = max(post.hyp.signal_variance - float(k_star @ solved), 0.0)
    sd = np.sqrt(latent_var + post.hyp.noise_variance)
    return PredictiveDistribution(family=GAUSSIAN, params=np.array([mu, sd]))


def predict_exact_with_derivatives(
    post: ExactPosterior, x_star
) -> tuple[PredictiveDistribution, PredictiveDerivatives]:
    """Predictive (mean, sd) plus first/second derivatives in the input.

    All dependence on x* flows through k*; k(x*, x*) is constant for the
    squared-exponential kernel.  sd derivatives follow from variance
    derivatives by dsd = dvar / (2 sd) and
    d2sd = d2var / (2 sd) - (dvar x dvar) / (4 sd^3).
    """
    k_star = kernel_vector(x_star, post.xmat, post.hyp)
    dk, d2k = kernel_input_derivatives(x_star, post.xmat, post.hyp)

    rhs = np.concatenate([k_star[:, None], dk], axis=1)
    solved = cho_solve((post.chol, True), rhs)
    a_inv_k = solved[:, 0]
    a_inv_dk = solved[:, 1:]

    mu = float(k_star @ post.alpha)
    latent_var = max(post.hyp.signal_variance - float(k_star @ a_inv_k), 0.0)
    var = latent_var + post.hyp.noise_variance
    sd = float(np.sqrt(var))

    dmu = dk.T @ post.alpha
    d2mu = np.tensordot(post.alpha, d2k, axes=(0, 0))

    dvar = -2.0 * (dk.T @ a_inv_k)
    d2var = -2.0 * (dk.T @ a_inv_dk + np.tensordot(a_inv_k, d2k, axes=(0, 0)))

    dsd = dvar / (2.0 * sd)
    d2sd = d2var / (2.0 * sd) - np.outer(dvar, dvar) / (4.0 * sd**3)

    dist = PredictiveDistribution(family=GAUSSIAN, params=np.array([mu, sd]))
    derivs = PredictiveDerivatives(
        first=np.stack([dmu, dsd]),
        second=_symmetrize(np.stack([d2mu, d2sd])),
    )
    return dist, derivs


def _probit_moments(t: np.ndarray, f: np.ndarray):
    """Stable log-likelihood, gradient and curvature of log Phi(t f).

    With z = t f and r = phi(z) / Phi(z): d/df log Phi(z) = t r and
    -d^2/df^2 log Phi(z) = r^2 + z r, which is positive.
    """
    z = t * f
    loglik = float(np.sum(log_ndtr(z)))
    r = np.exp(norm.logpdf(z) - log_ndtr(z))
    grad = t * r
    w = r**2 + z * r
    return loglik, grad, np.maximum(w, 0.0), r, z


def fit_laplace(design, y, hyp: Hyperparameters, a0=None) -> LaplacePosterior:
    """Newton iteration for the Laplace mode of a probit-link GP.

    Uses the B = I + W^{1/2} K W^{1/2} formulation so K is never inverted
    directly.  Converges when the latent objective
    psi(f) = log p(y|f) - 0.5 a^T f (with f = K a) changes by less than
    1e-10, with step halving whenever a full Newton step lowers psi.

    ``a0`` warm-starts the iteration at f = K a0; the objective is strictly
    concave so the converged mode does not depend on it.
    """
    xmat = _design_matrix(design)
    y = np.asarray(y, dtype=float)
    if not np.all(np.isin(y, (0.0, 1.0))):
        raise ValueError("laplace fit requires 0/1 responses")
    t = 2.0 * y - 1.0
    n = xmat.shape[0]
    kmat = kernel_matrix(xmat, xmat, hyp)

    a = np.zeros(n) if a0 is None else np.asarray(a0, dtype=float).copy()
    f = kmat @ a
    loglik, grad, w, _, _ = _probit_moments(t, f)
    psi = loglik - 0.5 * float(a @ f)
    delta = np.inf
    for _ in range(MAX_NEWTON_ITERS):
        w_sqrt = np.sqrt(w)
        b = np.eye(n) + (w_sqrt[:, None] * kmat) * w_sqrt[None, :]
        chol_b, _ = cholesky_with_jitter(b)
        rhs = w * f + grad
        a_new = rhs - w_sqrt * cho_solve((chol_b, True), w_sqrt * (kmat @ rhs))
        f_new = kmat @ a_new

        step = 1.0
        for _ in range(40):
            a_try = a + step * (a_new - a)
            f_try = f + step * (f_new - f)
            loglik_try, grad_try, w_try, _, _ = _probit_moments(t, f_try)
            psi_try = loglik_try - 0.5 * float(a_try @ f_try)
            if psi_try >= psi or step < 1e-12:
                break
            step *= 0.5
        delta = abs(psi_try - psi)
        a, f = a_try, f_try
        psi, grad, w = psi_try, grad_try, w_try
        if delta < NEWTON_TOL:
            break
    else:
        raise ConvergenceError(
            f"laplace mode search did not converge; last objective change {delta:g}",
            last_delta=delta,
        )

    w_sqrt = np.sqrt(w)
    b = np.eye(n) + (w_sqrt[:, None] * kmat) * w_sqrt[None, :]
    chol_b, _ = cholesky_with_jitter(b)
    return LaplacePosterior(
        mode=f,
        grad_at_mode=grad,
        w_sqrt=w_sqrt,
        chol_b=chol_b,
        kmat=kmat,
        xmat=xmat,
        hyp=hyp,
    )


def _laplace_r_apply(post: LaplacePosterior, m: np.ndarray) -> np.ndarray:
    """Apply R = W^{1/2} B^{-1} W^{1/2} to a column stack."""
    return post.w_sqrt[:, None] * cho_solve(
        (post.chol_b, True), post.w_sqrt[:, None] * m
    )


def predict_laplace(post: LaplacePosterior, x_star) -> PredictiveDistribution:
    """Predictive success probability p* = Phi(m / sqrt(1 + v))."""
    k_star = kernel_vector(x_star, post.xmat, post.hyp)
    m = float(k_star @ post.grad_at_mode)
    half = solve_triangular(post.chol_b, post.w_sqrt * k_star, lower=True)
    v = max(post.hyp.signal_variance - float(half @ half), 0.0)
    p = float(ndtr(m / np.sqrt(1.0 + v)))
    return PredictiveDistribution(family=BERNOULLI, params=np.array([p]))


def predict_laplace_with_derivatives(
    post: LaplacePosterior, x_star
) -> tuple[PredictiveDistribution, PredictiveDerivatives]:
    """Predictive probability plus first/second derivatives in the input.

    p* = Phi(u) with u = m s, s = (1 + v)^{-1/2}; m and v depend on x* only
    through k*, so the chain rule runs through (m, v) -> u -> p*.
    """
    k_star = kernel_vector(x_star, post.xmat, post.hyp)
    dk, d2k = kernel_input_derivatives(x_star, post.xmat, post.hyp)

    r_stack = _laplace_r_apply(post, np.concatenate([k_star[:, None], dk], axis=1))
    r_k = r_stack[:, 0]
    r_dk = r_stack[:, 1:]

    m = float(k_star @ post.grad_at_mode)
    v = max(post.hyp.signal_variance - float(k_star @ r_k), 0.0)

    dm = dk.T @ post.grad_at_mode
    d2m = np.tensordot(post.grad_at_mode, d2k, axes=(0, 0))
    dv = -2.0 * (dk.T @ r_k)
    d2v = -2.0 * (dk.T @ r_dk + np.tensordot(r_k, d2k, axes=(0, 0)))

    s = 1.0 / np.sqrt(1.0 + v)
    u = m * s
    ds = -0.5 * s**3 * dv
    d2s = 0.75 * s**5 * np.outer(dv, dv) - 0.5 * s**3 * d2v
    du = dm * s + m * ds
    d2u = d2m * s + np.outer(dm, ds) + np.outer(ds, dm) + m * d2s

    p = float(ndtr(u))
    pdf_u = float(norm.pdf(u))
    dp = pdf_u * du
    d2p = pdf_u * (d2u - u * np.outer(du, du))

    dist = PredictiveDistribution(family=BERNOULLI, params=np.array([p]))
    derivs = PredictiveDerivatives(first=dp[None, :], second=_symmetrize(d2p[None, :, :]))
    return dist, derivs
