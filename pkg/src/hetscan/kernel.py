"""Squared-exponential (ARD) kernel with analytic input derivatives.

k(a, b) = signal_variance * exp(-sum_j (a_j - b_j)^2 / (2 * lengthscale_j^2))

One lengthscale per design column, including the grouping-code columns, so
the kernel can stretch over level codes independently of the standardized
predictors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Hyperparameters:
    """Kernel (and, for regression, noise) parameters.

    ``lengthscales`` has one strictly positive entry per design column,
    ``noise_variance`` is None for the Bernoulli family.
    """

    lengthscales: np.ndarray
    signal_variance: float
    noise_variance: float | None = None

    def __post_init__(self):
        ls = np.asarray(self.lengthscales, dtype=float)
        object.__setattr__(self, "lengthscales", ls)
        object.__setattr__(self, "signal_variance", float(self.signal_variance))
        if self.noise_variance is not None:
            object.__setattr__(self, "noise_variance", float(self.noise_variance))
        if ls.ndim != 1 or ls.size == 0:
            raise ValueError("lengthscales must be a non-empty vector")
        ok = np.all(np.isfinite(ls)) and np.all(ls > 0.0)
        if not ok:
            raise ValueError("lengthscales must be finite and positive")
        if not (np.isfinite(self.signal_variance) and self.signal_variance > 0.0):
            raise ValueError("signal_variance must be finite and positive")
        if self.noise_variance is not None and not (
            np.isfinite(self.noise_variance) and self.noise_variance > 0.0
        ):
            raise ValueError("noise_variance must be finite and positive")

    @property
    def n_dims(self) -> int:
        return self.lengthscales.size


def _check_dims(x: np.ndarray, hyp: Hyperparameters) -> None:
    if x.shape[-1] != hyp.n_dims:
        raise ValueError(
            f"point dimension {x.shape[-1]} does not match {hyp.n_dims} lengthscales"
        )


def kernel_eval(a, b, hyp: Hyperparameters) -> float:
    """Covariance between two points."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    _check_dims(a, hyp)
    _check_dims(b, hyp)
    q = np.sum(((a - b) / hyp.lengthscales) ** 2)
    return hyp.signal_variance * float(np.exp(-0.5 * q))


def kernel_matrix(xa: np.ndarray, xb: np.ndarray, hyp: Hyperparameters) -> np.ndarray:
    """Gram matrix k(xa_i, xb_j) for two point sets."""
    xa = np.asarray(xa, dtype=float)
    xb = np.asarray(xb, dtype=float)
    _check_dims(xa, hyp)
    _check_dims(xb, hyp)
    sa = xa / hyp.lengthscales
    sb = xb / hyp.lengthscales
    sq = (
        np.sum(sa**2, axis=1)[:, None]
        + np.sum(sb**2, axis=1)[None, :]
        - 2.0 * (sa @ sb.T)
    )
    np.maximum(sq, 0.0, out=sq)
    return hyp.signal_variance * np.exp(-0.5 * sq)


def kernel_vector(x_star, xmat: np.ndarray, hyp: Hyperparameters) -> np.ndarray:
    """Cross-covariances k(x*, x_i) for all training rows."""
    x_star = np.asarray(x_star, dtype=float)
    return kernel_matrix(x_star[None, :], np.asarray(xmat, dtype=float), hyp)[0]


def kernel_input_derivatives(
    x_star, xmat: np.ndarray, hyp: Hyperparameters
) -> tuple[np.ndarray, np.ndarray]:
    """First and second derivatives of k(x*, x_i) with respect to x*.

    With r_id = (x*_d - x_{i,d}) / lengthscale_d^2:

        dk[i, d]     = -r_id * k_i
        d2k[i, d, e] = (r_id * r_ie - delta_de / lengthscale_d^2) * k_i

    Returns
    -------
    dk : ndarray, shape (N, P)
    d2k : ndarray, shape (N, P, P)
    """
    x_star = np.asarray(x_star, dtype=float)
    xmat = np.asarray(xmat, dtype=float)
    _check_dims(x_star, hyp)
    _check_dims(xmat, hyp)
    k = kernel_vector(x_star, xmat, hyp)
    r = (x_star[None, :] - xmat) / hyp.lengthscales**2
    dk = -r * k[:, None]
    outer = r[:, :, None] * r[:, None, :]
    d2k = (outer - np.diag(1.0 / hyp.lengthscales**2)[None, :, :]) * k[:, None, None]
    return dk, d2k
