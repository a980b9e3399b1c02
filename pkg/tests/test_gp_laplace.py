"""Laplace-approximate probit GP: mode finding, prediction, derivatives."""

import numpy as np
import pytest
from scipy.special import ndtr

import hetscan.gp as gp
from conftest import block_error, fd_gradient, fd_hessian
from hetscan.gp import (
    ConvergenceError,
    fit_laplace,
    predict_laplace,
    predict_laplace_with_derivatives,
)
from hetscan.kernel import Hyperparameters


def random_fit(rng, n=25, p=2):
    hyp = Hyperparameters(
        lengthscales=rng.uniform(0.7, 2.0, size=p),
        signal_variance=float(rng.uniform(0.5, 2.0)),
    )
    x = rng.normal(size=(n, p))
    latent = 1.2 * x[:, 0] - 0.8 * x[:, 1 % p]
    y = (rng.random(n) < ndtr(latent)).astype(float)
    if y.min() == y.max():
        y[0] = 1.0 - y[0]
    return fit_laplace(x, y, hyp), x, y, hyp


def latent_objective(kmat, y, f):
    """psi(f) = log p(y | f) - 0.5 f^T K^{-1} f for the probit likelihood."""
    t = 2.0 * y - 1.0
    from scipy.special import log_ndtr

    return float(np.sum(log_ndtr(t * f)) - 0.5 * f @ np.linalg.solve(kmat, f))


class TestFitLaplace:
    def test_mode_is_stationary(self, rng):
        post, _, _, _ = random_fit(rng)
        # At the mode f = K grad(log p(y|f)).
        resid = post.mode - post.kmat @ post.grad_at_mode
        assert np.max(np.abs(resid)) < 1e-6

    def test_mode_maximizes_latent_objective(self, rng):
        post, x, y, _ = random_fit(rng, n=12)
        base = latent_objective(post.kmat, y, post.mode)
        for _ in range(10):
            perturbed = post.mode + 0.05 * rng.normal(size=len(y))
            assert latent_objective(post.kmat, y, perturbed) <= base + 1e-9

    def test_label_flip_negates_mode(self, rng):
        post, x, y, hyp = random_fit(rng)
        flipped = fit_laplace(x, 1.0 - y, hyp)
        np.testing.assert_allclose(flipped.mode, -post.mode, atol=1e-8)

    def test_warm_start_reaches_same_mode(self, rng):
        post, x, y, hyp = random_fit(rng)
        warm = fit_laplace(x, y, hyp, a0=post.grad_at_mode)
        np.testing.assert_allclose(warm.mode, post.mode, atol=1e-7)

    def test_rejects_non_binary_response(self, rng):
        hyp = Hyperparameters(lengthscales=[1.0], signal_variance=1.0)
        with pytest.raises(ValueError, match="0/1"):
            fit_laplace(rng.normal(size=(4, 1)), np.array([0.0, 1.0, 0.5, 1.0]), hyp)

    def test_nonconvergence_raises_with_last_delta(self, rng, monkeypatch):
        monkeypatch.setattr(gp, "MAX_NEWTON_ITERS", 1)
        hyp = Hyperparameters(lengthscales=[1.0, 1.0], signal_variance=1.0)
        x = rng.normal(size=(20, 2))
        y = (x[:, 0] > 0).astype(float)
        with pytest.raises(ConvergenceError) as err:
            fit_laplace(x, y, hyp)
        assert err.value.last_delta > 0.0


class TestPredictLaplace:
    def test_probability_in_unit_interval(self, rng):
        post, x, _, _ = random_fit(rng)
        for row in x[:8]:
            p = predict_laplace(post, row).params[0]
            assert 0.0 < p < 1.0

    def test_far_point_reverts_to_half(self, rng):
        post, _, _, _ = random_fit(rng)
        dist = predict_laplace(post, np.full(2, 60.0))
        assert dist.family == "bernoulli"
        assert dist.n_params == 1
        assert dist.params[0] == pytest.approx(0.5, abs=1e-8)

    def test_label_flip_mirrors_probability(self, rng):
        post, x, y, hyp = random_fit(rng)
        flipped = fit_laplace(x, 1.0 - y, hyp)
        x_star = rng.normal(size=2)
        p = predict_laplace(post, x_star).params[0]
        q = predict_laplace(flipped, x_star).params[0]
        assert p + q == pytest.approx(1.0, abs=1e-8)

    def test_separable_direction_orders_probabilities(self, rng):
        hyp = Hyperparameters(lengthscales=[1.5], signal_variance=1.0)
        x = np.linspace(-2, 2, 30)[:, None]
        y = (x[:, 0] > 0).astype(float)
        post = fit_laplace(x, y, hyp)
        p_neg = predict_laplace(post, np.array([-1.5])).params[0]
        p_pos = predict_laplace(post, np.array([1.5])).params[0]
        assert p_neg < 0.5 < p_pos


class TestPredictLaplaceDerivatives:
    def test_distribution_matches_plain_predict(self, rng):
        post, _, _, _ = random_fit(rng)
        x_star = rng.normal(size=2)
        dist_a = predict_laplace(post, x_star)
        dist_b, _ = predict_laplace_with_derivatives(post, x_star)
        np.testing.assert_allclose(dist_b.params, dist_a.params, atol=1e-12)

    def test_first_derivative_matches_fd(self, rng):
        post, _, _, _ = random_fit(rng)
        x_star = rng.normal(size=2) * 0.5

        def params_of(x):
            return predict_laplace(post, x).params

        _, derivs = predict_laplace_with_derivatives(post, x_star)
        assert block_error(derivs.first, fd_gradient(params_of, x_star)) < 1e-7

    def test_second_derivative_matches_fd(self, rng):
        post, _, _, _ = random_fit(rng)
        x_star = rng.normal(size=2) * 0.5

        def params_of(x):
            return predict_laplace(post, x).params

        _, derivs = predict_laplace_with_derivatives(post, x_star)
        assert block_error(derivs.second, fd_hessian(params_of, x_star, h=1e-4)) < 1e-5

    def test_shapes_and_symmetry(self, rng):
        post, _, _, _ = random_fit(rng, p=3)
        _, derivs = predict_laplace_with_derivatives(post, rng.normal(size=3))
        assert derivs.first.shape == (1, 3)
        assert derivs.second.shape == (1, 3, 3)
        np.testing.assert_allclose(
            derivs.second, derivs.second.transpose(0, 2, 1), atol=1e-15
        )

    def test_far_point_derivatives_vanish(self, rng):
        post, _, _, _ = random_fit(rng)
        _, derivs = predict_laplace_with_derivatives(post, np.full(2, 60.0))
        assert np.max(np.abs(derivs.first)) < 1e-8
        assert np.max(np.abs(derivs.second)) < 1e-8

    def test_label_flip_negates_first_derivative(self, rng):
        post, x, y, hyp = random_fit(rng)
        flipped = fit_laplace(x, 1.0 - y, hyp)
        x_star = rng.normal(size=2)
        _, d_orig = predict_laplace_with_derivatives(post, x_star)
        _, d_flip = predict_laplace_with_derivatives(flipped, x_star)
        np.testing.assert_allclose(d_flip.first, -d_orig.first, atol=1e-8)
