"""Gaussian-Gamma mean-field fit against the exact conjugate posterior."""

import math

import numpy as np
import pytest
from scipy.special import gammaln

from helpers import normal_gamma_evidence, normal_gamma_posterior
from topicdrift.errors import ConvergenceError, ParameterError
from topicdrift.meanfield import (
    GaussianGammaPrior,
    gaussian_meanfield_fit,
    meanfield_elbo,
)

WEAK = GaussianGammaPrior(mu0=0.0, lambda0=1e-6, a0=1e-3, b0=1e-3)


def test_shape_parameter_is_data_independent():
    rng = np.random.default_rng(0)
    for _ in range(5):
        data = rng.normal(rng.uniform(-3, 3), rng.uniform(0.5, 2), size=10)
        post = gaussian_meanfield_fit(data, GaussianGammaPrior(a0=1.0, b0=1.0))
        assert post.aN == 6.0


def test_flat_mean_prior_recovers_sample_mean():
    rng = np.random.default_rng(1)
    data = rng.normal(2.5, 1.0, size=37)
    prior = GaussianGammaPrior(mu0=99.0, lambda0=0.0, a0=1.0, b0=1.0)
    post = gaussian_meanfield_fit(data, prior)
    assert post.muN == pytest.approx(data.mean(), abs=1e-12)


def test_recovers_known_mean_and_precision():
    rng = np.random.default_rng(2)
    data = rng.normal(2.0, 0.5, size=10_000)  # precision 4
    post = gaussian_meanfield_fit(data, WEAK)
    assert abs(post.muN - 2.0) < 0.05
    assert abs(post.aN / post.bN - 4.0) < 0.2


def test_matches_exact_conjugate_posterior_with_weak_prior():
    rng = np.random.default_rng(3)
    data = rng.normal(-1.0, 1.5, size=400)
    post = gaussian_meanfield_fit(data, WEAK)
    mu_n, _, a_n, b_n = normal_gamma_posterior(data, WEAK.mu0, WEAK.lambda0, WEAK.a0, WEAK.b0)
    assert post.muN == pytest.approx(mu_n, abs=1e-9)
    assert post.aN == pytest.approx(a_n, abs=1e-12)
    # the factorized b_N replaces the exact coupling by E_mu terms; close at scale
    assert post.aN / post.bN == pytest.approx(a_n / b_n, rel=0.02)


def test_elbo_trace_non_decreasing():
    rng = np.random.default_rng(4)
    data = rng.normal(0.7, 2.0, size=200)
    prior = GaussianGammaPrior(mu0=0.0, lambda0=1.0, a0=2.0, b0=2.0)
    post = gaussian_meanfield_fit(data, prior)
    trace = np.array(post.elbo_trace)
    assert np.all(np.diff(trace) >= -1e-9)


def test_elbo_below_exact_evidence():
    rng = np.random.default_rng(5)
    data = rng.normal(2.0, 0.5, size=200)
    post = gaussian_meanfield_fit(data, WEAK)
    bound = meanfield_elbo(data, WEAK, post)
    evidence = normal_gamma_evidence(data, WEAK.mu0, WEAK.lambda0, WEAK.a0, WEAK.b0)
    assert bound <= evidence


def test_elbo_gap_small_at_n50():
    rng = np.random.default_rng(6)
    data = rng.normal(0.0, 1.0, size=50)
    prior = GaussianGammaPrior(mu0=0.0, lambda0=1e-3, a0=1e-2, b0=1e-2)
    post = gaussian_meanfield_fit(data, prior)
    bound = meanfield_elbo(data, prior, post)
    evidence = normal_gamma_evidence(data, prior.mu0, prior.lambda0, prior.a0, prior.b0)
    assert abs(evidence - bound) < 0.5


def test_single_point_is_finite():
    prior = GaussianGammaPrior(mu0=0.0, lambda0=1.0, a0=1.0, b0=1.0)
    post = gaussian_meanfield_fit([3.7], prior)
    assert math.isfinite(post.elbo_trace[-1])
    assert post.aN == 1.5


def test_fixed_point_unique_across_initializations():
    rng = np.random.default_rng(8)
    data = rng.normal(1.0, 1.0, size=60)
    prior = GaussianGammaPrior(mu0=0.0, lambda0=1.0, a0=2.0, b0=2.0)
    lo = gaussian_meanfield_fit(data, prior, tol=1e-12, init_e_tau=0.5)
    hi = gaussian_meanfield_fit(data, prior, tol=1e-12, init_e_tau=50.0)
    for name in ("muN", "lambdaN", "aN", "bN"):
        x, y = getattr(lo, name), getattr(hi, name)
        assert abs(x - y) / max(abs(x), 1e-12) < 1e-6


def test_kl_to_exact_posterior_shrinks():
    """Grid KL(q || exact posterior) is smaller at convergence than at start."""
    rng = np.random.default_rng(9)
    data = rng.normal(1.0, 1.0, size=15)
    prior = GaussianGammaPrior(mu0=0.0, lambda0=1.0, a0=2.0, b0=2.0)
    mu_n, lambda_n, a_n, b_n = normal_gamma_posterior(
        data, prior.mu0, prior.lambda0, prior.a0, prior.b0
    )

    mus = np.linspace(mu_n - 2.5, mu_n + 2.5, 160)
    taus = np.linspace(1e-3, 5.0 * a_n / b_n, 160)
    mu_grid, tau_grid = np.meshgrid(mus, taus, indexing="ij")

    def grid_kl(q_mu_mean, q_mu_prec, q_a, q_b):
        log_q = (
            0.5 * (np.log(q_mu_prec) - np.log(2 * np.pi))
            - 0.5 * q_mu_prec * (mu_grid - q_mu_mean) ** 2
            + q_a * np.log(q_b) - gammaln(q_a)
            + (q_a - 1) * np.log(tau_grid) - q_b * tau_grid
        )
        log_post = (
            0.5 * (np.log(lambda_n * tau_grid) - np.log(2 * np.pi))
            - 0.5 * lambda_n * tau_grid * (mu_grid - mu_n) ** 2
            + a_n * np.log(b_n) - gammaln(a_n)
            + (a_n - 1) * np.log(tau_grid) - b_n * tau_grid
        )
        q = np.exp(log_q)
        cell = (mus[1] - mus[0]) * (taus[1] - taus[0])
        return float((q * (log_q - log_post)).sum() * cell)

    n = data.size
    mu0_fit = (prior.lambda0 * prior.mu0 + data.sum()) / (prior.lambda0 + n)
    e_tau0 = prior.a0 / prior.b0
    kl_init = grid_kl(mu0_fit, (prior.lambda0 + n) * e_tau0, prior.a0 + n / 2, prior.b0)
    post = gaussian_meanfield_fit(data, prior)
    kl_final = grid_kl(post.muN, post.lambdaN, post.aN, post.bN)
    assert kl_final < kl_init


def test_error_paths():
    with pytest.raises(ParameterError):
        gaussian_meanfield_fit([], WEAK)
    with pytest.raises(ParameterError):
        gaussian_meanfield_fit([1.0], WEAK, tol=0.0)
    with pytest.raises(ParameterError):
        GaussianGammaPrior(a0=-1.0)
    with pytest.raises(ConvergenceError) as err:
        gaussian_meanfield_fit(np.arange(50, dtype=float), WEAK, tol=1e-16, max_iter=2)
    assert err.value.last is not None
    assert err.value.last.iterations == 2
