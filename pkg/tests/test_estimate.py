"""Likelihoods and estimators against hand calculations and direct oracles."""

import math

import numpy as np
import pytest
from scipy.optimize import minimize_scalar
from scipy.stats import multivariate_normal

from ouprocess import (CovarianceModel, FitResult, NoAdmissibleStart, OUModel,
                       TimeSeriesSample, empirical_autocorrelation,
                       empirical_autocovariance, gaussian_loglik,
                       log_likelihood_centered, log_likelihood_diff, mce_fit,
                       mle_fit, phi_from_kappa, simulate_grid)
from ouprocess.estimate import _mce_objective, _profiled_negloglik

EXAMPLE1_PHI = tuple(phi_from_kappa([0.9, 0.2 + 0.4j, 0.2 - 0.4j]))


class TestEmpiricalMoments:
    def test_hand_example(self):
        # x = (1, -1, 1, -1), known zero mean, divisor n = 4 at every lag
        x = TimeSeriesSample(values=np.array([1.0, -1.0, 1.0, -1.0]),
                             mean_policy="zero")
        g = empirical_autocovariance(x, 2)
        np.testing.assert_allclose(g, [1.0, -0.75, 0.5], atol=1e-15)
        np.testing.assert_allclose(empirical_autocorrelation(x, 2),
                                   [-0.75, 0.5], atol=1e-15)

    def test_sample_mean_policy(self):
        x = TimeSeriesSample(values=np.array([2.0, 4.0, 6.0]))
        # centered values (-2, 0, 2): g0 = 8/3, g1 = 0 + (... ) = 0? by hand:
        # sum over i of c_i c_{i+1} = (-2*0 + 0*2)/3 = 0
        g = empirical_autocovariance(x, 1)
        np.testing.assert_allclose(g, [8.0 / 3.0, 0.0], atol=1e-15)

    def test_explicit_mean_policy(self):
        x = TimeSeriesSample(values=np.array([2.0, 4.0, 6.0]),
                             mean_policy="3.0")
        # centered values (-1, 1, 3)
        g = empirical_autocovariance(x, 1)
        np.testing.assert_allclose(g, [11.0 / 3.0, 2.0 / 3.0], atol=1e-14)

    def test_maxlag_too_large(self):
        x = TimeSeriesSample(values=np.array([1.0, 2.0, 3.0]))
        with pytest.raises(ValueError):
            empirical_autocovariance(x, 3)


class TestGaussianLoglik:
    def test_scalar_case(self):
        # single observation: plain normal density
        v = gaussian_loglik(np.array([0.7]), np.array([[2.0]]), 2.0)
        expected = -0.5 * math.log(2 * math.pi * 2.0) - 0.7 ** 2 / 4.0
        assert abs(v - expected) < 1e-12

    def test_matches_scipy_mvn(self):
        rng = np.random.default_rng(0)
        A = rng.standard_normal((4, 4))
        cov = A @ A.T + 4 * np.eye(4)
        resid = rng.standard_normal(4)
        v = gaussian_loglik(resid, cov, float(np.max(np.diag(cov))))
        ref = multivariate_normal(mean=np.zeros(4), cov=cov).logpdf(resid)
        assert abs(v - ref) < 1e-10

    def test_scaling_identity(self):
        # N(x; 0, c V) = N(x/sqrt(c); 0, V) / c^{m/2}
        rng = np.random.default_rng(1)
        A = rng.standard_normal((3, 3))
        V = A @ A.T + 3 * np.eye(3)
        x = rng.standard_normal(3)
        c = 2.7
        lhs = gaussian_loglik(x, c * V, c * 3)
        rhs = gaussian_loglik(x / math.sqrt(c), V, 3.0) \
            - 0.5 * 3 * math.log(c)
        assert abs(lhs - rhs) < 1e-10


class TestLikelihoods:
    def _ou1_sample(self, n=40, lam=0.8, seed=4):
        model = OUModel(phi=(-lam,), sigma2=1.0)
        return model, simulate_grid(model, n=n, seed=seed).with_policy("zero")

    def test_centered_ou1_transition_oracle(self):
        # oracle: product of AR(1) transition densities
        model, x = self._ou1_sample()
        lam = 0.8
        g0 = 1.0 / (2 * lam)
        a = math.exp(-lam)
        v = g0 * (1 - a ** 2)
        xs = x.values
        ref = -0.5 * math.log(2 * math.pi * g0) - xs[0] ** 2 / (2 * g0)
        for i in range(len(xs) - 1):
            ref += -0.5 * math.log(2 * math.pi * v) \
                - (xs[i + 1] - a * xs[i]) ** 2 / (2 * v)
        assert abs(log_likelihood_centered(x, model) - ref) < 1e-10

    def test_diff_mvn_oracle(self):
        model, x = self._ou1_sample(n=12)
        cov = CovarianceModel.from_model(model)
        dx = np.diff(x.values)
        ref = multivariate_normal(mean=np.zeros(len(dx)),
                                  cov=cov.diff_matrix(len(dx), 1.0)
                                  ).logpdf(dx)
        assert abs(log_likelihood_diff(x, model) - ref) < 1e-10

    def test_inadmissible_is_minus_inf(self):
        _, x = self._ou1_sample()
        bad = OUModel(phi=(2.0,), sigma2=1.0)  # kappa = -2
        assert log_likelihood_diff(x, bad) == -math.inf
        assert log_likelihood_centered(x, bad) == -math.inf

    def test_profiled_sigma2_is_stationary_point(self):
        # derivative of the exact nll w.r.t. log sigma^2 vanishes at the
        # profiled value (finite-difference check)
        model, x = self._ou1_sample(n=25)
        phi = np.array([-0.8])
        nll, s2 = _profiled_negloglik(phi, np.diff(x.values), 1.0, "diff")

        def full_nll(log_s2):
            m = OUModel(phi=tuple(phi), sigma2=math.exp(log_s2))
            return -log_likelihood_diff(x, m)

        h = 1e-5
        deriv = (full_nll(math.log(s2) + h) - full_nll(math.log(s2) - h)) \
            / (2 * h)
        assert abs(deriv) < 1e-6
        assert abs(full_nll(math.log(s2)) - nll) < 1e-9


class TestMLE:
    def test_ou1_matches_1d_oracle(self):
        # oracle: brute scalar minimization of the same profile objective
        model = OUModel(phi=(-0.8,), sigma2=1.0)
        x = simulate_grid(model, n=400, seed=10).with_policy("zero")
        fit = mle_fit(x, p=1, variant="diff")
        resid = np.diff(x.values)
        ref = minimize_scalar(
            lambda v: _profiled_negloglik(np.array([v]), resid, 1.0,
                                          "diff")[0],
            bounds=(-5.0, -1e-4), method="bounded",
            options={"xatol": 1e-10})
        assert abs(fit.model.phi[0] - ref.x) < 1e-4
        assert fit.method == "MLE-diff"
        assert fit.objective >= -ref.fun - 1e-8

    def test_likelihood_at_optimum_beats_truth(self):
        model = OUModel(phi=EXAMPLE1_PHI, sigma2=1.0)
        x = simulate_grid(model, n=200, seed=15).with_policy("zero")
        fit = mle_fit(x, p=3, variant="diff", init=model, seed=0)
        assert fit.objective >= log_likelihood_diff(x, model) - 1e-8

    def test_recovers_ou1_rate(self):
        lam = 0.8
        x = simulate_grid(OUModel(phi=(-lam,), sigma2=1.0), n=800,
                          seed=12).with_policy("zero")
        fit = mle_fit(x, p=1, variant="centered")
        lam_hat = -fit.model.phi[0]
        # AR(1) closed-form reference: -log(rho1_hat)
        rho1 = empirical_autocorrelation(x, 1)[0]
        assert abs(lam_hat - (-math.log(rho1))) < 0.05
        assert abs(lam_hat - lam) < 0.2

    def test_inadmissible_init_raises(self):
        x = simulate_grid(OUModel(phi=(-0.8,), sigma2=1.0), n=50, seed=1)
        with pytest.raises(NoAdmissibleStart):
            mle_fit(x, p=1, init=OUModel(phi=(2.0,), sigma2=1.0))

    def test_unknown_variant(self):
        x = simulate_grid(OUModel(phi=(-0.8,), sigma2=1.0), n=50, seed=1)
        with pytest.raises(ValueError):
            mle_fit(x, p=1, variant="banana")

    def test_result_admissible(self):
        x = simulate_grid(OUModel(phi=EXAMPLE1_PHI, sigma2=1.0), n=300,
                          seed=3).with_policy("zero")
        fit = mle_fit(x, p=3, variant="diff", seed=1)
        assert all(k.real > 0 for k in fit.kappa())
        assert fit.model.sigma2 > 0


class TestMCE:
    def test_objective_zero_at_exact_correlations(self):
        model = OUModel(phi=EXAMPLE1_PHI, sigma2=1.0)
        cov = CovarianceModel.from_model(model)
        rho = cov.autocorrelations(40, 1.0)
        assert _mce_objective(np.array(EXAMPLE1_PHI), rho, 40, 1.0) < 1e-12

    def test_objective_monotone_in_T(self):
        # at fixed phi the norm over lags 1..T cannot decrease with T
        model = OUModel(phi=EXAMPLE1_PHI, sigma2=1.0)
        x = simulate_grid(model, n=200, seed=6).with_policy("zero")
        rho_emp = empirical_autocorrelation(x, 150)
        vals = [_mce_objective(np.array(EXAMPLE1_PHI), rho_emp[:T], T, 1.0)
                for T in (10, 50, 100, 150)]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_objective_not_above_truth(self):
        model = OUModel(phi=EXAMPLE1_PHI, sigma2=1.0)
        x = simulate_grid(model, n=300, seed=8).with_policy("zero")
        fit = mce_fit(x, p=3, T=270, starts=6, seed=0, init=model)
        rho_emp = empirical_autocorrelation(x, 270)
        truth_obj = _mce_objective(np.array(EXAMPLE1_PHI), rho_emp, 270, 1.0)
        assert fit.objective <= truth_obj + 1e-10
        assert fit.T == 270
        assert fit.method == "MCE"

    def test_sigma2_matches_gamma0(self):
        model = OUModel(phi=(-0.8,), sigma2=2.0)
        x = simulate_grid(model, n=300, seed=9).with_policy("zero")
        fit = mce_fit(x, p=1, starts=4, seed=0)
        g0_emp = empirical_autocovariance(x, 0)[0]
        unit = CovarianceModel.from_model(
            OUModel(phi=fit.model.phi, sigma2=1.0))
        assert abs(fit.model.sigma2 - g0_emp / unit.gamma0) < 1e-10

    def test_default_T(self):
        x = simulate_grid(OUModel(phi=(-0.8,), sigma2=1.0), n=100, seed=2)
        fit = mce_fit(x, p=1, starts=3, seed=0)
        assert fit.T == 90

    def test_no_starts_raises(self):
        x = simulate_grid(OUModel(phi=(-0.8,), sigma2=1.0), n=60, seed=2)
        with pytest.raises(NoAdmissibleStart):
            mce_fit(x, p=1, starts=0, seed=0)

    def test_invalid_T(self):
        x = simulate_grid(OUModel(phi=(-0.8,), sigma2=1.0), n=60, seed=2)
        with pytest.raises(ValueError):
            mce_fit(x, p=1, T=0)
