"""Best linear prediction: interpolation, closed forms, band properties."""

import math

import numpy as np
import pytest

from ouprocess import (CovarianceModel, OUModel, TimeSeriesSample,
                       phi_from_kappa, predict, predict_series, simulate_grid)

EXAMPLE1_PHI = tuple(phi_from_kappa([0.9, 0.2 + 0.4j, 0.2 - 0.4j]))


def example1_setup(n=30, seed=2, mu=0.0):
    model = OUModel(phi=EXAMPLE1_PHI, sigma2=1.0, mu=mu)
    return model, simulate_grid(model, n=n, seed=seed)


class TestInterpolation:
    def test_exact_at_observed_times(self):
        model, obs = example1_setup()
        band = predict(model, obs, obs.times)
        np.testing.assert_allclose(band.mean, obs.values, atol=1e-8)
        np.testing.assert_allclose(band.sd, 0.0, atol=1e-8)

    def test_band_collapses_at_observations(self):
        model, obs = example1_setup()
        band = predict(model, obs, obs.times[5])
        assert band.lo[0] == pytest.approx(band.hi[0])


class TestClosedFormOU1:
    def test_single_conditioning_point(self):
        # conditioning on one value: mean mu + a (x - mu), var gamma0 (1 - a^2)
        lam, mu = 0.7, 3.0
        model = OUModel(phi=(-lam,), sigma2=1.0, mu=mu)
        g0 = 1.0 / (2 * lam)
        obs = TimeSeriesSample(values=np.array([4.0, 5.0]), tau=1.0)
        for dt in (0.3, 1.0, 2.5):
            band = predict(model, obs, obs.times[-1] + dt, window=1)
            a = math.exp(-lam * dt)
            assert abs(band.mean[0] - (mu + a * (5.0 - mu))) < 1e-10
            assert abs(band.sd[0] ** 2 - g0 * (1 - a ** 2)) < 1e-10

    def test_markov_property(self):
        # OU(1) is Markov: conditioning on all past equals conditioning on
        # the last value for forward prediction
        lam = 0.5
        model = OUModel(phi=(-lam,), sigma2=1.0)
        obs = simulate_grid(model, n=20, seed=7)
        t_new = obs.times[-1] + 0.8
        full = predict(model, obs, t_new)
        last = predict(model, obs, t_new, window=1)
        assert abs(full.mean[0] - last.mean[0]) < 1e-9
        assert abs(full.sd[0] - last.sd[0]) < 1e-9


class TestBandProperties:
    def test_variance_within_bounds(self):
        model, obs = example1_setup()
        cov = CovarianceModel.from_model(model)
        rng = np.random.default_rng(3)
        targets = rng.uniform(-5, obs.times[-1] + 10, size=60)
        band = predict(model, obs, targets)
        assert np.all(band.sd >= 0)
        assert np.all(band.sd ** 2 <= cov.gamma0 + 1e-12)

    def test_mixing_limit(self):
        # far from the data the prediction reverts to mu with full variance
        model, obs = example1_setup(mu=2.0)
        cov = CovarianceModel.from_model(model)
        band = predict(model, obs, obs.times[-1] + 200.0)
        assert abs(band.mean[0] - 2.0) < 1e-8
        assert abs(band.sd[0] - math.sqrt(cov.gamma0)) < 1e-8

    def test_affine_equivariance(self):
        # shifting model mean and data by c shifts the mean, keeps the sd
        model, obs = example1_setup()
        c = 7.0
        shifted_model = OUModel(phi=model.phi, sigma2=model.sigma2, mu=c)
        shifted_obs = TimeSeriesSample(values=obs.values + c, tau=obs.tau,
                                       t0=obs.t0)
        targets = np.array([3.3, 17.7, 31.2])
        a = predict(model, obs, targets)
        b = predict(shifted_model, shifted_obs, targets)
        np.testing.assert_allclose(b.mean - a.mean, c, atol=1e-9)
        np.testing.assert_allclose(b.sd, a.sd, atol=1e-11)

    def test_sd_monotone_beyond_data_ou1(self):
        model = OUModel(phi=(-0.6,), sigma2=1.0)
        obs = simulate_grid(model, n=15, seed=5)
        t = obs.times[-1] + np.linspace(0.1, 6.0, 40)
        band = predict(model, obs, t)
        assert np.all(np.diff(band.sd) >= -1e-12)

    def test_window_validation(self):
        model, obs = example1_setup()
        with pytest.raises(ValueError):
            predict(model, obs, [1.0], window=0)
        with pytest.raises(ValueError):
            predict(model, obs, [1.0], window=len(obs) + 1)

    def test_empty_targets(self):
        model, obs = example1_setup()
        with pytest.raises(ValueError):
            predict(model, obs, np.array([]))


class TestPredictSeries:
    def test_grid_and_pinch(self):
        model, obs = example1_setup()
        band = predict_series(model, obs, t_from=obs.times[-3],
                              t_to=obs.times[-1] + 1.0, points_per_step=50)
        assert band.times[0] == pytest.approx(obs.times[-3])
        assert band.times[-1] == pytest.approx(obs.times[-1] + 1.0)
        # sd pinches to zero at observed times inside the range...
        for t_obs in obs.times[-3:]:
            idx = int(np.argmin(np.abs(band.times - t_obs)))
            assert band.sd[idx] < 1e-6
        # ...and is strictly positive between them
        mid_idx = int(np.argmin(np.abs(band.times
                                       - (obs.times[-2] + obs.tau / 2))))
        assert band.sd[mid_idx] > 1e-3

    def test_default_range(self):
        model, obs = example1_setup()
        band = predict_series(model, obs)
        assert band.times[-1] == pytest.approx(obs.times[-1] + obs.tau)

    def test_empty_range_rejected(self):
        model, obs = example1_setup()
        with pytest.raises(ValueError):
            predict_series(model, obs, t_from=5.0, t_to=5.0)

    def test_consistent_with_pointwise(self):
        model, obs = example1_setup()
        band = predict_series(model, obs, t_from=10.0, t_to=12.0,
                              points_per_step=10)
        direct = predict(model, obs, band.times)
        np.testing.assert_allclose(band.mean, direct.mean, atol=1e-12)
        np.testing.assert_allclose(band.sd, direct.sd, atol=1e-12)
