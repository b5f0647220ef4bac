"""Best linear prediction and interpolation with pointwise 2-sigma bands.

Given discrete equally spaced observations and a fitted OU(p) model, the
conditional Gaussian law of the continuous-time process at arbitrary target
times has mean ``mu + c(t)' Gamma^{-1} (x - mu)`` and variance
``gamma(0) - c(t)' Gamma^{-1} c(t)`` with ``c(t)_i = gamma(|t - t_i|)``.
The band is the pointwise mean +/- 2 sd.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve

from .covariance import CovarianceModel, cho_factor_psd
from .dataio import TimeSeriesSample
from .kernels import OUModel


@dataclass(frozen=True)
class PredictionBand:
    """Aligned target times, conditional mean/sd and the 2-sigma band."""

    times: np.ndarray
    mean: np.ndarray
    sd: np.ndarray

    @property
    def lo(self) -> np.ndarray:
        return self.mean - 2.0 * self.sd

    @property
    def hi(self) -> np.ndarray:
        return self.mean + 2.0 * self.sd


def predict(model: OUModel, observed: TimeSeriesSample, targets,
            window: int = None) -> PredictionBand:
    """Conditional mean and sd of x(t) at ``targets`` given the observations.

    ``window`` restricts conditioning to the last that many observations.
    Targets may interleave with and extend beyond the observation grid; at an
    observed time the prediction interpolates exactly (sd = 0).
    """
    targets = np.atleast_1d(np.asarray(targets, dtype=float))
    if targets.size == 0:
        raise ValueError("need at least one target time")
    obs_t = observed.times
    obs_x = observed.values
    if window is not None:
        if not 1 <= window <= len(obs_x):
            raise ValueError(f"window {window} outside 1..{len(obs_x)}")
        obs_t = obs_t[-window:]
        obs_x = obs_x[-window:]

    cov = CovarianceModel.from_model(model)
    gamma0 = cov.gamma0
    n = len(obs_t)
    gam = cov.gamma_matrix(n - 1, observed.tau)
    factor = cho_factor_psd(gam, gamma0)
    resid = obs_x - model.mu
    weights = cho_solve(factor, resid)

    # cross-covariance between each target and the observation grid
    lags = np.abs(targets[:, None] - obs_t[None, :])
    c = cov.gamma(lags.ravel()).reshape(lags.shape)
    mean = model.mu + c @ weights
    var = gamma0 - np.einsum("ij,ij->i", c, cho_solve(factor, c.T).T)
    var = np.clip(var, 0.0, gamma0)
    # floating-point residue at (numerically) observed times pinches to zero
    var[var < 1e-12 * gamma0] = 0.0
    return PredictionBand(times=targets, mean=mean, sd=np.sqrt(var))


def predict_series(model: OUModel, observed: TimeSeriesSample,
                   t_from: float = None, t_to: float = None,
                   points_per_step: int = 100,
                   window: int = None) -> PredictionBand:
    """Dense-grid convenience wrapper around :func:`predict`.

    Defaults span the last few observations through one step beyond the end;
    grid resolution is ``points_per_step`` points per tau.
    """
    times = observed.times
    if t_from is None:
        t_from = times[max(0, len(times) - 8)]
    if t_to is None:
        t_to = times[-1] + observed.tau
    if t_to <= t_from:
        raise ValueError(f"empty prediction range [{t_from}, {t_to}]")
    n_pts = max(2, int(round((t_to - t_from) / observed.tau * points_per_step)) + 1)
    grid = np.linspace(t_from, t_to, n_pts)
    return predict(model, observed, grid, window=window)
