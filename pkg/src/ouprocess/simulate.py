"""Exact simulation of OU(p) samples on equally spaced grids.

Draws come from the exact Gaussian law: the Toeplitz covariance of the grid is
factorized and applied to i.i.d. standard normals (O(n^3); fine for the grid
sizes this package targets).  A fast AR(1) recursion covers the p=1 case, and
conditional (kriging-style) simulation refines a coarse path onto a finer
grid.
"""

from __future__ import annotations

import math

import numpy as np

from .covariance import CovarianceModel, chol_psd
from .dataio import TimeSeriesSample
from .kernels import OUModel


def simulate_grid(model: OUModel, n: int, tau: float = 1.0,
                  seed: int = 0) -> TimeSeriesSample:
    """Draw (x(0), x(tau), ..., x(n tau)) exactly from the OU(p) law.

    Returns n+1 values; deterministic given ``seed``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    cov = CovarianceModel.from_model(model)
    gam = cov.gamma_matrix(n, tau)
    L = chol_psd(gam, cov.gamma0)
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(n + 1)
    return TimeSeriesSample(values=model.mu + L @ z, tau=tau, t0=0.0)


def simulate_replicates(model: OUModel, n: int, tau: float, n_rep: int,
                        seed: int = 0) -> np.ndarray:
    """(n_rep, n+1) array of independent exact draws sharing one factorization."""
    cov = CovarianceModel.from_model(model)
    L = chol_psd(cov.gamma_matrix(n, tau), cov.gamma0)
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n_rep, n + 1))
    return model.mu + z @ L.T


def simulate_ou1_recursive(lam: float, sigma: float, n: int, tau: float = 1.0,
                           seed: int = 0) -> TimeSeriesSample:
    """Exact AR(1) recursion for OU(1): X_{i+1} = exp(-lam tau) X_i + Z_i.

    X_0 ~ N(0, sigma^2/(2 lam)); innovations have variance
    sigma^2/(2 lam) (1 - exp(-2 lam tau)).
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    rng = np.random.default_rng(seed)
    a = math.exp(-lam * tau)
    var0 = sigma ** 2 / (2 * lam)
    innov_sd = math.sqrt(var0 * (1 - a ** 2))
    x = np.empty(n + 1)
    x[0] = math.sqrt(var0) * rng.standard_normal()
    shocks = innov_sd * rng.standard_normal(n)
    for i in range(n):
        x[i + 1] = a * x[i] + shocks[i]
    return TimeSeriesSample(values=x, tau=tau, t0=0.0)


def refine_path(model: OUModel, coarse: TimeSeriesSample, factor: int,
                seed: int = 0) -> TimeSeriesSample:
    """Conditionally simulate the process on a grid ``factor`` times finer.

    The fine path has the exact conditional Gaussian law given the coarse
    observations (mean = best linear predictor, covariance = Schur
    complement) and interpolates the coarse values exactly at shared points.
    """
    if factor < 2:
        raise ValueError("factor must be >= 2")
    cov = CovarianceModel.from_model(model)
    n_coarse = len(coarse) - 1
    fine_tau = coarse.tau / factor
    n_fine = n_coarse * factor
    fine_times = coarse.t0 + fine_tau * np.arange(n_fine + 1)
    coarse_idx = np.arange(n_coarse + 1) * factor

    gam_full = cov.gamma_matrix(n_fine, fine_tau)
    obs = coarse_idx
    g_oo = gam_full[np.ix_(obs, obs)]
    g_fo = gam_full[:, obs]
    L_oo = chol_psd(g_oo, cov.gamma0)
    resid = coarse.values - model.mu
    # solve g_oo^{-1} via the factor
    w = np.linalg.solve(L_oo.T, np.linalg.solve(L_oo, resid))
    mean = model.mu + g_fo @ w
    B = np.linalg.solve(L_oo, g_fo.T)
    cond_cov = gam_full - B.T @ B
    # PSD sampling: conditional covariance is singular at the observed points
    evals, evecs = np.linalg.eigh(cond_cov)
    evals = np.clip(evals, 0.0, None)
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(n_fine + 1)
    path = mean + evecs @ (np.sqrt(evals) * z)
    path[obs] = coarse.values  # exact at shared points
    return TimeSeriesSample(values=path, tau=fine_tau, t0=float(fine_times[0]))
