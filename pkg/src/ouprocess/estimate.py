"""Parameter estimation for OU(p): maximum likelihood and matching correlations.

Two Gaussian likelihoods are available: the differenced one (covariance V of
first differences; the unknown mean cancels) and the centered one (covariance
Gamma of the observations themselves).  The matching-correlations estimator
(MCE) minimizes the euclidean distance between empirical and model
autocorrelations up to a horizon T; it doubles as the default starting point
for the likelihood search.

The noise variance sigma^2 enters the covariance as a pure scale factor, so it
is profiled out in closed form and the numerical search runs over phi only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve
from scipy.optimize import minimize

from .covariance import CovarianceModel, cho_factor_psd
from .dataio import TimeSeriesSample
from .exceptions import (NoAdmissibleStart, NotPositiveDefinite,
                         StationarityViolation)
from .kernels import OUModel, phi_from_kappa, random_admissible_kappa

# Objective value returned outside the admissible region (optimizer retreats).
PENALTY = 1e10

SIMPLEX_XATOL = 1e-8
SIMPLEX_FATOL = 1e-10
MAX_EVAL_PER_START = 2000


@dataclass(frozen=True)
class FitResult:
    """Outcome of a fit: the estimated model plus optimizer diagnostics."""

    model: OUModel
    method: str            # "MLE-diff" | "MLE-centered" | "MCE"
    objective: float       # final log-likelihood or matching norm
    T: int                 # MCE horizon; 0 for MLE
    iterations: int
    converged: bool

    def kappa(self):
        return self.model.kappa()


def empirical_autocovariance(x: TimeSeriesSample, maxlag: int) -> np.ndarray:
    """gamma_e at lags 0..maxlag with divisor n at every lag (biased form).

    The mean policy of the sample is applied before summing.
    """
    vals = x.centered()
    n = len(vals)
    if maxlag >= n:
        raise ValueError(f"maxlag {maxlag} must be < series length {n}")
    g = np.empty(maxlag + 1)
    for h in range(maxlag + 1):
        g[h] = np.dot(vals[: n - h], vals[h:]) / n
    return g


def empirical_autocorrelation(x: TimeSeriesSample, maxlag: int) -> np.ndarray:
    """rho_e at lags 1..maxlag."""
    g = empirical_autocovariance(x, maxlag)
    return g[1:] / g[0]


def gaussian_loglik(resid: np.ndarray, cov_mat: np.ndarray,
                    scale: float) -> float:
    """log N(resid; 0, cov_mat) via Cholesky; ``scale`` sets the jitter ladder."""
    m = len(resid)
    factor = cho_factor_psd(cov_mat, scale)
    half_logdet = float(np.sum(np.log(np.diag(factor[0]))))
    quad = float(resid @ cho_solve(factor, resid))
    return -0.5 * m * math.log(2 * math.pi) - half_logdet - 0.5 * quad


def log_likelihood_diff(x: TimeSeriesSample, model: OUModel) -> float:
    """Gaussian log-likelihood of the first differences under ``model``.

    Returns -inf when the covariance is numerically degenerate, so the value
    is safe to hand to an optimizer.
    """
    dx = np.diff(x.values)
    try:
        cov = CovarianceModel.from_model(model)
        V = model.sigma2 * _unit_cov(model).diff_matrix(len(dx), x.tau)
        return gaussian_loglik(dx, V, cov.gamma0)
    except (StationarityViolation, NotPositiveDefinite):
        return -math.inf


def log_likelihood_centered(x: TimeSeriesSample, model: OUModel) -> float:
    """Gaussian log-likelihood of the (mean-policy-centered) observations."""
    vals = x.centered()
    try:
        cov = CovarianceModel.from_model(model)
        gam = model.sigma2 * _unit_cov(model).gamma_matrix(len(vals) - 1, x.tau)
        return gaussian_loglik(vals, gam, cov.gamma0)
    except (StationarityViolation, NotPositiveDefinite):
        return -math.inf


def _unit_cov(model: OUModel) -> CovarianceModel:
    """Covariance model at sigma^2 = 1 (gamma is linear in sigma^2)."""
    return CovarianceModel.from_model(
        OUModel(phi=model.phi, sigma2=1.0, mu=model.mu))


def _profiled_negloglik(phi: np.ndarray, resid: np.ndarray, tau: float,
                        variant: str):
    """Negative profile log-likelihood over phi, with sigma^2 maximized out.

    Returns (value, sigma2_hat); PENALTY outside the admissible region.
    """
    m = len(resid)
    try:
        unit = CovarianceModel.from_model(OUModel(phi=tuple(phi), sigma2=1.0))
        if variant == "diff":
            mat = unit.diff_matrix(m, tau)
        else:
            mat = unit.gamma_matrix(m - 1, tau)
        factor = cho_factor_psd(mat, unit.gamma0)
    except (StationarityViolation, NotPositiveDefinite, ValueError):
        return PENALTY, None
    half_logdet = float(np.sum(np.log(np.diag(factor[0]))))
    quad = float(resid @ cho_solve(factor, resid))
    if quad <= 0:
        return PENALTY, None
    sigma2 = quad / m
    nll = 0.5 * m * (math.log(2 * math.pi) + 1.0 + math.log(sigma2)) \
        + half_logdet
    return nll, sigma2


def mle_fit(x: TimeSeriesSample, p: int, variant: str = "diff",
            init: OUModel = None, max_eval: int = MAX_EVAL_PER_START,
            seed: int = 0) -> FitResult:
    """Maximum likelihood fit of an OU(p) model by derivative-free simplex.

    ``variant`` selects the differenced ("diff") or centered ("centered")
    likelihood.  Without ``init`` the matching-correlations estimate is used
    as the starting point.
    """
    if variant not in ("diff", "centered"):
        raise ValueError(f"unknown variant {variant!r}")
    if variant == "diff":
        resid = np.diff(x.values)
    else:
        resid = x.centered()

    if init is None:
        init = mce_fit(x, p, seed=seed).model
    phi0 = np.asarray(init.phi, dtype=float)
    if _profiled_negloglik(phi0, resid, x.tau, variant)[0] >= PENALTY:
        raise NoAdmissibleStart(
            f"starting phi {phi0} is not admissible for the {variant} likelihood")

    res = minimize(lambda v: _profiled_negloglik(v, resid, x.tau, variant)[0],
                   phi0, method="Nelder-Mead",
                   options={"xatol": SIMPLEX_XATOL, "fatol": SIMPLEX_FATOL,
                            "maxfev": max_eval})
    value, sigma2 = _profiled_negloglik(res.x, resid, x.tau, variant)
    if sigma2 is None:  # simplex ended on the boundary; fall back to start
        res.x, (value, sigma2) = phi0, _profiled_negloglik(
            phi0, resid, x.tau, variant)
    model = OUModel(phi=tuple(res.x), sigma2=sigma2, mu=x.mean_value())
    return FitResult(model=model, method=f"MLE-{variant}", objective=-value,
                     T=0, iterations=int(res.nfev), converged=bool(res.success))


def _mce_objective(phi: np.ndarray, rho_emp: np.ndarray, T: int,
                   tau: float) -> float:
    try:
        cov = CovarianceModel.from_model(OUModel(phi=tuple(phi), sigma2=1.0))
        rho = cov.autocorrelations(T, tau)
    except (StationarityViolation, ValueError):
        return PENALTY
    return float(np.linalg.norm(rho_emp - rho))


def mce_fit(x: TimeSeriesSample, p: int, T: int = None, starts: int = 20,
            seed: int = 0, init: OUModel = None) -> FitResult:
    """Matching-correlations fit: minimize ||rho_e^(T) - rho_model^(T)||.

    T defaults to floor(0.9 n) for n+1 observations.  Random admissible
    starting points (log-uniform decay rates, optional conjugate pairs) guard
    against the optimizer sticking at the admissibility boundary.  sigma^2 is
    set afterwards by matching gamma(0).
    """
    n = len(x) - 1
    if T is None:
        T = int(0.9 * n)
    T = min(T, len(x) - 1)
    if T < 1:
        raise ValueError("T must be >= 1")
    g_emp = empirical_autocovariance(x, T)
    rho_emp = g_emp[1:] / g_emp[0]

    rng = np.random.default_rng(seed)
    start_phis = []
    if init is not None:
        start_phis.append(np.asarray(init.phi, dtype=float))
    while len(start_phis) < starts + (init is not None):
        kap = random_admissible_kappa(rng, p)
        start_phis.append(phi_from_kappa(kap))

    best = None
    total_evals = 0
    any_converged = False
    for phi0 in start_phis:
        if _mce_objective(phi0, rho_emp, T, x.tau) >= PENALTY:
            continue
        res = minimize(lambda v: _mce_objective(v, rho_emp, T, x.tau),
                       phi0, method="Nelder-Mead",
                       options={"xatol": SIMPLEX_XATOL, "fatol": SIMPLEX_FATOL,
                                "maxfev": MAX_EVAL_PER_START})
        total_evals += int(res.nfev)
        obj = _mce_objective(res.x, rho_emp, T, x.tau)
        if obj < PENALTY and (best is None or obj < best[1]):
            best = (res.x.copy(), obj)
            any_converged = any_converged or bool(res.success)
    if best is None:
        raise NoAdmissibleStart(
            f"none of {starts} starting points was admissible for p={p}")

    phi_hat, obj = best
    unit = CovarianceModel.from_model(OUModel(phi=tuple(phi_hat), sigma2=1.0))
    sigma2 = float(g_emp[0] / unit.gamma0)
    model = OUModel(phi=tuple(phi_hat), sigma2=sigma2, mu=x.mean_value())
    return FitResult(model=model, method="MCE", objective=obj, T=T,
                     iterations=total_evals, converged=any_converged)
