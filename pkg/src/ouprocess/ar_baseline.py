"""AR(p) baselines and the OU(2)-vs-AR(2) third-correlation separation.

A sampled OU(1) is exactly an AR(1), but for order two the correlation
structures part ways: matching the first two autocorrelations of an OU(2)
with an AR(2) leaves a nonzero gap at lag three.  This module computes that
gap over parameter grids and provides a plain Yule-Walker AR fit as the
discrete-time reference model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataio import TimeSeriesSample
from .estimate import empirical_autocovariance
from .exceptions import AdmissibilityViolation, SingularSystem

# Switch to the analytic repeated-root branch below this rate separation.
REPEATED_ROOT_TOL = 1e-6


@dataclass(frozen=True)
class ARModel:
    """Stationary AR(p): (1 - sum phi_j B^j) x_t = noise, noise_var = Var."""

    coeffs: tuple
    noise_var: float

    def __post_init__(self):
        object.__setattr__(self, "coeffs",
                           tuple(float(c) for c in self.coeffs))
        if self.noise_var <= 0:
            raise ValueError(f"noise_var must be positive, got {self.noise_var}")
        if max(abs(r) for r in np.roots(
                np.concatenate(([1.0], -np.asarray(self.coeffs))))) >= 1:
            raise ValueError("AR coefficients are not stationary "
                             "(companion spectral radius >= 1)")

    @property
    def p(self) -> int:
        return len(self.coeffs)


def yule_walker_fit(x: TimeSeriesSample, p: int) -> ARModel:
    """Fit AR(p) from the empirical autocorrelations (1/n divisor convention)."""
    if p >= len(x):
        raise ValueError(f"order p={p} must be < series length {len(x)}")
    g = empirical_autocovariance(x, p)
    R = np.empty((p, p))
    for i in range(p):
        for j in range(p):
            R[i, j] = g[abs(i - j)]
    try:
        coeffs = np.linalg.solve(R, g[1:])
    except np.linalg.LinAlgError as e:
        raise SingularSystem(f"Yule-Walker system singular for p={p}") from e
    noise_var = float(g[0] - coeffs @ g[1:])
    if noise_var <= 0:
        raise SingularSystem("nonpositive residual variance from Yule-Walker")
    return ARModel(coeffs=tuple(coeffs), noise_var=noise_var)


def ar2_r3(r1: float, r2: float) -> float:
    """Third autocorrelation of the AR(2) with autocorrelations r1, r2.

    r3 = r1/(1 - r1^2) * (2 r2 - r1^2 - r2^2), valid on the admissible
    region -1 < r1 < 1, 2 r1^2 - 1 <= r2 <= 1.
    """
    if not -1 < r1 < 1:
        raise AdmissibilityViolation(f"r1={r1} outside (-1, 1)")
    if not 2 * r1 ** 2 - 1 <= r2 <= 1:
        raise AdmissibilityViolation(
            f"(r1, r2)=({r1}, {r2}) outside the AR(2) admissible region")
    return r1 / (1 - r1 ** 2) * (2 * r2 - r1 ** 2 - r2 ** 2)


def ou2_rho(lambda1: float, lambda2: float, h: int, tau: float = 1.0) -> float:
    """Lag-h autocorrelation of the real OU(2) with rates lambda1, lambda2.

    (lambda2 e^{-lambda2 h tau} - lambda1 e^{-lambda1 h tau}) / (lambda2 - lambda1),
    with the analytic limit (1 - lambda h tau) e^{-lambda h tau} on the
    repeated-root branch (avoids cancellation near lambda1 = lambda2).
    """
    if lambda1 <= 0 or lambda2 <= 0:
        raise ValueError("rates must be positive")
    t = h * tau
    if abs(lambda1 - lambda2) < REPEATED_ROOT_TOL * max(lambda1, lambda2):
        lam = 0.5 * (lambda1 + lambda2)
        return (1 - lam * t) * math.exp(-lam * t)
    return (lambda2 * math.exp(-lambda2 * t) - lambda1 * math.exp(-lambda1 * t)) \
        / (lambda2 - lambda1)


def lemma_gap(lambda1: float, lambda2: float) -> float:
    """r3 - rho3: AR(2) matched on the first two OU(2) correlations vs the OU(2).

    tau is fixed at 1; rescaling the rates reproduces any other spacing.
    """
    rho1 = ou2_rho(lambda1, lambda2, 1)
    rho2 = ou2_rho(lambda1, lambda2, 2)
    rho3 = ou2_rho(lambda1, lambda2, 3)
    return ar2_r3(rho1, rho2) - rho3


def ar2_correlations(r1: float, r2: float, maxlag: int) -> np.ndarray:
    """AR(2) autocorrelations at lags 1..maxlag matching (r1, r2).

    Uses the Yule-Walker recursion r_h = a1 r_{h-1} + a2 r_{h-2} with
    a1 = r1 (1 - r2)/(1 - r1^2), a2 = (r2 - r1^2)/(1 - r1^2).
    """
    if not -1 < r1 < 1:
        raise AdmissibilityViolation(f"r1={r1} outside (-1, 1)")
    a1 = r1 * (1 - r2) / (1 - r1 ** 2)
    a2 = (r2 - r1 ** 2) / (1 - r1 ** 2)
    rho = np.empty(maxlag + 1)
    rho[0] = 1.0
    if maxlag >= 1:
        rho[1] = r1
    for h in range(2, maxlag + 1):
        rho[h] = a1 * rho[h - 1] + a2 * rho[h - 2]
    return rho[1:]


def lemma_gap_grid(lam_max: float = 3.0, step: float = 0.02):
    """Grid sweep of the lag-3 gap over (0, lam_max]^2.

    Returns (lambda1 grid, lambda2 grid, gap matrix) for the comparison table.
    """
    lams = np.arange(step, lam_max + step / 2, step)
    gap = np.empty((len(lams), len(lams)))
    for i, l1 in enumerate(lams):
        for j, l2 in enumerate(lams):
            gap[i, j] = lemma_gap(l1, l2)
    return lams, lams, gap
