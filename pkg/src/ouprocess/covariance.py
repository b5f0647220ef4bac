"""Closed-form autocovariance of OU(p) processes and its Toeplitz matrices.

The stationary autocovariance gamma(t) of a process with an
exponential-polynomial kernel is a finite double sum over kernel-term pairs of
cross-covariances that have a closed form.  A slow adaptive-quadrature oracle
of the same quantity lives here too, used only by tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve, toeplitz

from .exceptions import NotPositiveDefinite, QuadratureNonConvergence
from .kernels import ExponentialPolynomialKernel, OUModel, kernel_from_model

# Jitter escalation ladder (multiples of gamma(0)) before giving up on Cholesky.
CHOL_JITTERS = (0.0, 1e-12, 1e-10, 1e-8)


def gamma_cross(k1, i1, k2, i2, sigma, t):
    """Cross-covariance E[xi^(i1)_{k1}(t) conj(xi^(i2)_{k2}(0))] for t >= 0.

    Closed form:
        sigma^2 (-k1)^i1 (-conj(k2))^i2 exp(-k1 t) / i2!
            * sum_{j=0}^{i1} t^j (i1+i2-j)! / (j! (i1-j)! (k1+conj(k2))^(i1+i2-j+1))

    Vectorized over ``t``.
    """
    k1 = complex(k1)
    k2c = np.conj(complex(k2))
    t = np.asarray(t, dtype=float)
    s = k1 + k2c
    total = np.zeros(t.shape, dtype=complex)
    for j in range(i1 + 1):
        total += (t ** j * math.factorial(i1 + i2 - j)
                  / (math.factorial(j) * math.factorial(i1 - j)
                     * s ** (i1 + i2 - j + 1)))
    pref = sigma ** 2 * (-k1) ** i1 * (-k2c) ** i2 / math.factorial(i2)
    return pref * np.exp(-k1 * t) * total


@dataclass
class CovarianceModel:
    """Callable stationary autocovariance gamma(t) of an OU(p) process.

    Built from a kernel; gamma is even in t and bounded by gamma(0).  Integer
    lag values are cached per spacing because likelihood loops hit the same
    grid repeatedly.
    """

    kernel: ExponentialPolynomialKernel
    mu: float = 0.0
    _lag_cache: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_model(cls, model: OUModel, tol=None) -> "CovarianceModel":
        return cls(kernel=kernel_from_model(model, tol=tol), mu=model.mu)

    @property
    def gamma0(self) -> float:
        return self.gamma(0.0)

    def gamma(self, t):
        """gamma(t), even in t; imaginary residue from complex terms discarded."""
        t = np.abs(np.asarray(t, dtype=float))
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        total = np.zeros(t.shape, dtype=complex)
        term_peak = 0.0
        sig = self.kernel.sigma
        for ka, ja, ca in self.kernel.terms:
            for kb, jb, cb in self.kernel.terms:
                contrib = ca * np.conj(cb) * gamma_cross(ka, ja, kb, jb, sig, t)
                total += contrib
                term_peak = max(term_peak, float(np.max(np.abs(contrib))))
        # gamma(t) itself can vanish at zero crossings; judge the imaginary
        # residue against the largest contributing term instead
        scale = max(term_peak, 1e-300)
        if np.max(np.abs(total.imag)) > 1e-8 * scale:
            raise ValueError("covariance has non-negligible imaginary part; "
                             "kernel is not conjugation-closed")
        out = total.real
        return float(out[0]) if scalar else out

    def __call__(self, t):
        return self.gamma(t)

    def lag_values(self, maxlag: int, tau: float) -> np.ndarray:
        """gamma at lags 0..maxlag spaced by tau (cached)."""
        key = (round(float(tau), 15),)
        cached = self._lag_cache.get(key)
        if cached is None or len(cached) <= maxlag:
            cached = self.gamma(np.arange(maxlag + 1) * tau)
            self._lag_cache[key] = cached
        return cached[: maxlag + 1]

    def autocorrelations(self, T: int, tau: float) -> np.ndarray:
        """rho_i = gamma(i tau)/gamma(0) for i = 1..T."""
        g = self.lag_values(T, tau)
        return g[1:] / g[0]

    def gamma_matrix(self, n: int, tau: float = 1.0) -> np.ndarray:
        """(n+1) x (n+1) Toeplitz matrix with entries gamma(|h-i| tau)."""
        return toeplitz(self.lag_values(n, tau))

    def diff_matrix(self, n: int, tau: float = 1.0) -> np.ndarray:
        """n x n covariance of first differences of the sampled series.

        Entries 2 gamma(|h-i|) - gamma(|h-i|+1) - gamma(|h-i|-1); the diagonal
        reduces to 2 (gamma(0) - gamma(1)).
        """
        g = self.lag_values(n + 1, tau)
        lags = np.arange(n)
        row = 2 * g[lags] - g[lags + 1] - g[np.abs(lags - 1)]
        return toeplitz(row)


def chol_psd(mat: np.ndarray, scale: float):
    """Cholesky factor with diagonal-jitter escalation; raises NotPositiveDefinite."""
    n = mat.shape[0]
    for jit in CHOL_JITTERS:
        try:
            return np.linalg.cholesky(mat + jit * scale * np.eye(n))
        except np.linalg.LinAlgError:
            continue
    raise NotPositiveDefinite(
        f"covariance matrix of size {n} is not positive definite "
        f"(jitter up to {CHOL_JITTERS[-1]:g} * gamma(0) tried)")


def cho_factor_psd(mat: np.ndarray, scale: float):
    """scipy cho_factor with the same jitter ladder as chol_psd."""
    n = mat.shape[0]
    for jit in CHOL_JITTERS:
        try:
            return cho_factor(mat + jit * scale * np.eye(n), lower=True)
        except np.linalg.LinAlgError:
            continue
    raise NotPositiveDefinite(
        f"covariance matrix of size {n} is not positive definite")


def oracle_gamma_quadrature(kernel: ExponentialPolynomialKernel, t: float,
                            rtol=1e-9) -> float:
    """Quadrature oracle: gamma(t) = int_0^inf f(t+u) conj(f(u)) du.

    Composite Gauss-Legendre on panels sized to the kernel's oscillation
    period and decay constant, with a lower-order pass as the error estimate.
    Exists solely to verify the closed form.  Truncates where the kernel
    envelope has decayed below 1e-14 of its scale.
    """
    t = float(abs(t))
    lam = kernel.min_decay()
    max_deg = max(j for _, j, _ in kernel.terms)
    max_osc = max((abs(k.imag) for k, _, _ in kernel.terms), default=0.0)
    # envelope exp(-lam u) u^deg: 14 decades of decay plus polynomial slack
    upper = (14 * math.log(10) + 5 * (max_deg + 1)) / lam

    # geometrically graded panels: fine near 0 to resolve the fastest-decaying
    # component, growing toward the tail where only the slowest one survives;
    # a 32-node rule then handles a few oscillation periods / decay constants
    # per panel
    lam_max = max(k.real for k, _, _ in kernel.terms)
    w = min(0.5 / lam_max, upper / 50)
    w_max = min(3.0 / lam, upper / 10)
    if max_osc > 0:
        w = min(w, math.pi / max_osc)
        w_max = min(w_max, 2 * math.pi / max_osc)
    edges = [0.0]
    while edges[-1] < upper:
        edges.append(edges[-1] + w)
        w = min(w * 1.2, w_max)
    edges = np.asarray(edges)
    n_seg = len(edges) - 1
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * np.diff(edges)

    panel_sums = {}
    for order in (16, 32):
        nodes, weights = np.polynomial.legendre.leggauss(order)
        u = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
        fu = kernel(t + u) * np.conj(kernel(u))
        panel_sums[order] = half * (fu.reshape(n_seg, order) @ weights)
    val = complex(panel_sums[32].sum())
    err = abs(val - complex(panel_sums[16].sum()))
    # gamma(t) may sit near a zero crossing; judge the error against the
    # magnitude actually integrated, not only the (possibly tiny) result
    scale = max(abs(val), float(np.abs(panel_sums[32]).sum()), 1e-300)
    if not np.isfinite(val) or err > max(rtol * scale, 1e-14):
        raise QuadratureNonConvergence(
            f"quadrature error {err:g} too large for gamma({t})")
    if abs(val.imag) > 1e-8 * scale:
        raise QuadratureNonConvergence(
            f"imaginary residue {val.imag:g} in quadrature for gamma({t})")
    return val.real
