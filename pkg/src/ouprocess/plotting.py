"""Figure rendering for the CLI report paths (matplotlib, file output only)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_series(path, sample):
    fig, ax = plt.subplots(figsize=(7, 3.2))
    ax.plot(sample.times, sample.values, lw=0.9)
    ax.set_xlabel("t")
    ax.set_ylabel("x(t)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_acf(path, lags, empirical, model_gamma, tau):
    """Empirical autocovariances (circles) against the fitted model curve."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(lags * tau, empirical, "o", mfc="none", color="k",
            label="empirical")
    fine = np.linspace(0, lags[-1] * tau, 40 * len(lags))
    ax.plot(fine, model_gamma(fine), "-", color="tab:blue", label="model")
    ax.axhline(0.0, color="0.7", lw=0.6)
    ax.set_xlabel("lag")
    ax.set_ylabel("autocovariance")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_prediction(path, band, observed):
    fig, ax = plt.subplots(figsize=(7, 4))
    mask = (observed.times >= band.times[0] - observed.tau) \
        & (observed.times <= band.times[-1] + observed.tau)
    ax.plot(observed.times[mask], observed.values[mask], "o", mfc="none",
            color="k", label="observed")
    ax.plot(band.times, band.mean, "--", color="tab:blue", label="prediction")
    ax.plot(band.times, band.lo, ":", color="tab:blue", lw=0.8)
    ax.plot(band.times, band.hi, ":", color="tab:blue", lw=0.8,
            label=r"2$\sigma$ band")
    ax.set_xlabel("t")
    ax.set_ylabel("x(t)")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_gap_surface(path, lam1, lam2, gap):
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    pcm = ax.pcolormesh(lam1, lam2, gap.T, shading="nearest", cmap="viridis")
    fig.colorbar(pcm, ax=ax, label="lag-3 correlation gap")
    ax.set_xlabel(r"$\lambda_1$")
    ax.set_ylabel(r"$\lambda_2$")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_correlation_table(path, lags, ou_rho, ar_rho):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.plot(lags, ou_rho, "o", mfc="none", color="k", label="OU(2)")
    ax.plot(lags, ar_rho, "x", color="tab:red", label="AR(2)")
    ax.axhline(0.0, color="0.7", lw=0.6)
    ax.set_xlabel("lag")
    ax.set_ylabel("autocorrelation")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
