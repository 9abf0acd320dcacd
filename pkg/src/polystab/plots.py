"""Deterministic SVG plots for sweep and decay reports."""

from __future__ import annotations

import threading

import numpy as np

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# byte-stable SVG output across runs
matplotlib.rcParams["svg.hashsalt"] = "polystab"
_SAVE_KW = {"format": "svg", "metadata": {"Date": None}}

# matplotlib is not thread-safe; experiments render under one lock
_LOCK = threading.Lock()


def resolvent_plot(profile, path, title: str = "resolvent norm sweep") -> None:
    """Log-log resolvent curve with the fitted envelope overlaid."""
    with _LOCK:
        _resolvent_plot(profile, path, title)


def _resolvent_plot(profile, path, title):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    pos = profile.xi_grid > 0
    ax.loglog(profile.xi_grid[pos], profile.norms[pos], lw=0.8,
              label="||R(i xi)||")
    if np.isfinite(profile.beta_hat):
        env = profile.envelope()
        ax.loglog(profile.xi_grid[pos], env[pos], "--", lw=1.2,
                  label=f"c (1+xi)^beta, beta={profile.beta_hat:.3f}")
    ax.set_xlabel("xi")
    ax.set_ylabel("resolvent norm")
    ax.set_title(title)
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def decay_plot(t_grid, orbit_norms, rho, constant, path,
               title: str = "orbit decay") -> None:
    """Log-log orbit norms with the envelope constant * t^(-rho)."""
    with _LOCK:
        _decay_plot(t_grid, orbit_norms, rho, constant, path, title)


def _decay_plot(t_grid, orbit_norms, rho, constant, path, title):
    t = np.asarray(t_grid, dtype=float)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label, norms in orbit_norms:
        ax.loglog(t, np.maximum(np.asarray(norms, float), 1e-300), lw=0.8,
                  label=label)
    ax.loglog(t, constant * t ** (-rho), "--", lw=1.4,
              label=f"C t^(-{rho:g}), C={constant:.3g}")
    ax.set_xlabel("t")
    ax.set_ylabel("||T(t)x|| / ||x||_Z")
    ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def ladder_plot(dims, trends, path, title: str = "ladder trend") -> None:
    """Sup-constant trend across the truncation ladder, one line per label."""
    with _LOCK:
        _ladder_plot(dims, trends, path, title)


def _ladder_plot(dims, trends, path, title):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label, values in trends:
        ax.semilogy(dims, values, "o-", label=label)
    ax.set_xlabel("dimension")
    ax.set_ylabel("sup constant")
    ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
