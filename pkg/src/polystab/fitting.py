"""Envelope fits shared by the resolvent and semigroup analyses.

Two flavors are used:

* a minimax dominating line (one-sided Chebyshev) for envelopes that must
  hug smooth data, e.g. log ||T(t)|| <= log M + omega * t;
* a least-squares slope through the local maxima of a spiky profile,
  lifted afterwards so the returned envelope dominates every sample.
"""

from __future__ import annotations

import numpy as np

from .errors import InsufficientData


def dominating_line(u, y, slope_lo=None, slope_hi=None, tol: float = 1e-12):
    """Minimax dominating line for samples (u, y).

    Returns (slope, intercept, residual) minimizing the worst overshoot
    max_j (slope*u_j + intercept - y_j) subject to the line lying above
    every sample.  The objective range(slope) = max_j r_j - min_j r_j with
    r_j = y_j - slope*u_j is convex piecewise-linear; golden-section search
    locates the minimum, and the intercept follows exactly.
    """
    u = np.asarray(u, dtype=float)
    y = np.asarray(y, dtype=float)
    if u.size < 2:
        raise InsufficientData("need at least two samples for a line fit")
    if np.ptp(u) == 0.0:
        c = float(y.max())
        return 0.0, c, float(c - y.min())

    spread = np.ptp(y) / np.ptp(u)
    if slope_lo is None:
        slope_lo = -abs(spread) - 1.0
    if slope_hi is None:
        slope_hi = abs(spread) + 1.0

    def objective(s):
        r = y - s * u
        return r.max() - r.min()

    lo, hi = float(slope_lo), float(slope_hi)
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c1 = b - invphi * (b - a)
    c2 = a + invphi * (b - a)
    f1, f2 = objective(c1), objective(c2)
    while b - a > tol * max(1.0, abs(a), abs(b)):
        if f1 <= f2:
            b, c2, f2 = c2, c1, f1
            c1 = b - invphi * (b - a)
            f1 = objective(c1)
        else:
            a, c1, f1 = c1, c2, f2
            c2 = a + invphi * (b - a)
            f2 = objective(c2)
    slope = 0.5 * (a + b)
    r = y - slope * u
    intercept = float(r.max())
    residual = float(r.max() - r.min())
    return float(slope), intercept, residual


def slope_then_dominate(u, y, fit_mask=None):
    """Least-squares slope on a subset, intercept lifted for domination.

    Fits slope through (u[fit_mask], y[fit_mask]) by least squares, then
    raises the intercept so the line dominates *all* samples.  Returns
    (slope, intercept, residual) where residual is the worst slack over
    the fitted subset.
    """
    u = np.asarray(u, dtype=float)
    y = np.asarray(y, dtype=float)
    if fit_mask is None:
        uf, yf = u, y
    else:
        uf, yf = u[fit_mask], y[fit_mask]
    if uf.size < 2 or np.ptp(uf) == 0.0:
        slope = 0.0
    else:
        um = uf - uf.mean()
        slope = float(um @ (yf - yf.mean()) / (um @ um))
    intercept = float(np.max(y - slope * u))
    residual = float(np.max(intercept + slope * uf - yf)) if uf.size else 0.0
    return slope, intercept, residual


def local_maxima_mask(values) -> np.ndarray:
    """Boolean mask of strict interior local maxima of a 1-d sequence."""
    v = np.asarray(values, dtype=float)
    mask = np.zeros(v.shape, dtype=bool)
    if v.size >= 3:
        interior = (v[1:-1] > v[:-2]) & (v[1:-1] > v[2:])
        mask[1:-1] = interior
    return mask
