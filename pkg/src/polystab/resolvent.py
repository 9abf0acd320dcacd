"""Resolvent norms along the imaginary axis and over the right half-plane.

Measures ||R(i xi, A)|| on an adaptive frequency grid, fits the polynomial
growth envelope c*(1+|xi|)^beta, verifies the envelope over the half-plane,
checks uniform bounds for resolvent powers against interpolation norms,
and evaluates the comparison table of decay exponents.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import fitting, zoo
from .errors import DomainError, InsufficientData
from .zoo import GeneratorModel


@dataclass
class ResolventProfile:
    """Frequency grid, resolvent norms and the fitted growth envelope.

    ``beta_hat``/``c_hat`` are NaN when the grid is too small to fit.
    ``norms_lower`` carries the Monte-Carlo lower bounds when the ambient
    norm only admits an interval certificate (p not in {1, 2, inf}).
    """

    xi_grid: np.ndarray
    norms: np.ndarray
    beta_hat: float
    c_hat: float
    fit_residual: float
    norms_lower: np.ndarray | None = None

    def envelope(self, xi=None) -> np.ndarray:
        xi = self.xi_grid if xi is None else np.asarray(xi, dtype=float)
        return self.c_hat * (1.0 + np.abs(xi)) ** self.beta_hat

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["xi", "norm", "envelope"])
            env = self.envelope()
            for x, nv, ev in zip(self.xi_grid, self.norms, env):
                writer.writerow([repr(float(x)), repr(float(nv)), repr(float(ev))])


def default_grid(
    lo: float = 0.1,
    hi: float = 1e4,
    log_points: int = 256,
    linear_halfwidth: float = 2.0,
    linear_points: int = 81,
) -> np.ndarray:
    """Log-spaced magnitudes lo..hi on both sides plus a linear core."""
    mags = np.geomspace(lo, hi, log_points)
    lin = np.linspace(-linear_halfwidth, linear_halfwidth, linear_points)
    grid = np.unique(np.concatenate([-mags[::-1], lin, mags]))
    return grid


def sweep_imaginary_axis(
    model: GeneratorModel,
    grid=None,
    adaptive: bool | None = None,
    rel_gap: float = 0.02,
    max_rounds: int = 64,
    max_points: int = 20000,
) -> ResolventProfile:
    """Resolvent norms along i*R with adaptive peak refinement.

    With no explicit grid the default grid is used and local maxima of the
    norm curve are refined by repeated flank bisection until the samples
    neighboring each peak differ by less than ``rel_gap`` (resolvent peaks
    sit at spectral ordinates and must not be missed).  Explicit grids are
    honored literally unless ``adaptive=True`` is forced.
    """
    if grid is None:
        xi = default_grid()
        if adaptive is None:
            adaptive = True
    else:
        xi = np.atleast_1d(np.asarray(grid, dtype=float))
        if adaptive is None:
            adaptive = False
    if xi.size == 0:
        raise InsufficientData("empty frequency grid")
    xi = np.unique(xi)

    interval_mode = model.space_p not in (1.0, 2.0, np.inf)
    cache: dict[float, tuple[float, float]] = {}

    def measure(x: float) -> tuple[float, float]:
        if x not in cache:
            cache[x] = zoo.resolvent_norm_interval(model, 1j * x)
        return cache[x]

    for x in xi:
        measure(float(x))

    if adaptive:
        for _ in range(max_rounds):
            xs = np.array(sorted(cache.keys()))
            ns = np.array([cache[x][1] for x in xs])
            peak_mask = fitting.local_maxima_mask(ns)
            proposals = []
            for i in np.nonzero(peak_mask)[0]:
                gap_left = abs(ns[i] - ns[i - 1]) / ns[i]
                gap_right = abs(ns[i] - ns[i + 1]) / ns[i]
                # a resolvent peak of height n has width ~ 1/n, so equal
                # flank samples alone must not stop the refinement while
                # the bracket is still wide on that scale
                width = xs[i + 1] - xs[i - 1]
                narrow = width <= 0.2 / ns[i]
                if gap_left > rel_gap or not narrow:
                    proposals.append(0.5 * (xs[i - 1] + xs[i]))
                if gap_right > rel_gap or not narrow:
                    proposals.append(0.5 * (xs[i] + xs[i + 1]))
            proposals = [x for x in proposals if x not in cache]
            if not proposals or len(cache) + len(proposals) > max_points:
                break
            for x in proposals:
                measure(float(x))

    xs = np.array(sorted(cache.keys()))
    uppers = np.array([cache[x][1] for x in xs])
    lowers = np.array([cache[x][0] for x in xs])
    try:
        beta, c, resid = fit_growth_exponent(xs, uppers)
    except InsufficientData:
        beta = c = resid = float("nan")
    return ResolventProfile(
        xi_grid=xs,
        norms=uppers,
        beta_hat=beta,
        c_hat=c,
        fit_residual=resid,
        norms_lower=lowers if interval_mode else None,
    )


def fit_growth_exponent(xi_grid, norms) -> tuple[float, float, float]:
    """Fit the dominating envelope c*(1+|xi|)^beta to a norm profile.

    The exponent comes from a least-squares slope over the profile's
    strict local maxima (the peak locus carries the growth; valleys and
    the post-spectral tail would drag a plain minimax fit far off the peak
    exponent).  Two log-abscissas are tried, log(1+|xi|) and log|xi|, and
    the candidate whose envelope hugs the fit set tighter in sup-norm
    wins: exact (1+|xi|)^beta data is recovered by the first, exact
    |xi|^beta peak envelopes by the second.  The constant is lifted so the
    envelope dominates every sample; the worst slack over the fitted
    subset is the reported residual.  With fewer than four peaks all
    samples with |xi| >= 1 are used.
    """
    xi = np.asarray(xi_grid, dtype=float)
    norms = np.asarray(norms, dtype=float)
    if np.any(~np.isfinite(norms)) or np.any(norms <= 0):
        raise InsufficientData("norms must be finite and positive")
    order = np.argsort(xi)
    xi, norms = xi[order], norms[order]
    mask = np.abs(xi) >= 1.0
    if mask.sum() < 8:
        raise InsufficientData("need at least 8 grid points with |xi| >= 1")

    u_full = np.log1p(np.abs(xi))
    y_full = np.log(norms)
    u_fit = u_full[mask]
    y_fit = y_full[mask]
    v_fit = np.log(np.abs(xi[mask]))
    peaks = fitting.local_maxima_mask(norms)[mask]
    peaks[np.argmax(y_fit)] = True
    fit_mask = peaks if peaks.sum() >= 4 else np.ones_like(peaks)

    best = None
    for abscissa in (u_fit, v_fit):
        slope, _, _ = fitting.slope_then_dominate(abscissa, y_fit, fit_mask)
        xs, ys = abscissa[fit_mask], y_fit[fit_mask]
        centered = ys - ys.mean() - slope * (xs - xs.mean())
        rms = float(np.sqrt(np.mean(centered**2)))
        if best is None or rms < best[0] - 1e-12:
            best = (rms, slope)
    beta = max(0.0, best[1])
    intercept = float(np.max(y_full - beta * u_full))
    residual = float(np.max(intercept + beta * u_fit[fit_mask] - y_fit[fit_mask]))
    return beta, math.exp(intercept), residual


@dataclass
class HalfPlaneReport:
    """Envelope-domination check over the right half-plane.

    ``beta_halfplane`` is an independent envelope exponent fitted to the
    off-axis samples; it is reported alongside the axis fit without
    adjudicating between the two.
    """

    max_ratio: float
    worst_lambda: complex
    samples: int
    passed: bool
    beta_halfplane: float = float("nan")
    c_halfplane: float = float("nan")


def verify_half_plane_bound(
    model: GeneratorModel,
    beta: float,
    c: float,
    sample_count: int = 400,
    seed: int = 0,
    tolerance: float = 0.05,
) -> HalfPlaneReport:
    """Check sup over C_+ samples of ||R(lambda)|| / (c*(1+|lambda|)^beta).

    Samples log-spaced arcs and vertical lines filling the region
    {0 < Re(lambda) <= 1e3, |lambda| <= 1e4}, topped up with seeded random
    points; passes when the maximal ratio stays below 1 + tolerance.
    """
    pts: list[complex] = []
    n_arc = max(4, sample_count // 4)
    radii = np.geomspace(0.1, 1e4, max(4, sample_count // 16))
    angles = np.linspace(-np.pi / 2 * 0.98, np.pi / 2 * 0.98, 17)
    for r in radii:
        for th in angles:
            lam = r * np.exp(1j * th)
            if 0 < lam.real <= 1e3:
                pts.append(lam)
            if len(pts) >= 2 * n_arc:
                break
    re_lines = np.geomspace(1e-3, 1e3, 13)
    im_axis = np.concatenate([-np.geomspace(0.1, 1e4, 24)[::-1],
                              [0.0], np.geomspace(0.1, 1e4, 24)])
    for re in re_lines:
        for im in im_axis:
            lam = re + 1j * im
            if abs(lam) <= 1e4:
                pts.append(lam)
    rng = np.random.default_rng(seed)
    while len(pts) < sample_count:
        r = 10.0 ** rng.uniform(-1, 4)
        th = rng.uniform(-np.pi / 2, np.pi / 2)
        lam = r * np.exp(1j * th)
        if 0 < lam.real <= 1e3 and abs(lam) <= 1e4:
            pts.append(lam)

    max_ratio = -np.inf
    worst = pts[0]
    mags, vals = [], []
    for lam in pts:
        norm = zoo.resolvent_norm(model, lam)
        mags.append(abs(lam))
        vals.append(norm)
        ratio = norm / (c * (1.0 + abs(lam)) ** beta)
        if ratio > max_ratio:
            max_ratio, worst = ratio, lam
    try:
        beta_hp, c_hp, _ = fit_growth_exponent(np.asarray(mags), np.asarray(vals))
    except InsufficientData:
        beta_hp = c_hp = float("nan")
    return HalfPlaneReport(
        max_ratio=float(max_ratio),
        worst_lambda=complex(worst),
        samples=len(pts),
        passed=bool(max_ratio <= 1.0 + tolerance),
        beta_halfplane=float(beta_hp),
        c_halfplane=float(c_hp),
    )


@dataclass
class ResolventPowerReport:
    """Suprema of ||R(i xi)^k x|| / ||x||_{interp} for k = 0..n+1."""

    n: int
    q: float
    tau: float
    sup_ratio_per_k: list[float]
    ladder_trend: dict = field(default_factory=dict)


def verify_resolvent_powers(
    model: GeneratorModel,
    beta: float,
    n: int,
    q: float,
    sample_vectors: int = 48,
    seed: int = 0,
    grid=None,
) -> ResolventPowerReport:
    """Per-power suprema of the smoothed resolvent ratios.

    For each k in {0, ..., n+1} computes the max over a frequency grid and
    a panel of vectors of ||R(i xi, A)^k x|| / ||x||, with x normalized in
    the interpolation norm of smoothness (n+1)*beta (ambient norm when the
    smoothness degenerates to zero).
    """
    from .semigroup import interpolation_norms  # local import breaks a cycle

    if n < 0:
        raise DomainError("n must be >= 0")
    tau = (n + 1) * float(beta)
    if grid is None:
        ords = np.unique(np.round(model.eigenvalues().imag, 9))
        base = default_grid(log_points=96, linear_points=21)
        grid = np.unique(np.concatenate([base, ords]))
    grid = np.asarray(grid, dtype=float)

    rng = np.random.default_rng(seed)
    d = model.dim
    idx = np.unique(np.linspace(0, d - 1, min(d, 16)).astype(int))
    basis = np.eye(d, dtype=complex)[:, idx]
    gauss = rng.standard_normal((d, sample_vectors)) + 1j * rng.standard_normal(
        (d, sample_vectors)
    )
    panel = np.concatenate([basis, gauss], axis=1)

    if tau > 0:
        denom = interpolation_norms(model, tau, q, panel)
    else:
        denom = np.linalg.norm(panel, axis=0)
    keep = denom > 0
    panel, denom = panel[:, keep], denom[keep]

    sups = []
    for k in range(n + 2):
        best = 0.0
        for x in grid:
            img = panel if k == 0 else zoo.resolvent_apply(
                model, 1j * x, panel, power=k
            )
            ratios = np.linalg.norm(img, axis=0) / denom
            best = max(best, float(ratios.max()))
        sups.append(best)
    return ResolventPowerReport(n=n, q=q, tau=tau, sup_ratio_per_k=sups)


def resolvent_power_ladder(
    family: str,
    params: dict,
    dims,
    n: int,
    q: float,
    sample_vectors: int = 48,
    seed: int = 0,
    stability_factor: float = 2.0,
    beta: float | None = None,
):
    """Run verify_resolvent_powers along a truncation ladder.

    Returns (reports, ratios_per_k, bounded) where ratios_per_k[k] lists
    consecutive sup ratios across dimension doublings and ``bounded`` says
    every ratio stays within ``stability_factor`` (in either direction).
    """
    models = zoo.truncation_ladder(family, params, dims)
    reports = []
    for mdl in models:
        b = beta if beta is not None else mdl.beta_analytic
        if b is None:
            prof = sweep_imaginary_axis(mdl)
            b = prof.beta_hat
        reports.append(
            verify_resolvent_powers(
                mdl, b, n, q, sample_vectors=sample_vectors, seed=seed
            )
        )
    k_count = n + 2
    ratios_per_k = []
    bounded = True
    for k in range(k_count):
        vals = [r.sup_ratio_per_k[k] for r in reports]
        ratios = [b / a for a, b in zip(vals, vals[1:]) if a > 0]
        ratios_per_k.append(ratios)
        for r in ratios:
            if max(r, 1.0 / r) > stability_factor:
                bounded = False
    return reports, ratios_per_k, bounded


@dataclass
class RateTable:
    """Decay exponents predicted by the competing estimates.

    ``tau_main`` is the smoothness needed for the rate t^(-rho) on
    interpolation spaces; ``tau_old`` is the older strict threshold
    (rho+1)*beta + 1; ``tau_log`` attains tau_main at the cost of a
    log(t)^sigma factor with any sigma > sigma_log; ``tau_bounded`` is the
    bounded-semigroup rate rho*beta with log exponent rho, applicable only
    when the semigroup is uniformly bounded.
    """

    beta: float
    p: float
    rho: float
    tau_main: float
    tau_old: float
    tau_log: float
    sigma_log: float
    tau_bounded: float
    log_exp_bounded: float
    bounded_regime_only: bool = True

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "p": self.p,
            "rho": self.rho,
            "tau_main": self.tau_main,
            "tau_old": self.tau_old,
            "tau_log": self.tau_log,
            "sigma_log": self.sigma_log,
            "tau_bounded": self.tau_bounded,
            "log_exp_bounded": self.log_exp_bounded,
            "bounded_regime_only": self.bounded_regime_only,
        }


def predict_decay_rates(beta: float, p: float, rho: float) -> RateTable:
    """Exact arithmetic for the competing decay-rate formulas."""
    if not (1.0 <= p <= 2.0):
        raise DomainError(f"p must lie in [1, 2], got {p}")
    if beta < 0:
        raise DomainError(f"beta must be >= 0, got {beta}")
    if rho < 0:
        raise DomainError(f"rho must be >= 0, got {rho}")
    gap = 1.0 / p - (1.0 - 1.0 / p)  # 1/p - 1/p'
    tau_main = (rho + 1.0) * beta + gap
    return RateTable(
        beta=beta,
        p=p,
        rho=rho,
        tau_main=tau_main,
        tau_old=(rho + 1.0) * beta + 1.0,
        tau_log=tau_main,
        sigma_log=gap,
        tau_bounded=rho * beta,
        log_exp_bounded=rho,
    )
