"""Estimators, distances and quadrature oracles for the escape and invariance checks."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import NumericalError
from .potential import Potential1D, PotentialTorus


@dataclass(frozen=True)
class EscapeSummary:
    n: int
    mean: float
    stderr: float
    theory: float
    ratio: float
    ks: float

    def record(self, name: str = "escape", **params) -> str:
        return csv_record(name, params | {"n": self.n, "theory": self.theory, "ratio": self.ratio,
                                          "ks": self.ks}, self.mean, self.stderr)


def summarize_escapes(taus, theory: float) -> EscapeSummary:
    t = np.asarray(taus, dtype=float)
    if len(t) == 0:
        raise ValueError("no samples")
    mean = float(t.mean())
    se = float(t.std(ddof=1) / math.sqrt(len(t))) if len(t) > 1 else math.nan
    return EscapeSummary(len(t), mean, se, theory, mean / theory, ks_to_exponential(t / mean))


def _barrier(p: Potential1D):
    x0, x1, _ = p.double_well()
    u0, u1 = float(p.eval(x0)), float(p.eval(x1))
    curv = float(p.deriv2(x0))
    if curv <= 0:
        raise ValueError("U''(x0) must be positive")
    return x0, x1, u1 - u0, curv


def kramers_theory(p: Potential1D, eps: float) -> float:
    """``sqrt(8 pi eps / U''(x0)) * exp((U(x1) - U(x0)) / eps)``."""
    _, _, du, curv = _barrier(p)
    return math.sqrt(8.0 * math.pi * eps / curv) * math.exp(du / eps)


def fokker_planck_reference(p: Potential1D, eps: float) -> float:
    """Mean transition time of the overdamped diffusion, quoted for comparison only."""
    _, x1, du, curv = _barrier(p)
    return 2.0 * math.pi * math.exp(du / eps) / math.sqrt(abs(float(p.deriv2(x1))) * curv)


def _climb_length(p: Potential1D, start: float, step: int, rise: float, limit: float) -> float:
    """Distance travelled from ``start`` in direction ``step`` until ``U`` has risen by ``rise``."""
    u0 = float(p.eval(start))
    f = lambda s: float(p.eval(start + step * s)) - u0 - rise
    if limit is not None:
        return brentq(f, 0.0, limit, xtol=1e-14, rtol=1e-15)
    hi = 1.0
    while f(hi) < 0:
        hi *= 2.0
    return brentq(f, 0.0, hi, xtol=1e-14, rtol=1e-15)


def _exp_weighted_mean(length, lo, hi):
    """``int_lo^hi e^{-e} length(e) de`` split where the integrand bends most."""
    hi = min(hi, 60.0)  # exp(-60) is below double precision relative to the bulk
    pts = [v for v in (0.5, 2.0, 8.0) if lo < v < hi]
    val, err = quad(lambda e: math.exp(-e) * length(e), lo, hi, epsabs=1e-13, epsrel=1e-11, limit=400,
                    points=pts or None)
    return val


def kramers_exact_mean(p: Potential1D, eps: float) -> float:
    """Exact finite-``eps`` mean hitting time of ``x1`` from ``(x0, -1)`` with the minimal rate.

    Renewal argument: every attempt at the barrier is preceded by one left
    excursion; an attempt succeeds with probability ``q = exp(-dU/eps)``.
    """
    x0, x1, du, _ = _barrier(p)
    q = math.exp(-du / eps)
    left = _exp_weighted_mean(lambda e: _climb_length(p, x0, -1, eps * e, None), 0.0, math.inf)
    emax = du / eps
    right = _exp_weighted_mean(lambda e: _climb_length(p, x0, +1, eps * e, x1 - x0), 0.0, emax)
    return 2.0 * left / q + 2.0 * right / q + (x1 - x0)


def excursion_exact_mean(p: Potential1D, eps: float) -> float:
    """Exact mean of ``eta`` (first visit of ``{x0, x1}`` from ``(x0, +1)``) without residual rate."""
    x0, x1, du, _ = _barrier(p)
    emax = du / eps
    right = _exp_weighted_mean(lambda e: _climb_length(p, x0, +1, eps * e, x1 - x0), 0.0, emax)
    return 2.0 * right + math.exp(-emax) * (x1 - x0)


def excursion_theory(p: Potential1D, eps: float) -> float:
    """``sqrt(2 pi eps / U''(x0))``."""
    _, _, _, curv = _barrier(p)
    return math.sqrt(2.0 * math.pi * eps / curv)


def ks_to_exponential(samples) -> float:
    """Kolmogorov-Smirnov distance between the empirical law of ``samples`` and Exp(1)."""
    v = np.sort(np.asarray(samples, dtype=float))
    if len(v) == 0:
        raise ValueError("need at least one sample")
    if np.any(v <= 0):
        raise ValueError("samples must be positive")
    n = len(v)
    f = -np.expm1(-v)
    k = np.arange(1, n + 1)
    return float(max(np.max(k / n - f), np.max(f - (k - 1) / n)))


def binomial_z(successes: int, n: int, p: float) -> float:
    """Standardized deviation of a binomial count from ``n p``."""
    return (successes - n * p) / math.sqrt(n * p * (1 - p))


def gibbs_density_1d(p: Potential1D, eps: float, bins, domain=None) -> np.ndarray:
    """Per-bin masses of ``exp(-U/eps)`` normalized over the binned interval.

    ``bins`` is a bin count or an array of edges.
    """
    if np.ndim(bins) == 0:
        if int(bins) < 2:
            raise ValueError("need at least 2 bins")
        a, b = domain if domain is not None else p.domain
        edges = np.linspace(a, b, int(bins) + 1)
    else:
        edges = np.asarray(bins, dtype=float)
    umin = min([float(np.min(p.eval(np.linspace(edges[0], edges[-1], 2001))))] + list(p.cp_values))
    kinks = np.asarray(list(p.breaks) + list(p.cp_positions))
    f = lambda x: math.exp(-(float(p.eval(x)) - umin) / eps)
    masses = np.empty(len(edges) - 1)
    for i, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        pts = kinks[(kinks > lo) & (kinks < hi)]
        val, err = quad(f, lo, hi, points=list(pts) or None, epsabs=0.0, epsrel=1e-12, limit=200)
        if not np.isfinite(val):
            raise NumericalError("Gibbs quadrature failed")
        masses[i] = val
    return masses / masses.sum()


def tv_histograms(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("histograms must have the same number of bins")
    for h in (a, b):
        if abs(h.sum() - 1.0) > 1e-9:
            raise ValueError("histograms must sum to one")
    return 0.5 * float(np.abs(a - b).sum())


def normalize(counts) -> np.ndarray:
    c = np.asarray(counts, dtype=float)
    return c / c.sum()


def two_point_measure(x0: float, x2: float, t: float):
    """Atoms and weights of ``exp(-t) delta_x0 + (1 - exp(-t)) delta_x2``."""
    w = math.exp(-t) if math.isfinite(t) else 0.0
    return np.array([x0, x2]), np.array([w, 1.0 - w])


def wasserstein1_1d(samples, ref_atoms, ref_weights=None, sample_weights=None) -> float:
    """``W_1`` between two discrete measures on the line as ``int |F - G| dx``."""
    xs = np.asarray(samples, dtype=float).ravel()
    ys = np.asarray(ref_atoms, dtype=float).ravel()
    if len(xs) == 0 or len(ys) == 0:
        raise ValueError("measures must be nonempty")
    wx = np.full(len(xs), 1.0 / len(xs)) if sample_weights is None else np.asarray(sample_weights, float)
    wy = np.full(len(ys), 1.0 / len(ys)) if ref_weights is None else np.asarray(ref_weights, float)
    pts = np.concatenate([xs, ys])
    signed = np.concatenate([wx / wx.sum(), -wy / wy.sum()])
    order = np.argsort(pts, kind="mergesort")
    pts, signed = pts[order], signed[order]
    cdf_diff = np.cumsum(signed)[:-1]
    return float(np.sum(np.abs(cdf_diff) * np.diff(pts)))


def gibbs_energy_histogram_torus(p: PotentialTorus, eps: float, edges, n_grid: int = 256) -> np.ndarray:
    """Law of ``U(X)`` under the Gibbs measure, binned by ``edges``, from a midpoint grid.

    The midpoint rule is spectrally accurate for smooth periodic integrands.
    """
    if n_grid ** p.dim > 5e7:
        raise ValueError("grid too large; lower n_grid")
    axes = [(np.arange(n_grid) + 0.5) / n_grid] * p.dim
    pts = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=-1)
    u = np.asarray(p.eval(pts), dtype=float)
    w = np.exp(-(u - u.min()) / eps)
    hist, _ = np.histogram(np.clip(u, edges[0], edges[-1]), bins=edges, weights=w)
    return hist / hist.sum()


def csv_record(name: str, params: dict, value: float, stderr: float | None = None) -> str:
    """One CSV line: ``name,k=v;k=v,value,stderr``."""
    p = ";".join(f"{k}={v:.10g}" if isinstance(v, float) else f"{k}={v}" for k, v in params.items())
    se = "" if stderr is None or not np.isfinite(stderr) else f"{stderr:.10g}"
    return f"{name},{p},{value:.10g},{se}"
