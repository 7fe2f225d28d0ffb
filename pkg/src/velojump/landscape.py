"""Depths of local minima, cusps and the critical depth of a 1D potential.

``z`` is reachable from ``x`` at height ``V`` when ``U`` stays ``<= V`` on the
segment between them. The depth of a minimum is the smallest extra height
that reaches a strictly lower point (``inf`` for global minima); the critical
depth ``E*`` is the largest finite depth (0 when every minimum is global).
All routines walk the critical-point list; :func:`landscape_oracle` is an
independent grid brute force used to validate them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .potential import Potential1D

REL_TOL = 1e-12


def _tol(v: float) -> float:
    return REL_TOL * (1.0 + abs(v))


def is_lower(a: float, b: float) -> bool:
    """``a`` strictly below ``b`` beyond rounding."""
    return a < b - _tol(b)


def _index_of_min(p: Potential1D, x: float) -> int:
    pos = p.cp_positions
    if len(pos):
        i = int(np.argmin(np.abs(pos - x)))
        if abs(pos[i] - x) <= 1e-9 * (1 + abs(x)) and p.critical_points[i].kind == "min":
            return i
    raise ValueError(f"x={x!r} is not a listed local minimum of {p.name}")


def reachable_at_height(p: Potential1D, x: float, z: float, V: float) -> bool:
    lo, hi = min(x, z), max(x, z)
    pos = p.cp_positions
    inside = p.cp_values[(pos > lo) & (pos < hi)]
    path_max = max(float(p.eval(lo)), float(p.eval(hi)), *inside) if len(inside) else max(
        float(p.eval(lo)), float(p.eval(hi))
    )
    return path_max <= V + _tol(V)


def _side_barrier(p: Potential1D, i: int, step: int) -> float:
    """Running maximum up to the first strictly lower point on one side of minimum ``i``."""
    u0 = p.cp_values[i]
    running = u0
    j = i + step
    cps = p.critical_points
    while 0 <= j < len(cps):
        v = p.cp_values[j]
        if cps[j].kind == "max":
            running = max(running, v)
        elif is_lower(v, u0):
            return running
        j += step
    # Past the outermost critical point the tail is monotone; a descending tail
    # (outermost point a maximum) reaches arbitrarily low values.
    last = cps[j - step]
    if last.kind == "max" and j - step != i:
        return running
    return math.inf


def depth_of_minimum(p: Potential1D, x: float) -> float:
    i = _index_of_min(p, x)
    barrier = min(_side_barrier(p, i, -1), _side_barrier(p, i, +1))
    return barrier - p.cp_values[i] if math.isfinite(barrier) else math.inf


def critical_depth(p: Potential1D) -> float:
    depths = [depth_of_minimum(p, m.position) for m in p.minima]
    finite = [d for d in depths if math.isfinite(d)]
    return max(finite) if finite else 0.0


@dataclass(frozen=True)
class Cusp:
    """Sub-level component ``(z_l, z_r)`` of ``{U < level}`` around a minimum."""

    z_l: float
    z_r: float
    level: float
    bottom: tuple[float, ...]
    clipped_left: bool = False
    clipped_right: bool = False

    @property
    def clipped(self) -> bool:
        return self.clipped_left or self.clipped_right

    @property
    def depth(self) -> float:
        return self.level - min(self._bottom_values)

    _bottom_values: tuple[float, ...] = field(default=(), repr=False)


def _tail_crossing(p: Potential1D, start: float, step: int, level: float) -> float:
    f = lambda z: float(p.eval(z)) - level
    if f(start) >= 0:
        return start
    d = 1.0
    while f(start + step * d) < 0:
        d *= 2.0
        if d > 1e12:
            raise ValueError("tail never reaches the requested level")
    lo, hi = sorted((start + step * d / 2 if d > 1 else start, start + step * d))
    return brentq(f, lo, hi, xtol=1e-13, rtol=4 * np.finfo(float).eps)


def _crossing(p: Potential1D, i: int, step: int, level: float, closed: bool) -> float:
    """Walk from critical point ``i`` in direction ``step`` until ``U`` reaches ``level``.

    ``closed=False`` stops at the first point with ``U >= level`` (open
    component); ``closed=True`` only at ``U > level``.
    """
    cps = p.critical_points
    prev = cps[i].position
    j = i + step
    while 0 <= j < len(cps):
        v = p.cp_values[j]
        hit = v > level + _tol(level) if closed else v >= level - _tol(level)
        if hit:
            if abs(v - level) <= _tol(level):
                return cps[j].position
            lo, hi = sorted((prev, cps[j].position))
            return brentq(lambda z: float(p.eval(z)) - level, lo, hi, xtol=1e-13, rtol=4 * np.finfo(float).eps)
        prev = cps[j].position
        j += step
    if cps[j - step].kind == "max" and j - step != i:
        raise ValueError("sub-level component is unbounded (descending tail)")
    return _tail_crossing(p, prev, step, level)


def cusp_at_level(p: Potential1D, x: float, level: float) -> Cusp:
    """Component of ``{U < level}`` containing the minimum ``x``, clipped to the domain."""
    i = _index_of_min(p, x)
    if not p.cp_values[i] < level:
        raise ValueError("level must lie above U(x)")
    z_l = _crossing(p, i, -1, level, closed=False)
    z_r = _crossing(p, i, +1, level, closed=False)
    a, b = p.domain
    cl, cr = z_l < a, z_r > b
    z_l, z_r = max(z_l, a), min(z_r, b)
    inside = [c for c in p.minima if z_l < c.position < z_r]
    umin = min(c.value for c in inside)
    bottom = tuple(c.position for c in inside if not is_lower(umin, c.value))
    vals = tuple(c.value for c in inside if not is_lower(umin, c.value))
    return Cusp(z_l, z_r, level, bottom, cl, cr, vals)


def cusp_of(p: Potential1D, x: float) -> Cusp:
    """The cusp ``C_x``: points reachable from ``x`` strictly below ``U(x) + depth(x)``."""
    d = depth_of_minimum(p, x)
    if not math.isfinite(d):
        raise ValueError("global minima have infinite depth and no cusp")
    i = _index_of_min(p, x)
    return cusp_at_level(p, x, p.cp_values[i] + d)


@dataclass(frozen=True)
class MinimumRecord:
    position: float
    value: float
    depth: float
    cusp: Cusp | None = None


@dataclass(frozen=True)
class LandscapeReport:
    minima: tuple[MinimumRecord, ...]
    critical_depth: float
    maxima: tuple[tuple[float, float], ...] = ()

    def depths(self) -> list[float]:
        return [m.depth for m in self.minima]

    def rows(self) -> list[tuple]:
        """``(position, value, depth, z_l, z_r)`` per minimum (nan when there is no cusp)."""
        out = []
        for m in self.minima:
            zl, zr = (m.cusp.z_l, m.cusp.z_r) if m.cusp else (math.nan, math.nan)
            out.append((m.position, m.value, m.depth, zl, zr))
        return out


def analyze(p: Potential1D) -> LandscapeReport:
    recs = []
    for m in p.minima:
        d = depth_of_minimum(p, m.position)
        recs.append(MinimumRecord(m.position, m.value, d, cusp_of(p, m.position) if math.isfinite(d) else None))
    finite = [r.depth for r in recs if math.isfinite(r.depth)]
    return LandscapeReport(
        tuple(recs), max(finite) if finite else 0.0, tuple((c.position, c.value) for c in p.maxima)
    )


def w_set(p: Potential1D, E: float) -> list[float]:
    """Minima of depth strictly larger than ``E``."""
    return [m.position for m in p.minima if depth_of_minimum(p, m.position) > E]


def r_set(p: Potential1D, E: float) -> list[tuple[float, float]]:
    """Closed intervals reachable from some ``y`` in ``W_E`` at height ``U(y) + E``."""
    out = []
    for y in w_set(p, E):
        i = _index_of_min(p, y)
        level = p.cp_values[i] + E
        out.append((_crossing(p, i, -1, level, closed=True), _crossing(p, i, +1, level, closed=True)))
    return out


def in_intervals(x: float, intervals) -> bool:
    return any(lo <= x <= hi for lo, hi in intervals)


def landscape_oracle(p: Potential1D, grid_n: int = 10_000) -> LandscapeReport:
    """Brute-force depths from a uniform grid over the domain.

    Each interior grid minimum gets the smallest path maximum over all grid
    points strictly below it (running maxima make the all-pairs search linear
    per minimum).
    """
    if grid_n < 10:
        raise ValueError("grid_n must be >= 10")
    a, b = p.domain
    xs = np.linspace(a, b, grid_n)
    u = np.asarray(p.eval(xs), dtype=float)
    interior = np.arange(1, grid_n - 1)
    is_min = (u[interior] < u[interior - 1]) & (u[interior] <= u[interior + 1])
    recs = []
    for i in interior[is_min]:
        thr = u[i] - _tol(u[i])
        best = math.inf
        for seg in (u[i:], u[i::-1]):
            lower = np.nonzero(seg < thr)[0]
            if len(lower):
                best = min(best, float(np.maximum.accumulate(seg)[lower[0]]))
        recs.append(MinimumRecord(float(xs[i]), float(u[i]), best - u[i] if math.isfinite(best) else math.inf))
    finite = [r.depth for r in recs if math.isfinite(r.depth)]
    return LandscapeReport(tuple(recs), max(finite) if finite else 0.0)
