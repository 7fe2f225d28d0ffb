"""Energy potentials: 1D Morse-type potentials and smooth periodic potentials on the torus.

One-dimensional potentials carry their exact first and second derivatives and
an ordered list of critical points. Outside the declared domain they are
assumed monotone on each tail; for the built-in families this is checked at
construction.

The text format read by :func:`parse_potential` is::

    # comment lines start with '#'
    kind=quartic
    coeffs: 0.25 0 -0.5 0 0        # highest degree first
    domain: -3 3

    kind=piecewise_linear          # one "x value" pair per line
    0 1
    1 0

    kind=piecewise_cubic           # natural cubic spline through the pairs
    tail_curvature: 1.0
    0 1
    ...

    kind=torus_trig                # U(x) = sum a cos(2 pi k.x) + b sin(2 pi k.x)
    dim: 2
    grad_sup: 5.0                  # optional
    term: 0.5 0 1 0                # a b k_1 ... k_d
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .errors import CriticalPointError, MorseError

MORSE_TOL = 1e-8


@dataclass(frozen=True)
class CriticalPoint:
    position: float
    kind: str  # "min" or "max"
    value: float


@dataclass(frozen=True)
class PiecewisePoly:
    """Piecewise polynomial of degree <= 4 on the whole real line.

    Piece ``j`` covers ``[breaks[j-1], breaks[j])`` (piece 0 and the last piece
    are the unbounded tails) and is stored in ascending powers of
    ``x - origins[j]``.
    """

    breaks: np.ndarray
    origins: np.ndarray
    coefs: np.ndarray

    def __post_init__(self):
        breaks = np.ascontiguousarray(self.breaks, dtype=float)
        origins = np.ascontiguousarray(self.origins, dtype=float)
        coefs = np.zeros((len(origins), 5))
        given = np.asarray(self.coefs, dtype=float)
        coefs[:, : given.shape[1]] = given
        if len(origins) != len(breaks) + 1:
            raise ValueError("need one more piece than breakpoints")
        if np.any(np.diff(breaks) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breaks", breaks)
        object.__setattr__(self, "origins", origins)
        object.__setattr__(self, "coefs", coefs)

    @property
    def degree(self) -> int:
        nz = np.nonzero(np.any(self.coefs != 0.0, axis=0))[0]
        return int(nz[-1]) if len(nz) else 0

    def piece_is_linear(self) -> np.ndarray:
        return np.all(self.coefs[:, 2:] == 0.0, axis=1)

    def __call__(self, x, nu: int = 0):
        xa = np.asarray(x, dtype=float)
        j = np.searchsorted(self.breaks, xa, side="right")
        d = xa - self.origins[j]
        c = self.coefs[j]
        if nu == 0:
            out = (((c[..., 4] * d + c[..., 3]) * d + c[..., 2]) * d + c[..., 1]) * d + c[..., 0]
        elif nu == 1:
            out = ((4.0 * c[..., 4] * d + 3.0 * c[..., 3]) * d + 2.0 * c[..., 2]) * d + c[..., 1]
        elif nu == 2:
            out = (12.0 * c[..., 4] * d + 6.0 * c[..., 3]) * d + 2.0 * c[..., 2]
        elif nu == 3:
            out = 24.0 * c[..., 4] * d + 6.0 * c[..., 3]
        else:
            raise ValueError("nu must be 0..3")
        return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class Potential1D:
    """A 1D energy ``U`` with derivatives, a declared domain and its critical points.

    ``breaks`` lists the points where the second derivative may jump (panel
    boundaries for quadrature); ``linear`` marks piecewise-linear potentials,
    whose critical points are kinks rather than Morse points. ``pieces`` is set
    for the built-in families and enables the compiled simulator.
    """

    eval: Callable
    deriv: Callable
    deriv2: Callable
    domain: tuple[float, float]
    critical_points: tuple[CriticalPoint, ...]
    breaks: tuple[float, ...] = ()
    linear: bool = False
    pieces: PiecewisePoly | None = None
    name: str = "custom"
    cp_positions: np.ndarray = field(init=False, repr=False, compare=False)
    cp_values: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        a, b = map(float, self.domain)
        if not a < b:
            raise ValueError("domain must satisfy a < b")
        object.__setattr__(self, "domain", (a, b))
        cps = tuple(sorted(self.critical_points, key=lambda c: c.position))
        for c0, c1 in zip(cps, cps[1:]):
            if c0.kind == c1.kind:
                raise CriticalPointError(
                    f"critical points must alternate min/max; two {c0.kind}s at "
                    f"{c0.position:.6g} and {c1.position:.6g}"
                )
        object.__setattr__(self, "critical_points", cps)
        object.__setattr__(self, "cp_positions", np.array([c.position for c in cps], dtype=float))
        object.__setattr__(self, "cp_values", np.array([c.value for c in cps], dtype=float))

    @classmethod
    def from_callables(cls, eval, deriv, deriv2, domain, grid_n: int = 2000, name="custom"):
        cps = locate_critical_points(eval, deriv, deriv2, domain, grid_n)
        return cls(eval, deriv, deriv2, tuple(domain), tuple(cps), name=name)

    @property
    def minima(self) -> list[CriticalPoint]:
        return [c for c in self.critical_points if c.kind == "min"]

    @property
    def maxima(self) -> list[CriticalPoint]:
        return [c for c in self.critical_points if c.kind == "max"]

    def double_well(self) -> tuple[float, float, float]:
        """Return ``(x0, x1, x2)``: left minimum, barrier, right minimum."""
        kinds = [c.kind for c in self.critical_points]
        if kinds != ["min", "max", "min"]:
            raise ValueError(f"{self.name} is not a double well (critical kinds {kinds})")
        return tuple(c.position for c in self.critical_points)

    def max_abs_slope(self) -> float:
        """Largest |U'| on the domain (dense sampling plus breakpoints)."""
        a, b = self.domain
        xs = np.concatenate([np.linspace(a, b, 20001), [x for x in self.breaks if a <= x <= b]])
        return float(np.max(np.abs(self.deriv(xs))))

    def scaled(self, s: float, shift: float = 0.0) -> "Potential1D":
        """The potential ``s * U + shift`` (``s > 0``)."""
        if s <= 0:
            raise ValueError("scale must be positive")
        pieces = None
        if self.pieces is not None:
            coefs = self.pieces.coefs * s
            coefs[:, 0] += shift
            pieces = PiecewisePoly(self.pieces.breaks, self.pieces.origins, coefs)
        u, du, d2u = self.eval, self.deriv, self.deriv2
        cps = tuple(CriticalPoint(c.position, c.kind, s * c.value + shift) for c in self.critical_points)
        return Potential1D(
            eval=(pieces if pieces is not None else (lambda x: s * u(x) + shift)),
            deriv=(lambda x: pieces(x, 1)) if pieces is not None else (lambda x: s * du(x)),
            deriv2=(lambda x: pieces(x, 2)) if pieces is not None else (lambda x: s * d2u(x)),
            domain=self.domain,
            critical_points=cps,
            breaks=self.breaks,
            linear=self.linear,
            pieces=pieces,
            name=f"{s:g}*{self.name}+{shift:g}",
        )


def locate_critical_points(eval, deriv, deriv2, domain, grid_n: int = 2000) -> list[CriticalPoint]:
    """Find and classify all zeros of ``deriv`` on ``domain``.

    Sign changes on a uniform grid are refined with Brent's method to an
    interval below 1e-12. Raises :class:`MorseError` if the second derivative
    vanishes at a root and :class:`CriticalPointError` if two roots are closer
    than the grid spacing (the grid may then miss pairs of roots).
    """
    if grid_n < 2:
        raise ValueError("grid_n must be >= 2")
    a, b = map(float, domain)
    xs = np.linspace(a, b, grid_n)
    g = np.asarray(deriv(xs), dtype=float)
    spacing = (b - a) / (grid_n - 1)
    roots = []
    for i in range(grid_n):
        if g[i] == 0.0:
            roots.append(xs[i])
        elif i + 1 < grid_n and g[i] * g[i + 1] < 0.0:
            # flat (degenerate) roots may stall Brent's method; keep its best
            # bracket point and let the curvature check below reject it
            r, _ = brentq(deriv, xs[i], xs[i + 1], xtol=1e-14, rtol=4 * np.finfo(float).eps,
                          full_output=True, disp=False)
            roots.append(r)
    out = []
    for r in roots:
        curv = float(deriv2(r))
        if abs(curv) < MORSE_TOL:
            raise MorseError(f"degenerate critical point at x={r:.12g} (U''={curv:.3g})")
        out.append(CriticalPoint(float(r), "min" if curv > 0 else "max", float(eval(r))))
    for c0, c1 in zip(out, out[1:]):
        if c1.position - c0.position < spacing:
            raise CriticalPointError(
                f"critical points at {c0.position:.6g} and {c1.position:.6g} are closer than the "
                f"grid spacing {spacing:.3g}; increase grid_n"
            )
    return out


def _from_pieces(pieces: PiecewisePoly, domain, cps, *, linear=False, name="custom") -> Potential1D:
    return Potential1D(
        eval=pieces,
        deriv=lambda x: pieces(x, 1),
        deriv2=lambda x: pieces(x, 2),
        domain=tuple(domain),
        critical_points=tuple(cps),
        breaks=tuple(float(b) for b in pieces.breaks),
        linear=linear,
        pieces=pieces,
        name=name,
    )


def polynomial(coeffs: Sequence[float], domain=(-3.0, 3.0), grid_n: int = 2000, name="polynomial") -> Potential1D:
    """Polynomial potential of degree <= 4, ``coeffs`` highest degree first.

    All real critical points must lie inside the domain so that both tails are
    monotone.
    """
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), "f")
    if len(c) == 0:
        c = np.zeros(1)
    if len(c) > 5:
        raise ValueError("degree must be <= 4")
    a, b = map(float, domain)
    if len(c) >= 3:
        droots = np.roots(np.polyder(c))
        real = droots[np.abs(droots.imag) < 1e-9].real
        if np.any((real < a) | (real > b)):
            raise ValueError(f"critical points {np.sort(real)} fall outside the domain {domain}")
    pieces = PiecewisePoly(np.empty(0), np.zeros(1), c[::-1][None, :])
    cps = locate_critical_points(pieces, lambda x: pieces(x, 1), lambda x: pieces(x, 2), (a, b), grid_n)
    return _from_pieces(pieces, (a, b), cps, name=name)


def quartic_double_well(tilt: float = 0.0, domain=(-3.0, 3.0)) -> Potential1D:
    """``x**4/4 - x**2/2 + tilt*x``."""
    return polynomial([0.25, 0.0, -0.5, tilt, 0.0], domain, name=f"quartic(tilt={tilt:g})")


def _check_points(points):
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
        raise ValueError("need at least two (x, value) pairs")
    if np.any(np.diff(pts[:, 0]) <= 0):
        raise ValueError("x positions must be strictly increasing")
    return pts[:, 0].copy(), pts[:, 1].copy()


def piecewise_linear(points, name="piecewise_linear") -> Potential1D:
    """Linear interpolation through ``(x, value)`` pairs, extended linearly beyond the ends.

    The first segment must descend and the last ascend so that the tails grow
    without bound; flat segments are rejected.
    """
    xs, vs = _check_points(points)
    slopes = np.diff(vs) / np.diff(xs)
    if np.any(slopes == 0.0):
        raise ValueError("flat segments are not allowed")
    if slopes[0] > 0 or slopes[-1] < 0:
        raise ValueError("first segment must descend and last segment ascend (confining tails)")
    origins = np.concatenate([[xs[0]], xs[:-1], [xs[-1]]])
    c0 = np.concatenate([[vs[0]], vs[:-1], [vs[-1]]])
    c1 = np.concatenate([[slopes[0]], slopes, [slopes[-1]]])
    pieces = PiecewisePoly(xs, origins, np.column_stack([c0, c1]))
    cps = []
    for i in range(1, len(xs) - 1):
        if slopes[i - 1] < 0 < slopes[i]:
            cps.append(CriticalPoint(float(xs[i]), "min", float(vs[i])))
        elif slopes[i - 1] > 0 > slopes[i]:
            cps.append(CriticalPoint(float(xs[i]), "max", float(vs[i])))
    return _from_pieces(pieces, (xs[0], xs[-1]), cps, linear=True, name=name)


def piecewise_cubic(points, tail_curvature: float = 1.0, grid_n: int = 4000, name="piecewise_cubic") -> Potential1D:
    """Natural cubic spline through ``(x, value)`` pairs with convex quadratic tails.

    The tails match value and slope at the end points; the end slopes must
    point uphill outward.
    """
    xs, vs = _check_points(points)
    if tail_curvature <= 0:
        raise ValueError("tail_curvature must be positive")
    cs = CubicSpline(xs, vs, bc_type="natural")
    s0, s1 = float(cs(xs[0], 1)), float(cs(xs[-1], 1))
    if s0 >= 0 or s1 <= 0:
        raise ValueError("spline must descend at the left end and ascend at the right end")
    inner = cs.c[::-1].T  # ascending powers per interval
    k = tail_curvature / 2.0
    coefs = np.vstack([[vs[0], s0, k, 0.0], inner, [vs[-1], s1, k, 0.0]])
    origins = np.concatenate([[xs[0]], xs[:-1], [xs[-1]]])
    pieces = PiecewisePoly(xs, origins, coefs)
    cps = locate_critical_points(pieces, lambda x: pieces(x, 1), lambda x: pieces(x, 2), (xs[0], xs[-1]), grid_n)
    return _from_pieces(pieces, (xs[0], xs[-1]), cps, name=name)


# --------------------------------------------------------------------------- torus


@dataclass(frozen=True)
class TrigTerms:
    """Coefficients of ``sum_j a_j cos(2 pi k_j.x) + b_j sin(2 pi k_j.x)``."""

    wavevectors: np.ndarray
    cos_coef: np.ndarray
    sin_coef: np.ndarray

    def __post_init__(self):
        k = np.atleast_2d(np.asarray(self.wavevectors, dtype=float))
        if not np.array_equal(k, np.round(k)):
            raise ValueError("wavevectors must be integer (1-periodicity)")
        object.__setattr__(self, "wavevectors", k)
        object.__setattr__(self, "cos_coef", np.asarray(self.cos_coef, dtype=float).reshape(-1))
        object.__setattr__(self, "sin_coef", np.asarray(self.sin_coef, dtype=float).reshape(-1))

    def value(self, x):
        theta = 2.0 * np.pi * (np.asarray(x, dtype=float) @ self.wavevectors.T)
        out = np.cos(theta) @ self.cos_coef + np.sin(theta) @ self.sin_coef
        return float(out) if np.ndim(out) == 0 else out

    def gradient(self, x):
        theta = 2.0 * np.pi * (np.asarray(x, dtype=float) @ self.wavevectors.T)
        w = -np.sin(theta) * self.cos_coef + np.cos(theta) * self.sin_coef
        return 2.0 * np.pi * (w @ self.wavevectors)

    def gradient_bound(self) -> float:
        """Triangle-inequality bound on sup |grad U| (always valid)."""
        norms = np.linalg.norm(self.wavevectors, axis=1)
        return float(2.0 * np.pi * np.sum(norms * np.hypot(self.cos_coef, self.sin_coef)))


@dataclass(frozen=True)
class PotentialTorus:
    """A smooth 1-periodic energy on ``[0, 1)^dim`` with a bound on ``|grad U|``."""

    dim: int
    eval: Callable
    grad: Callable
    grad_sup: float
    trig: TrigTerms | None = None
    name: str = "custom"

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if not (np.isfinite(self.grad_sup) and self.grad_sup >= 0):
            raise ValueError("grad_sup must be finite and non-negative")

    @classmethod
    def from_callables(cls, dim, eval, grad, grad_sup=None, name="custom"):
        if grad_sup is None:
            if dim > 3:
                raise ValueError("dimension > 3 requires an explicit grad_sup")
            grad_sup = scan_grad_sup(grad, dim)
        return cls(dim, eval, grad, float(grad_sup), None, name)


def scan_grad_sup(grad, dim: int, n_per_axis: int = 64, safety: float = 1.1) -> float:
    """``safety * max |grad U|`` over a regular ``n_per_axis**dim`` grid."""
    axes = [np.arange(n_per_axis) / n_per_axis] * dim
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)
    g = np.asarray(grad(pts)).reshape(len(pts), dim)
    return safety * float(np.max(np.linalg.norm(g, axis=1)))


def torus_trig(wavevectors, cos_coef, sin_coef, grad_sup=None, name="torus_trig") -> PotentialTorus:
    """Trigonometric polynomial on the torus.

    Without an explicit ``grad_sup`` the bound is the smaller of the analytic
    triangle bound and (for ``dim <= 3``) 1.1 times a 64^d grid scan.
    """
    terms = TrigTerms(wavevectors, cos_coef, sin_coef)
    dim = terms.wavevectors.shape[1]
    if grad_sup is None:
        grad_sup = terms.gradient_bound()
        if dim <= 3:
            grad_sup = min(grad_sup, scan_grad_sup(terms.gradient, dim))
    return PotentialTorus(dim, terms.value, terms.gradient, float(grad_sup), terms, name)


def zero_torus(dim: int) -> PotentialTorus:
    return torus_trig(np.zeros((1, dim)), [0.0], [0.0], grad_sup=0.0, name="zero")


def cosine_torus(dim: int = 2, amplitude: float = 1.0) -> PotentialTorus:
    """``amplitude * mean_i cos(2 pi x_i)``."""
    k = np.eye(dim)
    return torus_trig(k, np.full(dim, amplitude / dim), np.zeros(dim), name=f"cos{dim}")


def two_well_torus(dim: int = 2, a: float = 0.5, b: float = 0.5, c: float = 0.5) -> PotentialTorus:
    """``-a cos(4 pi x_1) - b cos(2 pi x_1) - c sum_{i>1} cos(2 pi x_i)``.

    Global minimum at the origin (``-a-b-c(d-1)``), a second minimum at
    ``x_1 = 1/2`` lying ``2b`` higher; ``4a > b`` keeps it a minimum.
    """
    rows, ca = [], []
    e1 = np.zeros(dim)
    e1[0] = 2.0
    rows.append(e1), ca.append(-a)
    e1 = np.zeros(dim)
    e1[0] = 1.0
    rows.append(e1), ca.append(-b)
    for i in range(1, dim):
        e = np.zeros(dim)
        e[i] = 1.0
        rows.append(e), ca.append(-c)
    return torus_trig(np.array(rows), ca, np.zeros(len(ca)), name=f"two_well{dim}")


def two_well_barrier(a: float = 0.5, b: float = 0.5) -> float:
    """Barrier from the shallow well of :func:`two_well_torus` along ``x_1``."""
    return 2.0 * a - b + b * b / (8.0 * a)


def directional_profile(p: PotentialTorus, x, y):
    """Return ``s -> (U(x + s y mod 1), y . grad U(x + s y mod 1))``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if abs(np.linalg.norm(y) - 1.0) > 1e-12:
        raise ValueError("direction must be a unit vector")

    def profile(s):
        z = np.mod(x + np.multiply.outer(np.asarray(s, dtype=float), y), 1.0)
        return p.eval(z), p.grad(z) @ y

    return profile


# --------------------------------------------------------------------------- text format

W_POINTS = [(0, 1), (1, 0), (2, 1.5), (3, -1), (4, 2)]
TILTED_W_POINTS = [(0, 2), (1, 0), (2, 1), (3, -0.5), (4, 3)]
THREE_WELL_POINTS = [(0, 3), (1, 0), (2, 2), (3, 1), (4, 2.5), (5, -1), (6, 3)]


def named_potential(name: str, dim: int = 2):
    """Built-in potentials by name (1D and torus)."""
    table_1d = {
        "double_well": lambda: quartic_double_well(0.0),
        "tilted_double_well": lambda: quartic_double_well(-0.1),
        "w": lambda: piecewise_linear(W_POINTS, name="w"),
        "tilted_w": lambda: piecewise_linear(TILTED_W_POINTS, name="tilted_w"),
        "three_well": lambda: piecewise_linear(THREE_WELL_POINTS, name="three_well"),
    }
    table_torus = {
        "cos": lambda: cosine_torus(dim),
        "two_well": lambda: two_well_torus(dim),
        "zero": lambda: zero_torus(dim),
    }
    if name in table_1d:
        return table_1d[name]()
    if name in table_torus:
        return table_torus[name]()
    raise KeyError(f"unknown potential {name!r}; known: {sorted(table_1d) + sorted(table_torus)}")


def parse_potential(text: str, name: str = "file"):
    """Parse the potential text format (see module docstring)."""
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines or not lines[0].startswith("kind="):
        raise ValueError("first non-comment line must be kind=<...>")
    kind = lines[0].split("=", 1)[1].strip()
    keys, rows = {}, []
    for line in lines[1:]:
        if ":" in line:
            key, val = line.split(":", 1)
            vals = [float(v) for v in val.split()]
            keys.setdefault(key.strip(), []).append(vals)
        else:
            rows.append([float(v) for v in line.split()])
    if kind == "quartic":
        coeffs = keys["coeffs"][0]
        domain = keys.get("domain", [[-3.0, 3.0]])[0]
        return polynomial(coeffs, tuple(domain), name=name)
    if kind == "piecewise_linear":
        return piecewise_linear(rows, name=name)
    if kind == "piecewise_cubic":
        curv = keys.get("tail_curvature", [[1.0]])[0][0]
        return piecewise_cubic(rows, tail_curvature=curv, name=name)
    if kind == "torus_trig":
        dim = int(keys["dim"][0][0])
        terms = np.array(keys["term"], dtype=float)
        if terms.shape[1] != 2 + dim:
            raise ValueError(f"each term needs a, b and {dim} wavevector entries")
        gs = keys.get("grad_sup", [[None]])[0][0]
        return torus_trig(terms[:, 2:], terms[:, 0], terms[:, 1], grad_sup=gs, name=name)
    raise ValueError(f"unknown potential kind {kind!r}")


def load_potential(spec: str, dim: int = 2):
    """A built-in name or a path to a potential file."""
    if os.path.exists(spec):
        with open(spec) as fh:
            return parse_potential(fh.read(), name=os.path.basename(spec))
    return named_potential(spec, dim)
