"""Cooling schedules and the divergence criterion for admissible cooling.

Schedules are exposed through the inverse temperature ``beta(t) = 1/eps(t)``
and its exact integral, which is what the jump clocks consume. Spec strings:
``const:0.05``, ``log:c=2,t0=e`` and ``table:<file>`` (two columns ``t eps``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

DIVERGES = "diverges"
CONVERGES = "converges"
INCONCLUSIVE = "inconclusive"


class CoolingSchedule:
    """Base class: positive, non-increasing temperature ``eps(t)``."""

    kind = "abstract"
    spec = ""

    def eps(self, t):
        raise NotImplementedError

    def beta(self, t):
        raise NotImplementedError

    def beta_integral(self, t1: float, t2: float) -> float:
        """``int_{t1}^{t2} beta(u) du``."""
        return quad(self.beta, t1, t2, epsabs=0.0, epsrel=1e-12, limit=200)[0]

    def is_annealing(self) -> bool:
        return False

    def check(self, horizon: float = 1e6, n: int = 1000) -> None:
        """Raise ValueError unless eps is positive and non-increasing on a grid."""
        ts = np.concatenate([[0.0], np.geomspace(1e-3, horizon, n - 1)])
        e = np.array([self.eps(t) for t in ts])
        if np.any(e <= 0):
            raise ValueError("schedule must stay positive")
        if np.any(np.diff(e) > 1e-12 * np.abs(e[:-1])):
            raise ValueError("schedule must be non-increasing")


@dataclass(frozen=True)
class ConstantSchedule(CoolingSchedule):
    value: float
    kind = "const"

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError("temperature must be positive")

    @property
    def spec(self):
        return f"const:{self.value:g}"

    def eps(self, t):
        return self.value + 0.0 * np.asarray(t, dtype=float)

    def beta(self, t):
        return 1.0 / self.value + 0.0 * np.asarray(t, dtype=float)

    def beta_integral(self, t1, t2):
        return (t2 - t1) / self.value


@dataclass(frozen=True)
class LogSchedule(CoolingSchedule):
    """``eps(t) = c / ln(t0 + t)``; infinite temperature while ``t0 + t <= 1``."""

    c: float
    t0: float = math.e
    kind = "log"

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("c must be positive")
        if self.t0 < 0:
            raise ValueError("t0 must be non-negative")

    @property
    def spec(self):
        t0 = "e" if self.t0 == math.e else f"{self.t0:g}"
        return f"log:c={self.c:g},t0={t0}"

    def beta(self, t):
        return np.maximum(np.log(self.t0 + np.asarray(t, dtype=float)), 0.0) / self.c

    def eps(self, t):
        b = self.beta(t)
        with np.errstate(divide="ignore"):
            return np.where(b > 0, 1.0 / np.where(b > 0, b, 1.0), np.inf)

    def beta_integral(self, t1, t2):
        return log_beta_integral(self.c, self.t0, t1, t2)

    def is_annealing(self):
        return True


def log_beta_integral(c, t0, t1, t2):
    """``int_{t1}^{t2} max(ln(t0+u), 0)/c du`` written to avoid cancellation."""
    a = max(t0 + t1, 1.0)
    b = t0 + t2
    if b <= a:
        return 0.0
    l = b - a
    return (l * math.log(b) + a * math.log1p(l / a) - l) / c


@dataclass(frozen=True)
class TableSchedule(CoolingSchedule):
    """Piecewise-linear interpolation of ``(t, eps)`` rows, held constant past the last row."""

    times: tuple
    values: tuple
    source: str = "table"
    kind = "table"

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or len(t) < 1 or len(t) != len(v):
            raise ValueError("table needs matching time and value columns")
        if t[0] != 0.0 or np.any(np.diff(t) <= 0):
            raise ValueError("table times must start at 0 and increase")
        if np.any(v <= 0) or np.any(np.diff(v) > 0):
            raise ValueError("table temperatures must be positive and non-increasing")
        object.__setattr__(self, "times", tuple(t))
        object.__setattr__(self, "values", tuple(v))

    @property
    def spec(self):
        return f"table:{self.source}"

    def eps(self, t):
        return np.interp(t, self.times, self.values)

    def beta(self, t):
        return 1.0 / self.eps(t)

    def beta_integral(self, t1, t2):
        return table_beta_integral(np.asarray(self.times), np.asarray(self.values), t1, t2)


def table_beta_integral(times, values, t1, t2):
    """Exact integral of ``1/eps`` for piecewise-linear ``eps``."""
    if t2 <= t1:
        return 0.0
    total = 0.0
    edges = np.concatenate([times, [np.inf]])
    for i in range(len(times)):
        lo, hi = max(t1, edges[i]), min(t2, edges[i + 1])
        if hi <= lo:
            continue
        if i == len(times) - 1:
            total += (hi - lo) / values[i]
            continue
        slope = (values[i + 1] - values[i]) / (times[i + 1] - times[i])
        e_lo = values[i] + slope * (lo - times[i])
        if slope == 0.0:
            total += (hi - lo) / e_lo
        else:
            e_hi = values[i] + slope * (hi - times[i])
            total += math.log(e_hi / e_lo) / slope
    return total


def parse_schedule(spec: str) -> CoolingSchedule:
    kind, _, rest = spec.partition(":")
    if kind == "const":
        return ConstantSchedule(float(rest))
    if kind == "log":
        params = {}
        for item in filter(None, rest.split(",")):
            k, _, v = item.partition("=")
            params[k.strip()] = math.e if v.strip() == "e" else float(v)
        if "c" not in params:
            raise ValueError("log schedule needs c=<value>")
        return LogSchedule(params["c"], params.get("t0", math.e))
    if kind == "table":
        data = np.loadtxt(rest, ndmin=2)
        return TableSchedule(tuple(data[:, 0]), tuple(data[:, 1]), source=rest)
    raise ValueError(f"unknown schedule spec {spec!r}")


def _criterion_integrand(s: CoolingSchedule, E: float):
    def f(u):
        b = float(s.beta(u))
        return math.sqrt(b) * math.exp(-E * b)

    return f


def divergence_test(s: CoolingSchedule, E: float, octaves: int = 20, k0: int = 0) -> str:
    """Does ``int_0^inf eps_s^{-1/2} exp(-E/eps_s) ds`` diverge?

    Constant and logarithmic schedules are decided analytically (the log
    family diverges iff ``E <= c``). Other schedules use a dyadic heuristic:
    partial integrals over ``[2^k, 2^(k+1)]`` that never shrink mean
    divergence, a clean geometric decay means convergence, anything else is
    inconclusive.
    """
    if E < 0:
        raise ValueError("E must be non-negative")
    if isinstance(s, ConstantSchedule) or E == 0.0:
        return DIVERGES
    if isinstance(s, LogSchedule):
        return DIVERGES if E <= s.c else CONVERGES
    f = _criterion_integrand(s, E)
    parts = np.array(
        [quad(f, 2.0**k, 2.0 ** (k + 1), limit=200)[0] for k in range(k0, k0 + octaves)]
    )
    if np.all(parts == 0):
        return CONVERGES
    tail = parts[octaves // 2 :]
    ratios = tail[1:] / np.where(tail[:-1] > 0, tail[:-1], np.nan)
    if np.all(ratios >= 1.0):
        return DIVERGES
    if np.all(ratios <= 0.9):
        return CONVERGES
    return INCONCLUSIVE


def inverse_beta_growth_check(
    s: CoolingSchedule, theta: float, eta: float, t_min: float = 3.0, t_max: float = 1e8, n: int = 400
) -> bool:
    """Check ``d/dt (1/eps_t) <= 1/((theta+eta) t)`` on a geometric grid of ``[t_min, t_max]``."""
    if theta <= 0 or eta <= 0:
        raise ValueError("theta and eta must be positive")
    ts = np.geomspace(t_min, t_max, n)
    h = 1e-4
    deriv = (s.beta(ts * (1 + h)) - s.beta(ts * (1 - h))) / (2 * h * ts)
    bound = 1.0 / ((theta + eta) * ts)
    return bool(np.all(deriv <= bound * (1 + 1e-6)))
