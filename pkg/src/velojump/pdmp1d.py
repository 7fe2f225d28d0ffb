"""Exact simulation of the 1D velocity-jump process.

The velocity ``y`` in {-1, +1} flips at rate ``(y U'(x))_+ / eps_t + r(x)``.
Two independent exponential clocks are kept: the minimal clock fires when the
accrued ``int (y U')_+ / eps_u du`` reaches a fresh Exp(1) budget ``E``, the
residual clock when ``int r(x + y u) du`` reaches a fresh budget ``F``. After
every flip ``E`` is drawn first, then ``F`` (only when a residual rate is
present).

Two interchangeable routes compute the same path from the same random
stream. The reference route below works with any :class:`Potential1D`
through its callables and scipy; the compiled route in
:mod:`velojump._engine1d` handles the built-in piecewise-polynomial families
and is what the batch drivers use.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from . import _engine1d as eng
from .errors import NumericalError
from .potential import Potential1D
from .schedules import ConstantSchedule, CoolingSchedule, LogSchedule, TableSchedule

MAX_EVENTS = 10**9
KIND_NAMES = ("flip_minimal", "flip_residual", "hit", "horizon")
STATUS_NAMES = ("horizon", "hit", "flip_limit", "runaway", "numerical", "stuck")
T_TOL = 1e-13


@dataclass(frozen=True)
class State1D:
    x: float
    y: int
    t: float = 0.0

    def __post_init__(self):
        if self.y not in (-1, 1):
            raise ValueError("velocity must be -1 or +1")
        object.__setattr__(self, "y", int(self.y))
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "t", float(self.t))


@dataclass
class EventLog:
    """Events after the initial state ``(t0, x0, y0)``; ``kinds`` index :data:`KIND_NAMES`.

    ``budgets`` holds the exponential variate consumed by each flip (nan for
    the terminal hit/horizon event).
    """

    t0: float
    x0: float
    y0: int
    times: np.ndarray
    positions: np.ndarray
    kinds: np.ndarray
    budgets: np.ndarray
    truncated: bool = False

    def __len__(self):
        return len(self.times)

    def kind_names(self) -> list[str]:
        return [KIND_NAMES[k] for k in self.kinds]

    def velocities(self) -> np.ndarray:
        """Velocity in force on the segment ending at each event."""
        flips = np.isin(self.kinds, (0, 1))
        before = np.concatenate([[0], np.cumsum(flips)[:-1]])
        return self.y0 * (-1) ** before

    def check(self, tol: float = 1e-9) -> None:
        t = np.concatenate([[self.t0], self.times])
        x = np.concatenate([[self.x0], self.positions])
        if np.any(np.diff(t) <= 0):
            raise AssertionError("event times must increase strictly")
        if not np.allclose(np.abs(np.diff(x)), np.diff(t), rtol=0, atol=tol * (1 + np.abs(t[1:]))):
            raise AssertionError("positions inconsistent with unit speed")


@dataclass
class SimResult:
    state: State1D
    status: str
    n_minimal: int
    n_residual: int
    log: EventLog | None = None
    hist: np.ndarray | None = None
    plus_time: float = 0.0
    snap_x: np.ndarray | None = None
    snap_y: np.ndarray | None = None

    @property
    def n_flips(self) -> int:
        return self.n_minimal + self.n_residual


# ----------------------------------------------------------------- residual rates


class ResidualRate:
    """Nonnegative position-dependent extra jump rate, bounded by ``bound``."""

    bound: float = 0.0

    def __call__(self, x):
        raise NotImplementedError

    def distance_to(self, x: float, y: int, F: float) -> float:
        """Distance ``W`` travelled from ``x`` in direction ``y`` with ``int_0^W r = F``."""
        raise NotImplementedError

    def kernel_args(self):
        raise TypeError(f"{type(self).__name__} has no compiled form")


@dataclass(frozen=True)
class ConstantRate(ResidualRate):
    rho: float

    def __post_init__(self):
        if self.rho < 0:
            raise ValueError("residual rate must be nonnegative")

    @property
    def bound(self):
        return self.rho

    @property
    def spec(self):
        return f"const:{self.rho:g}"

    def __call__(self, x):
        return self.rho + 0.0 * np.asarray(x, dtype=float)

    def distance_to(self, x, y, F):
        return F / self.rho if self.rho > 0 else math.inf

    def kernel_args(self):
        return eng.R_CONST, float(self.rho), np.empty(0), np.zeros(1)


@dataclass(frozen=True)
class PiecewiseConstantRate(ResidualRate):
    """``values[i]`` on ``[breaks[i-1], breaks[i])``; the outer values extend to infinity."""

    breaks: tuple
    values: tuple
    source: str = "table"

    def __post_init__(self):
        b = np.asarray(self.breaks, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if len(v) != len(b) + 1:
            raise ValueError("need one more value than breakpoints")
        if np.any(np.diff(b) <= 0):
            raise ValueError("breakpoints must increase")
        if np.any(v < 0):
            raise ValueError("residual rate must be nonnegative")
        object.__setattr__(self, "breaks", tuple(b))
        object.__setattr__(self, "values", tuple(v))

    @property
    def bound(self):
        return max(self.values)

    @property
    def spec(self):
        return f"table:{self.source}"

    def __call__(self, x):
        j = np.searchsorted(np.asarray(self.breaks), x, side="right")
        return np.asarray(self.values)[j]

    def distance_to(self, x, y, F):
        edges = np.asarray(self.breaks)
        vals = self.values
        pos, rem, travelled = x, F, 0.0
        while True:
            if y > 0:
                k = int(np.searchsorted(edges, pos, side="right"))
                nxt, rate = (edges[k] if k < len(edges) else math.inf), vals[k]
            else:
                k = int(np.searchsorted(edges, pos, side="left")) - 1
                nxt, rate = (edges[k] if k >= 0 else -math.inf), vals[k + 1]
            if not math.isfinite(nxt):
                return travelled + rem / rate if rate > 0 else math.inf
            L = abs(nxt - pos)
            if rate * L >= rem:
                return travelled + rem / rate
            rem -= rate * L
            travelled += L
            pos = nxt

    def kernel_args(self):
        return eng.R_PWC, 0.0, np.asarray(self.breaks, dtype=float), np.asarray(self.values, dtype=float)


@dataclass(frozen=True)
class FunctionRate(ResidualRate):
    """Arbitrary rate function; integrated by quadrature over unit-length panels."""

    func: Callable
    bound: float
    spec: str = "function"

    def __call__(self, x):
        v = np.asarray(self.func(x), dtype=float)
        if np.any(v < 0):
            raise ValueError(f"residual rate is negative near x={x}")
        return v

    def distance_to(self, x, y, F):
        f = lambda u: float(self(x + y * u))
        done, rem, L = 0.0, F, 1.0
        for _ in range(200):
            gain = quad(f, done, done + L, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
            if gain >= rem:
                g = lambda w: quad(f, done, w, epsabs=1e-13, epsrel=1e-12, limit=200)[0] - rem
                return brentq(g, done, done + L, xtol=T_TOL)
            rem -= gain
            done += L
            L *= 2.0
        return math.inf


def parse_rate(spec: str) -> ResidualRate:
    """``const:<rho>`` or a two-column file ``x rate`` (rate held on ``[x_i, x_{i+1})``)."""
    if spec.startswith("const:"):
        return ConstantRate(float(spec.split(":", 1)[1]))
    data = np.loadtxt(spec, ndmin=2)
    return PiecewiseConstantRate(tuple(data[1:, 0]), tuple(data[:, 1]), source=spec)


# ----------------------------------------------------------------- reference clocks


def _next_cp(cps: np.ndarray, x: float, y: int) -> float:
    if y > 0:
        i = np.searchsorted(cps, x, side="right")
        return float(cps[i]) if i < len(cps) else math.inf
    i = np.searchsorted(cps, x, side="left") - 1
    return float(cps[i]) if i >= 0 else -math.inf


def accrued(p: Potential1D, x: float, y: int, t: float, schedule: CoolingSchedule, t_end: float) -> float:
    """``int_t^{t_end} (y U'(x + y(u - t)))_+ beta(u) du`` by adaptive quadrature."""
    if t_end <= t:
        return 0.0
    kinks = [t + abs(b - x) for b in list(p.breaks) + list(p.cp_positions) if (b - x) * y > 0]
    kinks = sorted(k for k in kinks if k < t_end)
    f = lambda u: max(y * float(p.deriv(x + y * (u - t))), 0.0) * float(schedule.beta(u))
    edges = [t] + kinks + [t_end]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if b > a:
            val, err = quad(f, a, b, epsabs=1e-14, epsrel=1e-13, limit=400)
            total += val
    return total


def next_minimal_jump(p: Potential1D, s: State1D, schedule: CoolingSchedule, E: float) -> float:
    """Absolute time of the next minimal-rate flip (``inf`` if it never happens)."""
    if not E > 0:
        raise ValueError("budget must be positive")
    const = isinstance(schedule, ConstantSchedule)
    rem = E * schedule.value if const else E
    y = s.y
    pos, tp = s.x, s.t
    U = lambda z: float(p.eval(z))
    while True:
        nxt = _next_cp(p.cp_positions, pos, y)
        if math.isfinite(nxt):
            u0, u1 = U(pos), U(nxt)
            L = abs(nxt - pos)
            if u1 > u0:
                if const:
                    if u1 - u0 >= rem:
                        z = brentq(lambda z: U(z) - u0 - rem, *sorted((pos, nxt)), xtol=T_TOL)
                        return s.t + abs(z - s.x)
                    rem -= u1 - u0
                else:
                    gain = accrued(p, pos, y, tp, schedule, tp + L)
                    if gain >= rem:
                        g = lambda T: accrued(p, pos, y, tp, schedule, T) - rem
                        return brentq(g, tp, tp + L, xtol=T_TOL)
                    rem -= gain
            pos, tp = nxt, tp + L
            continue
        u0 = U(pos)
        if U(pos + y) <= u0:
            return math.inf
        if const:
            d = 1.0
            while U(pos + y * d) < u0 + rem:
                d *= 2.0
            lo = pos + y * d / 2 if d > 1 else pos
            z = brentq(lambda z: U(z) - u0 - rem, *sorted((lo, pos + y * d)), xtol=T_TOL)
            return s.t + abs(z - s.x)
        L = 1.0
        while True:
            gain = accrued(p, pos, y, tp, schedule, tp + L)
            if gain >= rem:
                g = lambda T: accrued(p, pos, y, tp, schedule, T) - rem
                return brentq(g, tp, tp + L, xtol=T_TOL)
            rem -= gain
            pos, tp, L = pos + y * L, tp + L, 2.0 * L


def next_residual_jump(r: ResidualRate | None, s: State1D, F: float) -> float:
    """Absolute time of the next residual flip (``inf`` for a zero rate)."""
    if r is None:
        return math.inf
    if not F > 0:
        raise ValueError("budget must be positive")
    return s.t + r.distance_to(s.x, s.y, F)


# ----------------------------------------------------------------- packing


def pack_potential(p: Potential1D):
    pc = p.pieces
    if pc is None:
        raise TypeError("compiled engine needs a piecewise-polynomial potential")
    lin = np.all(pc.coefs[:, 2:] == 0.0, axis=1)
    return pc.breaks, pc.origins, pc.coefs, lin, np.ascontiguousarray(p.cp_positions)


def pack_schedule(s: CoolingSchedule):
    if isinstance(s, ConstantSchedule):
        return eng.S_CONST, float(s.value), 0.0, np.zeros(1), np.ones(1)
    if isinstance(s, LogSchedule):
        return eng.S_LOG, float(s.c), float(s.t0), np.zeros(1), np.ones(1)
    if isinstance(s, TableSchedule):
        return eng.S_TABLE, 0.0, 0.0, np.asarray(s.times, float), np.asarray(s.values, float)
    raise TypeError(f"no compiled form for {type(s).__name__}")


def pack_rate(r: ResidualRate | None):
    if r is None:
        return eng.R_NONE, 0.0, np.empty(0), np.zeros(1)
    return r.kernel_args()


def compiled_ok(p: Potential1D, schedule, rate) -> bool:
    try:
        pack_potential(p), pack_schedule(schedule), pack_rate(rate)
    except TypeError:
        return False
    return True


def _targets(hit) -> np.ndarray:
    if hit is None:
        return np.empty(0)
    return np.atleast_1d(np.asarray(hit, dtype=float))


def _raise_for(status: str):
    if status == "numerical":
        raise NumericalError("root finding or quadrature did not converge")
    if status == "runaway":
        raise NumericalError("event limit exceeded (runaway guard)")
    if status == "stuck":
        raise NumericalError("no further event and no stopping rule: the path runs off forever")


# ----------------------------------------------------------------- simulation


def _simulate_python(p, s0, schedule, rate, horizon, targets, max_flips, max_events, rng,
                     edges, snap_t, log_capacity):
    x, y, t = s0.x, s0.y, s0.t
    n_min = n_res = 0
    lt, lx, lk, lb = [], [], [], []
    hist = np.zeros(max(len(edges) - 1, 0))
    plus = 0.0
    snap_x = np.full(len(snap_t), np.nan)
    snap_y = np.zeros(len(snap_t), dtype=int)
    isnap = 0
    E = rng.exponential()
    F = rng.exponential() if rate is not None else 0.0
    while True:
        s = State1D(x, y, t)
        T1 = next_minimal_jump(p, s, schedule, E)
        T2 = next_residual_jump(rate, s, F) if rate is not None else math.inf
        Tn, kind = (T1, 0) if T1 <= T2 else (T2, 1)
        t_hit, x_hit = math.inf, 0.0
        for xs in targets:
            d = (xs - x) * y
            if d > 0 and t + d < t_hit:
                t_hit, x_hit = t + d, xs
        t_end = min(Tn, horizon, t_hit)
        if not math.isfinite(t_end):
            status = "stuck"
            break
        while isnap < len(snap_t) and snap_t[isnap] <= t_end:
            snap_x[isnap], snap_y[isnap] = x + y * (snap_t[isnap] - t), y
            isnap += 1
        if len(edges) > 1:
            lo, hi = sorted((x, x + y * (t_end - t)))
            hist += np.clip(np.minimum(hi, edges[1:]) - np.maximum(lo, edges[:-1]), 0.0, None)
        if y > 0:
            plus += t_end - t
        if t_hit <= Tn and t_hit <= horizon:
            status, t, x = "hit", t_hit, x_hit
            break
        if horizon < Tn:
            status, x, t = "horizon", x + y * (horizon - t), horizon
            break
        x, t, y = x + y * (Tn - t), Tn, -y
        if len(lt) < log_capacity:
            lt.append(t), lx.append(x), lk.append(kind), lb.append(E if kind == 0 else F)
        if kind == 0:
            n_min += 1
        else:
            n_res += 1
        if max_flips > 0 and n_min + n_res >= max_flips:
            status = "flip_limit"
            break
        if n_min + n_res >= max_events:
            status = "runaway"
            break
        E = rng.exponential()
        if rate is not None:
            F = rng.exponential()
    return status, t, x, y, n_min, n_res, (lt, lx, lk, lb), hist, plus, snap_x, snap_y


def simulate(
    p: Potential1D,
    s0: State1D,
    schedule: CoolingSchedule,
    rate: ResidualRate | None = None,
    *,
    horizon: float = math.inf,
    hit=None,
    rng: np.random.Generator | None = None,
    seed: int | None = None,
    max_flips: int = 0,
    max_events: int = MAX_EVENTS,
    record: bool = True,
    log_capacity: int = 10**6,
    hist_edges=None,
    snap_times=None,
    engine: str = "auto",
) -> SimResult:
    """Run one path until the horizon, a hit of any position in ``hit``, or ``max_flips`` flips.

    A hit is the first time ``X`` reaches a target strictly ahead of its
    current position, so the starting point itself does not count.
    ``hist_edges`` accumulates the exact time spent per position bin and
    ``snap_times`` records the state at given absolute times.
    """
    if rng is None:
        if seed is None:
            raise ValueError("pass rng or seed")
        rng = np.random.default_rng(seed)
    if not (math.isfinite(horizon) or hit is not None or max_flips > 0):
        raise ValueError("need a horizon, a hit target or a flip limit")
    if rate is not None and isinstance(rate, ConstantRate) and rate.rho == 0:
        rate = None
    targets = _targets(hit)
    edges = np.empty(0) if hist_edges is None else np.asarray(hist_edges, dtype=float)
    snap_t = np.empty(0) if snap_times is None else np.sort(np.asarray(snap_times, dtype=float))
    cap = log_capacity if record else 0
    if engine == "auto":
        engine = "numba" if compiled_ok(p, schedule, rate) else "python"
    if engine == "numba":
        hist = np.zeros(max(len(edges) - 1, 0))
        plus = np.zeros(1)
        snap_x = np.full(len(snap_t), np.nan)
        snap_y = np.zeros(len(snap_t))
        bufs = np.empty(cap), np.empty(cap), np.empty(cap, dtype=np.int64), np.empty(cap)
        st, t, x, y, n_min, n_res, n_log = eng.run_path(
            *pack_potential(p), *pack_schedule(schedule), *pack_rate(rate),
            s0.x, float(s0.y), s0.t, float(horizon), targets, int(max_flips), int(max_events), rng,
            edges, hist, plus, snap_t, snap_x, snap_y, *bufs,
        )
        status = STATUS_NAMES[st]
        logged = tuple(b[:n_log] for b in bufs)
        plus = float(plus[0])
        snap_y = snap_y.astype(int)
        y = int(y)
    elif engine == "python":
        status, t, x, y, n_min, n_res, logged, hist, plus, snap_x, snap_y = _simulate_python(
            p, s0, schedule, rate, horizon, targets, max_flips, max_events, rng, edges, snap_t, cap
        )
    else:
        raise ValueError(f"unknown engine {engine!r}")
    _raise_for(status)
    log = None
    if record:
        lt, lx, lk, lb = (np.asarray(v) for v in logged)
        truncated = (n_min + n_res) > len(lt)
        if status in ("hit", "horizon"):
            lt = np.append(lt, t)
            lx = np.append(lx, x)
            lk = np.append(lk, 2 if status == "hit" else 3)
            lb = np.append(lb, np.nan)
        log = EventLog(s0.t, s0.x, s0.y, lt.astype(float), lx.astype(float), lk.astype(int), lb.astype(float),
                       truncated)
    return SimResult(
        State1D(x, y, t), status, int(n_min), int(n_res), log,
        hist if len(edges) > 1 else None, plus,
        snap_x if len(snap_t) else None, snap_y if len(snap_t) else None,
    )


# ----------------------------------------------------------------- batches


def run_rng(seed: int, run_id: int) -> np.random.Generator:
    """Independent stream for run ``run_id`` of master seed ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(run_id),)))


@dataclass
class BatchResult:
    t_end: np.ndarray
    x_end: np.ndarray
    y_end: np.ndarray
    n_minimal: np.ndarray
    n_residual: np.ndarray
    status: np.ndarray
    snap_x: np.ndarray | None = None
    snap_times: np.ndarray | None = field(default=None)

    @property
    def n_flips(self):
        return self.n_minimal + self.n_residual


def run_batch(
    p: Potential1D,
    s0: State1D,
    schedule: CoolingSchedule,
    rate: ResidualRate | None = None,
    *,
    n_runs: int,
    seed: int,
    horizon: float = math.inf,
    hit=None,
    max_flips: int = 0,
    snap_times=None,
    engine: str = "auto",
    first_run: int = 0,
) -> BatchResult:
    """Independent runs from ``s0``; run ``k`` uses :func:`run_rng` ``(seed, first_run + k)``."""
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    if rate is not None and isinstance(rate, ConstantRate) and rate.rho == 0:
        rate = None
    if engine == "auto":
        engine = "numba" if compiled_ok(p, schedule, rate) else "python"
    snap_t = np.empty(0) if snap_times is None else np.sort(np.asarray(snap_times, dtype=float))
    out = {k: np.empty(n_runs) for k in ("t", "x", "y")}
    counts = np.zeros((n_runs, 2), dtype=np.int64)
    status = np.empty(n_runs, dtype=np.int64)
    snaps = np.full((n_runs, len(snap_t)), np.nan)
    if engine == "numba":
        args_p, args_s, args_r = pack_potential(p), pack_schedule(schedule), pack_rate(rate)
        targets = _targets(hit)
        empty, none_i = np.empty(0), np.empty(0, dtype=np.int64)
        for k in range(n_runs):
            sx, sy = np.full(len(snap_t), np.nan), np.zeros(len(snap_t))
            st, t, x, y, a, b, _ = eng.run_path(
                *args_p, *args_s, *args_r, s0.x, float(s0.y), s0.t, float(horizon), targets,
                int(max_flips), MAX_EVENTS, run_rng(seed, first_run + k),
                empty, empty, np.zeros(1), snap_t, sx, sy, empty, empty, none_i, empty,
            )
            _raise_for(STATUS_NAMES[st])
            out["t"][k], out["x"][k], out["y"][k] = t, x, y
            counts[k] = a, b
            status[k] = st
            snaps[k] = sx
    else:
        for k in range(n_runs):
            res = simulate(p, s0, schedule, rate, horizon=horizon, hit=hit, rng=run_rng(seed, first_run + k),
                           max_flips=max_flips, record=False, snap_times=snap_t, engine=engine)
            out["t"][k], out["x"][k], out["y"][k] = res.state.t, res.state.x, res.state.y
            counts[k] = res.n_minimal, res.n_residual
            status[k] = STATUS_NAMES.index(res.status)
            if len(snap_t):
                snaps[k] = res.snap_x
    return BatchResult(out["t"], out["x"], out["y"].astype(int), counts[:, 0], counts[:, 1], status,
                       snaps if len(snap_t) else None, snap_t if len(snap_t) else None)


def first_hitting_time_batch(
    p: Potential1D,
    s0: State1D,
    schedule: CoolingSchedule,
    rate: ResidualRate | None,
    x_star: float,
    n_runs: int,
    seed: int,
    engine: str = "auto",
) -> np.ndarray:
    """Hitting times ``tau = inf{t > 0 : X_t = x_star}`` of ``n_runs`` independent runs."""
    res = run_batch(p, s0, schedule, rate, n_runs=n_runs, seed=seed, hit=x_star, engine=engine)
    return res.t_end - s0.t


@dataclass
class EscapeTrials:
    """One-shot attempts from ``(x0, +1)`` stopped at the first visit of ``{x0, x1}``."""

    escaped: np.ndarray
    eta: np.ndarray
    n_flips: np.ndarray

    @property
    def n(self):
        return len(self.escaped)

    @property
    def fraction(self):
        return float(np.mean(self.escaped))


def escape_trials(p: Potential1D, eps: float, n: int, seed: int, rate: ResidualRate | None = None,
                  engine: str = "auto") -> EscapeTrials:
    x0, x1, _ = p.double_well()
    res = run_batch(p, State1D(x0, 1), ConstantSchedule(eps), rate, n_runs=n, seed=seed, hit=(x0, x1),
                    engine=engine)
    return EscapeTrials(np.abs(res.x_end - x1) < 1e-12, res.t_end, res.n_flips)


def escape_probability_formula(p: Potential1D, rate, eps: float, x0: float | None = None,
                               x1: float | None = None) -> float:
    """Probability of reaching ``x1`` before returning to ``x0`` from ``(x0, +1)``.

    ``exp(-(U(x1) - U(x0))/eps) / (1 + int_{x0}^{x1} r(z) exp(-(U(x1) - U(z))/eps) dz)``.
    """
    if x0 is None or x1 is None:
        x0, x1, _ = p.double_well()
    u1 = float(p.eval(x1))
    num = math.exp(-(u1 - float(p.eval(x0))) / eps)
    if rate is None:
        return num
    r = rate if callable(rate) else (lambda z: rate)
    f = lambda z: float(r(z)) * math.exp(-(u1 - float(p.eval(z))) / eps)
    pts = [b for b in list(p.breaks) + list(getattr(rate, "breaks", ())) if x0 < b < x1]
    val, err = quad(f, x0, x1, points=pts or None, epsabs=0.0, epsrel=1e-12, limit=400)
    if not np.isfinite(val) or err > 1e-10 * max(val, 1e-300) + 1e-300:
        raise NumericalError("residual escape quadrature did not converge")
    return num / (1.0 + val)


@dataclass
class Occupation:
    edges: np.ndarray
    masses: np.ndarray
    plus_fraction: float
    n_flips: int
    time_in_range: float


def occupation_histogram(p: Potential1D, eps: float, horizon: float, bins=50, seed: int = 0,
                         s0: State1D | None = None, rate: ResidualRate | None = None,
                         engine: str = "auto") -> Occupation:
    """Time-averaged law of ``X`` along one long path at fixed temperature."""
    edges = np.linspace(*p.domain, int(bins) + 1) if np.ndim(bins) == 0 else np.asarray(bins, float)
    if s0 is None:
        s0 = State1D(p.minima[0].position if p.minima else 0.0, 1)
    res = simulate(p, s0, ConstantSchedule(eps), rate, horizon=horizon, seed=seed, record=False,
                   hist_edges=edges, engine=engine)
    total = res.hist.sum()
    return Occupation(edges, res.hist / total, res.plus_time / (horizon - s0.t), res.n_flips, float(total))
