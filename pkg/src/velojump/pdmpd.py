"""Velocity-jump process on the torus ``[0, 1)^d`` with reflections and refreshment.

The velocity ``y`` on the unit sphere is mirrored across the level set of
``U`` at rate ``(y . grad U(x))_+ / eps_t`` and redrawn uniformly at rate
``r``. The reflection clock is sampled exactly by thinning against the bound
``grad_sup / eps``, recomputed on time windows of length 1 so that it stays
valid for decreasing schedules.

As in :mod:`velojump.pdmp1d` there is a reference route (any
:class:`PotentialTorus`) and a compiled one (trigonometric potentials) that
consume the random stream identically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _engine_torus as engt
from .errors import ThinningError, NumericalError
from .pdmp1d import MAX_EVENTS, pack_schedule, run_rng
from .potential import PotentialTorus
from .schedules import CoolingSchedule

TORUS_KINDS = ("reflect", "refresh", "zero_gradient")
WINDOW = engt.WINDOW


@dataclass(frozen=True)
class StateTorus:
    x: np.ndarray
    y: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        x = np.mod(np.asarray(self.x, dtype=float).reshape(-1), 1.0)
        x[x >= 1.0] = 0.0
        y = np.asarray(self.y, dtype=float).reshape(-1)
        if x.shape != y.shape:
            raise ValueError("position and velocity must have the same dimension")
        if abs(np.linalg.norm(y) - 1.0) > 1e-12:
            raise ValueError("velocity must be a unit vector")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "t", float(self.t))

    @property
    def dim(self):
        return len(self.x)


def reflect(y, g) -> np.ndarray:
    """``y - 2 (y . n) n`` with ``n = g / |g|``."""
    # plain sequential sums (no BLAS) so both simulation routes round identically
    y = [float(v) for v in np.asarray(y, dtype=float).ravel()]
    g = [float(v) for v in np.asarray(g, dtype=float).ravel()]
    gn = 0.0
    for v in g:
        gn += v * v
    gn = math.sqrt(gn)
    if gn <= 1e-14:
        raise ValueError("reflection is undefined where the gradient vanishes")
    n = [v / gn for v in g]
    dot = 0.0
    for a, b in zip(y, n):
        dot += a * b
    out = [a - (2.0 * dot) * b for a, b in zip(y, n)]
    nrm = 0.0
    for v in out:
        nrm += v * v
    nrm = math.sqrt(nrm)
    if abs(nrm - 1.0) > 1e-13:
        out = [v / nrm for v in out]
    return np.array(out)


def sample_uniform_sphere(d: int, rng: np.random.Generator) -> np.ndarray:
    if d < 1:
        raise ValueError("dimension must be >= 1")
    while True:
        v = [rng.standard_normal() for _ in range(d)]
        n = 0.0
        for a in v:
            n += a * a
        n = math.sqrt(n)
        if n >= 1e-8:
            return np.array([a / n for a in v])


def wrapped_distance(a, b) -> float:
    """Euclidean distance on the torus with per-coordinate ``min(|D|, 1 - |D|)``."""
    dlt = np.abs(np.mod(np.asarray(a, float) - np.asarray(b, float), 1.0))
    return float(np.linalg.norm(np.minimum(dlt, 1.0 - dlt)))


def _wrap(v):
    r = np.mod(v, 1.0)
    r[r >= 1.0] = 0.0
    return r


def next_reflection_time_thinning(p: PotentialTorus, s: StateTorus, schedule: CoolingSchedule,
                                  rng: np.random.Generator, cap: float = math.inf):
    """Thinned reflection time (absolute) and the gradient there; ``(inf, None)`` if none before ``cap``.

    ``cap`` is relative to ``s.t``. Raises :class:`ThinningError` when an
    acceptance ratio exceeds one, i.e. ``grad_sup`` is not an upper bound.
    """
    u, g = _thin(p, s.x, s.y, s.t, schedule, rng, cap)
    return (s.t + u, g) if math.isfinite(u) else (math.inf, None)


def _thin(p, x, y, t, schedule, rng, cap):
    u = 0.0
    G = p.grad_sup
    if G == 0.0:
        return math.inf, None
    for _ in range(10**7):
        if u >= cap:
            break
        w_end = min(u + WINDOW, cap)
        lam = G * float(schedule.beta(t + w_end))
        if lam <= 0.0:
            u = w_end
            continue
        while True:
            u += rng.exponential() / lam
            if u > w_end:
                u = w_end
                break
            z = _wrap(x + y * u)
            g = np.asarray(p.grad(z), dtype=float)
            slope = 0.0
            for a, b in zip(y, g):
                slope += a * b
            v = rng.random()
            ratio = max(slope, 0.0) * float(schedule.beta(t + u)) / lam
            if ratio > 1.0 + 1e-12:
                raise ThinningError(f"acceptance ratio {ratio:.6g} > 1: grad_sup={G:g} is not a bound")
            if v < ratio:
                return u, g
    return math.inf, None


@dataclass
class TorusLog:
    """Events of one path; ``y_pre``/``y_post`` bracket each event, ``grad`` is valid for reflections."""

    times: np.ndarray
    kinds: np.ndarray
    y_pre: np.ndarray
    y_post: np.ndarray
    grad: np.ndarray

    def kind_names(self):
        return [TORUS_KINDS[k] for k in self.kinds]


@dataclass
class TorusResult:
    state: StateTorus
    n_reflect: int
    n_refresh: int
    log: TorusLog | None = None
    energy_hist: np.ndarray | None = None
    snap_x: np.ndarray | None = None
    snap_u: np.ndarray | None = None


def _compiled(p: PotentialTorus, schedule) -> bool:
    if p.trig is None:
        return False
    try:
        pack_schedule(schedule)
    except TypeError:
        return False
    return True


def simulate_torus(
    p: PotentialTorus,
    s0: StateTorus,
    schedule: CoolingSchedule,
    refresh: float = 1.0,
    *,
    horizon: float,
    rng: np.random.Generator | None = None,
    seed: int | None = None,
    record: bool = True,
    log_capacity: int = 10**5,
    energy_edges=None,
    sample_dt: float = 0.0,
    snap_times=None,
    max_events: int = MAX_EVENTS,
    engine: str = "auto",
) -> TorusResult:
    """Run to ``horizon``. With ``energy_edges`` and ``sample_dt`` the value ``U(X_t)``
    is binned on the time grid ``k * sample_dt``; ``snap_times`` store positions."""
    if not refresh > 0:
        raise ValueError("refresh rate must be positive")
    if not math.isfinite(horizon):
        raise ValueError("horizon must be finite")
    if s0.dim != p.dim:
        raise ValueError("state dimension does not match the potential")
    if rng is None:
        if seed is None:
            raise ValueError("pass rng or seed")
        rng = np.random.default_rng(seed)
    edges = np.empty(0) if energy_edges is None else np.asarray(energy_edges, dtype=float)
    if len(edges) and not sample_dt > 0:
        raise ValueError("energy histogram needs sample_dt > 0")
    snap_t = np.empty(0) if snap_times is None else np.sort(np.asarray(snap_times, dtype=float))
    if engine == "auto":
        engine = "numba" if _compiled(p, schedule) else "python"
    d = p.dim
    cap = log_capacity if record else 0
    hist = np.zeros(max(len(edges) - 1, 0))
    snap_x = np.full((len(snap_t), d), np.nan)
    snap_u = np.full(len(snap_t), np.nan)
    if engine == "numba":
        x, y = s0.x.copy(), s0.y.copy()
        lt, lk = np.empty(cap), np.empty(cap, dtype=np.int64)
        lpre, lpost, lg = np.empty((cap, d)), np.empty((cap, d)), np.empty((cap, d))
        tr = p.trig
        st, t, n_ref, n_fresh, n_log = engt.run_torus(
            tr.wavevectors, tr.cos_coef, tr.sin_coef, float(p.grad_sup), *pack_schedule(schedule),
            float(refresh), x, y, s0.t, float(horizon), int(max_events), rng,
            edges if len(edges) else np.zeros(2), hist if len(edges) else np.zeros(1),
            float(sample_dt) if len(edges) else 0.0, snap_t, snap_x, snap_u, lt, lk, lpre, lpost, lg,
        )
        if st == engt.ST_THINNING:
            raise ThinningError(f"acceptance ratio > 1: grad_sup={p.grad_sup:g} is not a bound")
        if st == engt.ST_RUNAWAY:
            raise NumericalError("event limit exceeded (runaway guard)")
        log = TorusLog(lt[:n_log], lk[:n_log], lpre[:n_log], lpost[:n_log], lg[:n_log]) if record else None
    elif engine == "python":
        x, y, t, n_ref, n_fresh, log = _simulate_torus_python(
            p, s0, schedule, refresh, horizon, rng, cap, edges, hist, sample_dt, snap_t, snap_x, snap_u, max_events
        )
        if not record:
            log = None
    else:
        raise ValueError(f"unknown engine {engine!r}")
    return TorusResult(StateTorus(x, y, t), int(n_ref), int(n_fresh), log,
                       hist if len(edges) else None,
                       snap_x if len(snap_t) else None, snap_u if len(snap_t) else None)


def _simulate_torus_python(p, s0, schedule, refresh, horizon, rng, cap, edges, hist, dt, snap_t, snap_x,
                           snap_u, max_events):
    x, y, t = s0.x.copy(), s0.y.copy(), s0.t
    n_ref = n_fresh = 0
    rows = []
    next_sample = (math.floor(t / dt) + 1.0) * dt if dt > 0 else math.inf
    isnap = 0
    while True:
        S = rng.exponential() / refresh
        cap_t = min(S, horizon - t)
        u, g = _thin(p, x, y, t, schedule, rng, cap_t)
        t_end = t + min(u, cap_t)
        while next_sample <= t_end:
            v = float(p.eval(_wrap(x + y * (next_sample - t))))
            k = min(max(int(np.searchsorted(edges, v, side="right")) - 1, 0), len(edges) - 2)
            hist[k] += 1.0
            next_sample += dt
        while isnap < len(snap_t) and snap_t[isnap] <= t_end:
            snap_x[isnap] = _wrap(x + y * (snap_t[isnap] - t))
            snap_u[isnap] = float(p.eval(snap_x[isnap]))
            isnap += 1
        pre = y.copy()
        if u <= cap_t:
            x = _wrap(x + y * u)
            g = np.asarray(p.grad(x), dtype=float)
            if np.linalg.norm(g) > 1e-14:
                y = reflect(y, g)
                kind = 0
                n_ref += 1
            else:
                y = sample_uniform_sphere(len(y), rng)
                kind = 2
                n_fresh += 1
        elif S <= horizon - t:
            x = _wrap(x + y * S)
            y = sample_uniform_sphere(len(y), rng)
            kind = 1
            n_fresh += 1
            g = np.full(len(y), np.nan)
        else:
            x = _wrap(x + y * (horizon - t))
            t = horizon
            break
        t = t_end
        if len(rows) < cap:
            rows.append((t, kind, pre, y.copy(), g))
        if n_ref + n_fresh >= max_events:
            raise NumericalError("event limit exceeded (runaway guard)")
    d = len(x)
    log = TorusLog(
        np.array([r[0] for r in rows]), np.array([r[1] for r in rows], dtype=int),
        np.array([r[2] for r in rows]).reshape(-1, d), np.array([r[3] for r in rows]).reshape(-1, d),
        np.array([r[4] for r in rows]).reshape(-1, d),
    )
    return x, y, t, n_ref, n_fresh, log


@dataclass
class TorusBatch:
    x_end: np.ndarray
    u_end: np.ndarray
    n_reflect: np.ndarray
    n_refresh: np.ndarray
    snap_u: np.ndarray | None = None
    snap_x: np.ndarray | None = None
    snap_times: np.ndarray | None = None


def run_torus_batch(
    p: PotentialTorus,
    schedule: CoolingSchedule,
    refresh: float = 1.0,
    *,
    horizon: float,
    n_runs: int,
    seed: int,
    x0=None,
    snap_times=None,
    engine: str = "auto",
) -> TorusBatch:
    """Independent runs; run ``k`` uses :func:`velojump.pdmp1d.run_rng` ``(seed, k)``.

    Without ``x0`` each run starts at a uniform position, and each run's
    initial velocity is always uniform; both come from the run's own stream.
    """
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    d = p.dim
    snap_t = np.empty(0) if snap_times is None else np.sort(np.asarray(snap_times, dtype=float))
    xs = np.empty((n_runs, d))
    us = np.empty(n_runs)
    counts = np.zeros((n_runs, 2), dtype=np.int64)
    su = np.full((n_runs, len(snap_t)), np.nan)
    sx = np.full((n_runs, len(snap_t), d), np.nan)
    for k in range(n_runs):
        rng = run_rng(seed, k)
        start = rng.random(d) if x0 is None else np.asarray(x0, dtype=float)
        s0 = StateTorus(start, sample_uniform_sphere(d, rng))
        res = simulate_torus(p, s0, schedule, refresh, horizon=horizon, rng=rng, record=False,
                             snap_times=snap_t if len(snap_t) else None, engine=engine)
        xs[k] = res.state.x
        us[k] = float(p.eval(res.state.x))
        counts[k] = res.n_reflect, res.n_refresh
        if len(snap_t):
            su[k], sx[k] = res.snap_u, res.snap_x
    return TorusBatch(xs, us, counts[:, 0], counts[:, 1],
                      su if len(snap_t) else None, sx if len(snap_t) else None, snap_t if len(snap_t) else None)


def energy_occupation(p: PotentialTorus, eps: float, horizon: float, edges, *, seed: int, refresh: float = 1.0,
                      sample_dt: float = 0.01, engine: str = "auto") -> np.ndarray:
    """Normalized histogram of ``U(X_t)`` sampled every ``sample_dt`` along one path."""
    from .schedules import ConstantSchedule

    rng = run_rng(seed, 0)
    d = p.dim
    s0 = StateTorus(rng.random(d), sample_uniform_sphere(d, rng))
    res = simulate_torus(p, s0, ConstantSchedule(eps), refresh, horizon=horizon, rng=rng, record=False,
                         energy_edges=edges, sample_dt=sample_dt, engine=engine)
    return res.energy_hist / res.energy_hist.sum()
