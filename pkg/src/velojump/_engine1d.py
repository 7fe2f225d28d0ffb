"""Compiled event loop for the 1D velocity-jump process on piecewise-polynomial potentials.

Potentials arrive as ``(breaks, origins, coefs)`` arrays (see
:class:`velojump.potential.PiecewisePoly`), schedules as a kind code plus
parameters, residual rates as constant or piecewise-constant tables. The
random stream is a ``numpy.random.Generator`` shared with the caller, drawn in
the same order as the pure-Python reference in :mod:`velojump.pdmp1d`.
"""
import math

import numpy as np
from numba import njit

S_CONST, S_LOG, S_TABLE = 0, 1, 2
R_NONE, R_CONST, R_PWC = 0, 1, 2
ST_HORIZON, ST_HIT, ST_FLIPS, ST_RUNAWAY, ST_NUMERICAL, ST_STUCK = 0, 1, 2, 3, 4, 5
EV_MIN, EV_RES = 0, 1

X_TOL = 1e-13
MAXIT = 200

_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])


# ----------------------------------------------------------------- potential


@njit(cache=True)
def piece_of(breaks, x):
    return np.searchsorted(breaks, x, side="right")


@njit(cache=True)
def pval(origins, coefs, j, x):
    d = x - origins[j]
    c = coefs[j]
    return (((c[4] * d + c[3]) * d + c[2]) * d + c[1]) * d + c[0]


@njit(cache=True)
def pder(origins, coefs, j, x):
    d = x - origins[j]
    c = coefs[j]
    return ((4.0 * c[4] * d + 3.0 * c[3]) * d + 2.0 * c[2]) * d + c[1]


@njit(cache=True)
def next_boundary(cpx, breaks, x, y):
    """Nearest critical point or breakpoint strictly ahead of ``x``; +-inf if none."""
    if y > 0:
        i = np.searchsorted(cpx, x, side="right")
        c = cpx[i] if i < len(cpx) else np.inf
        k = np.searchsorted(breaks, x, side="right")
        b = breaks[k] if k < len(breaks) else np.inf
        return min(c, b)
    i = np.searchsorted(cpx, x, side="left") - 1
    c = cpx[i] if i >= 0 else -np.inf
    k = np.searchsorted(breaks, x, side="left") - 1
    b = breaks[k] if k >= 0 else -np.inf
    return max(c, b)


@njit(cache=True)
def solve_level(origins, coefs, j, a, b, level):
    """Root of ``P_j(z) = level`` between ``a`` (below level) and ``b`` (at or above).

    Newton steps safeguarded by the bracket, started from regula falsi.
    """
    fa = pval(origins, coefs, j, a) - level
    fb = pval(origins, coefs, j, b) - level
    if fb == 0.0:
        return b, True
    lo, hi = a, b
    z = a + (b - a) * (-fa) / (fb - fa)
    for _ in range(MAXIT):
        fz = pval(origins, coefs, j, z) - level
        if fz == 0.0:
            return z, True
        if fz < 0.0:
            lo = z
        else:
            hi = z
        d = pder(origins, coefs, j, z)
        zn = z - fz / d if d != 0.0 else np.nan
        xtol = X_TOL * max(1.0, abs(z))
        if abs(zn - z) < xtol:
            return zn, True
        if not (min(lo, hi) < zn < max(lo, hi)):
            zn = 0.5 * (lo + hi)
        if abs(hi - lo) < xtol:
            return zn, True
        z = zn
    return z, False


# ----------------------------------------------------------------- schedule


@njit(cache=True)
def beta(sk, sp0, sp1, stimes, svals, t):
    if sk == S_CONST:
        return 1.0 / sp0
    if sk == S_LOG:
        v = math.log(sp1 + t)
        return v / sp0 if v > 0.0 else 0.0
    return 1.0 / np.interp(t, stimes, svals)


@njit(cache=True)
def _log_int(c, t0, t1, t2):
    a = max(t0 + t1, 1.0)
    b = t0 + t2
    if b <= a:
        return 0.0
    l = b - a
    return (l * math.log(b) + a * math.log1p(l / a) - l) / c


@njit(cache=True)
def _table_int(times, values, t1, t2):
    total = 0.0
    n = len(times)
    for i in range(n):
        e0 = times[i]
        e1 = times[i + 1] if i + 1 < n else np.inf
        lo = max(t1, e0)
        hi = min(t2, e1)
        if hi <= lo:
            continue
        if i == n - 1:
            total += (hi - lo) / values[i]
            continue
        slope = (values[i + 1] - values[i]) / (times[i + 1] - times[i])
        v_lo = values[i] + slope * (lo - times[i])
        if slope == 0.0:
            total += (hi - lo) / v_lo
        else:
            v_hi = values[i] + slope * (hi - times[i])
            total += math.log(v_hi / v_lo) / slope
    return total


@njit(cache=True)
def beta_int(sk, sp0, sp1, stimes, svals, t1, t2):
    if t2 <= t1:
        return 0.0
    if sk == S_CONST:
        return (t2 - t1) / sp0
    if sk == S_LOG:
        return _log_int(sp0, sp1, t1, t2)
    return _table_int(stimes, svals, t1, t2)


# ----------------------------------------------------------------- accrual


@njit(cache=True)
def _integrand(origins, coefs, j, pos, y, tp, sk, sp0, sp1, stimes, svals, u):
    g = y * pder(origins, coefs, j, pos + y * (u - tp))
    if g <= 0.0:
        return 0.0
    return g * beta(sk, sp0, sp1, stimes, svals, u)


@njit(cache=True)
def _gk15(origins, coefs, j, pos, y, tp, sk, sp0, sp1, stimes, svals, a, b):
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    fc = _integrand(origins, coefs, j, pos, y, tp, sk, sp0, sp1, stimes, svals, c)
    k = fc * _WGK[7]
    g = fc * _WG[3]
    for i in range(7):
        dx = h * _XGK[i]
        f1 = _integrand(origins, coefs, j, pos, y, tp, sk, sp0, sp1, stimes, svals, c - dx)
        f2 = _integrand(origins, coefs, j, pos, y, tp, sk, sp0, sp1, stimes, svals, c + dx)
        k += _WGK[i] * (f1 + f2)
        if i % 2 == 1:
            g += _WG[i // 2] * (f1 + f2)
    return k * h, abs((k - g) * h)


@njit(cache=True)
def accrual(origins, coefs, j, pos, y, tp, sk, sp0, sp1, stimes, svals, a, b, tol):
    """Adaptive Gauss-Kronrod integral of ``(y U')_+ beta`` over times ``[a, b]``."""
    if b <= a:
        return 0.0, True
    sa = np.empty(256)
    sb = np.empty(256)
    sa[0] = a
    sb[0] = b
    n = 1
    total = 0.0
    ok = True
    width = b - a
    while n > 0:
        n -= 1
        lo, hi = sa[n], sb[n]
        v, e = _gk15(origins, coefs, j, pos, y, tp, sk, sp0, sp1, stimes, svals, lo, hi)
        if e <= tol * (hi - lo) / width or hi - lo < 1e-14 * width:
            total += v
        elif n + 2 > 256:
            total += v
            ok = False
        else:
            mid = 0.5 * (lo + hi)
            sa[n], sb[n] = lo, mid
            sa[n + 1], sb[n + 1] = mid, hi
            n += 2
    return total, ok


@njit(cache=True)
def _panel_accrual(origins, coefs, lin, j, pos, y, tp, sk, sp0, sp1, stimes, svals, t_end, tol):
    if lin[j]:
        return abs(coefs[j, 1]) * beta_int(sk, sp0, sp1, stimes, svals, tp, t_end), True
    return accrual(origins, coefs, j, pos, y, tp, sk, sp0, sp1, stimes, svals, tp, t_end, tol)


@njit(cache=True)
def _panel_crossing(origins, coefs, lin, j, pos, y, tp, sk, sp0, sp1, stimes, svals, t_hi, rem, tol):
    """Time ``T`` in ``[tp, t_hi]`` where the panel accrual reaches ``rem``."""
    lo, hi = tp, t_hi
    # beta is nondecreasing, so the accrual is convex in T and the tangent at
    # tp starts Newton from above the root
    d0 = _integrand(origins, coefs, j, pos, y, tp, sk, sp0, sp1, stimes, svals, tp)
    T = tp + rem / d0 if d0 > 0.0 else np.nan
    if not (lo < T < hi):
        T = tp + (t_hi - tp) * 0.5
    xtol = X_TOL * max(1.0, abs(t_hi))
    for _ in range(MAXIT):
        G, ok = _panel_accrual(origins, coefs, lin, j, pos, y, tp, sk, sp0, sp1, stimes, svals, T, tol)
        G -= rem
        if G == 0.0:
            return T, True
        if G < 0.0:
            lo = T
        else:
            hi = T
        d = _integrand(origins, coefs, j, pos, y, tp, sk, sp0, sp1, stimes, svals, T)
        Tn = T - G / d if d > 0.0 else np.nan
        if abs(Tn - T) < xtol:
            return Tn, True
        if not (lo < Tn < hi):
            Tn = 0.5 * (lo + hi)
        if hi - lo < xtol:
            return Tn, True
        T = Tn
    return T, False


@njit(cache=True)
def next_minimal(breaks, origins, coefs, lin, cpx, sk, sp0, sp1, stimes, svals, x, y, t, E):
    """Absolute time of the next minimal-rate jump; ``(T, ok)``."""
    pos = x
    tp = t
    nb = len(breaks)
    if sk == S_CONST:
        rem = E * sp0  # budget in energy units
    else:
        rem = E
    tol = 1e-13 * (1.0 + E)
    for _ in range(10 * (len(cpx) + nb) + 10):
        xb = next_boundary(cpx, breaks, pos, y)
        if np.isfinite(xb):
            j = piece_of(breaks, 0.5 * (pos + xb))
            u0 = pval(origins, coefs, j, pos)
            u1 = pval(origins, coefs, j, xb)
            L = abs(xb - pos)
            if u1 > u0:
                if sk == S_CONST:
                    gain = u1 - u0
                    if gain >= rem:
                        z, ok = solve_level(origins, coefs, j, pos, xb, u0 + rem)
                        return t + abs(z - x), ok
                    rem -= gain
                else:
                    gain, ok = _panel_accrual(origins, coefs, lin, j, pos, y, tp, sk, sp0, sp1, stimes, svals,
                                              tp + L, tol)
                    if not ok:
                        return tp, False
                    if gain >= rem:
                        return _panel_crossing(origins, coefs, lin, j, pos, y, tp, sk, sp0, sp1, stimes, svals,
                                               tp + L, rem, tol)
                    rem -= gain
            pos = xb
            tp += L
            continue
        # monotone tail beyond every critical point and breakpoint
        j = nb if y > 0 else 0
        u0 = pval(origins, coefs, j, pos)
        if pval(origins, coefs, j, pos + y) <= u0:
            return np.inf, True
        if sk == S_CONST:
            level = u0 + rem
            d = 1.0
            lo = pos
            while pval(origins, coefs, j, pos + y * d) < level:
                lo = pos + y * d
                d *= 2.0
                if d > 1e300:
                    return np.inf, False
            z, ok = solve_level(origins, coefs, j, lo, pos + y * d, level)
            return t + abs(z - x), ok
        L = 1.0
        for _ in range(2000):
            gain, ok = _panel_accrual(origins, coefs, lin, j, pos, y, tp, sk, sp0, sp1, stimes, svals, tp + L, tol)
            if not ok:
                return tp, False
            if gain >= rem:
                return _panel_crossing(origins, coefs, lin, j, pos, y, tp, sk, sp0, sp1, stimes, svals,
                                       tp + L, rem, tol)
            rem -= gain
            pos += y * L
            tp += L
            L *= 2.0
        return np.inf, False
    return tp, False


@njit(cache=True)
def next_residual(rk, rho, rb, rv, x, y, t, F):
    """Absolute time of the next residual jump at unit speed."""
    if rk == R_NONE:
        return np.inf
    if rk == R_CONST:
        return t + F / rho if rho > 0.0 else np.inf
    pos = x
    rem = F
    n = len(rb)
    for _ in range(n + 2):
        if y > 0:
            k = np.searchsorted(rb, pos, side="right")
            nxt = rb[k] if k < n else np.inf
            rate = rv[k]
        else:
            k = np.searchsorted(rb, pos, side="left") - 1
            nxt = rb[k] if k >= 0 else -np.inf
            rate = rv[k + 1]
        if not np.isfinite(nxt):
            return t + abs(pos - x) + rem / rate if rate > 0.0 else np.inf
        L = abs(nxt - pos)
        if rate * L >= rem:
            return t + abs(pos - x) + rem / rate
        rem -= rate * L
        pos = nxt
    return np.inf


# ----------------------------------------------------------------- event loop


@njit(cache=True)
def _deposit(edges, hist, x0, x1):
    lo = min(x0, x1)
    hi = max(x0, x1)
    nbin = len(edges) - 1
    i = np.searchsorted(edges, lo, side="right") - 1
    if i < 0:
        i = 0
    while i < nbin and edges[i] < hi:
        ov = min(hi, edges[i + 1]) - max(lo, edges[i])
        if ov > 0.0:
            hist[i] += ov
        i += 1


@njit(cache=True)
def run_path(breaks, origins, coefs, lin, cpx,
             sk, sp0, sp1, stimes, svals,
             rk, rho, rb, rv,
             x, y, t, horizon, targets, max_flips, max_events, rng,
             edges, hist, plus, snap_t, snap_x, snap_y,
             log_t, log_x, log_k, log_b):
    """Simulate one path; returns ``(status, t, x, y, n_min, n_res, n_logged)``."""
    n_min = 0
    n_res = 0
    n_log = 0
    cap = len(log_t)
    isnap = 0
    nsnap = len(snap_t)
    E = rng.exponential()
    F = rng.exponential() if rk != R_NONE else 0.0
    while True:
        T1, ok = next_minimal(breaks, origins, coefs, lin, cpx, sk, sp0, sp1, stimes, svals, x, y, t, E)
        if not ok:
            return ST_NUMERICAL, t, x, y, n_min, n_res, n_log
        T2 = next_residual(rk, rho, rb, rv, x, y, t, F)
        if T1 <= T2:
            Tn, kind = T1, EV_MIN
        else:
            Tn, kind = T2, EV_RES
        t_hit = np.inf
        x_hit = 0.0
        for xs in targets:
            d = (xs - x) * y
            if d > 0.0 and t + d < t_hit:
                t_hit = t + d
                x_hit = xs
        t_end = min(Tn, horizon, t_hit)
        if not np.isfinite(t_end):
            return ST_STUCK, t, x, y, n_min, n_res, n_log
        while isnap < nsnap and snap_t[isnap] <= t_end:
            snap_x[isnap] = x + y * (snap_t[isnap] - t)
            snap_y[isnap] = y
            isnap += 1
        if len(edges) > 1:
            _deposit(edges, hist, x, x + y * (t_end - t))
        if y > 0:
            plus[0] += t_end - t
        if t_hit <= Tn and t_hit <= horizon:
            return ST_HIT, t_hit, x_hit, y, n_min, n_res, n_log
        if horizon < Tn:
            return ST_HORIZON, horizon, x + y * (horizon - t), y, n_min, n_res, n_log
        x = x + y * (Tn - t)
        t = Tn
        y = -y
        if n_log < cap:
            log_t[n_log] = t
            log_x[n_log] = x
            log_k[n_log] = kind
            log_b[n_log] = E if kind == EV_MIN else F
            n_log += 1
        if kind == EV_MIN:
            n_min += 1
        else:
            n_res += 1
        if max_flips > 0 and n_min + n_res >= max_flips:
            return ST_FLIPS, t, x, y, n_min, n_res, n_log
        if n_min + n_res >= max_events:
            return ST_RUNAWAY, t, x, y, n_min, n_res, n_log
        E = rng.exponential()
        if rk != R_NONE:
            F = rng.exponential()
