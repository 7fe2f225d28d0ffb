"""Compiled event loop for the velocity-jump process on the torus ``[0, 1)^d``.

Trigonometric potentials only (wavevectors ``K``, cosine and sine
coefficients ``A`` and ``B``). Per step the refresh clock ``S = Exp(1)/r`` is
drawn first; the reflection clock is then sampled by thinning on time
windows of length 1 with the bound ``grad_sup * beta(window end)``, each
proposal drawing one exponential and then one uniform. A refresh draws ``d``
standard normals (redrawn if the norm is tiny).
"""
import math

import numpy as np
from numba import njit

from ._engine1d import beta

ST_HORIZON, ST_RUNAWAY, ST_THINNING = 0, 3, 6
EV_REFLECT, EV_REFRESH, EV_ZERO_GRAD = 0, 1, 2
WINDOW = 1.0


@njit(cache=True)
def tval(K, A, B, x):
    out = 0.0
    for j in range(K.shape[0]):
        th = 0.0
        for i in range(K.shape[1]):
            th += K[j, i] * x[i]
        th *= 2.0 * math.pi
        out += math.cos(th) * A[j] + math.sin(th) * B[j]
    return out


@njit(cache=True)
def tgrad(K, A, B, x, g):
    for i in range(K.shape[1]):
        g[i] = 0.0
    for j in range(K.shape[0]):
        th = 0.0
        for i in range(K.shape[1]):
            th += K[j, i] * x[i]
        th *= 2.0 * math.pi
        w = -math.sin(th) * A[j] + math.cos(th) * B[j]
        for i in range(K.shape[1]):
            g[i] += w * K[j, i]
    for i in range(K.shape[1]):
        g[i] *= 2.0 * math.pi


@njit(cache=True)
def wrap(v):
    r = v - math.floor(v)
    return 0.0 if r >= 1.0 else r


@njit(cache=True)
def sphere(rng, y):
    d = len(y)
    while True:
        s = 0.0
        for i in range(d):
            y[i] = rng.standard_normal()
            s += y[i] * y[i]
        s = math.sqrt(s)
        if s >= 1e-8:
            break
    for i in range(d):
        y[i] /= s


@njit(cache=True)
def reflect_inplace(y, g):
    """Mirror ``y`` across the hyperplane orthogonal to ``g``; False if ``g`` vanishes."""
    gn = 0.0
    for i in range(len(g)):
        gn += g[i] * g[i]
    gn = math.sqrt(gn)
    if gn <= 1e-14:
        return False
    n = np.empty(len(g))
    dot = 0.0
    for i in range(len(g)):
        n[i] = g[i] / gn
        dot += y[i] * n[i]
    nrm = 0.0
    for i in range(len(y)):
        y[i] = y[i] - (2.0 * dot) * n[i]
        nrm += y[i] * y[i]
    nrm = math.sqrt(nrm)
    if abs(nrm - 1.0) > 1e-13:
        for i in range(len(y)):
            y[i] /= nrm
    return True


@njit(cache=True)
def thinning(K, A, B, G, sk, sp0, sp1, stimes, svals, x, y, t, cap, rng, kx, ky):
    """Next reflection time relative to ``t`` if it occurs before ``cap``.

    Returns ``(u, status)``: ``u = inf`` when nothing is accepted before
    ``cap``; status 1 flags an acceptance ratio above one. The directional
    slope is evaluated from ``k.x`` and ``k.y`` computed once per call (the
    potential is periodic, so positions need no wrapping here).
    """
    m = K.shape[0]
    for j in range(m):
        a = 0.0
        b = 0.0
        for i in range(K.shape[1]):
            a += K[j, i] * x[i]
            b += K[j, i] * y[i]
        kx[j] = a
        ky[j] = b
    two_pi = 2.0 * math.pi
    u = 0.0
    while u < cap:
        w_end = min(u + WINDOW, cap)
        lam = G * beta(sk, sp0, sp1, stimes, svals, t + w_end)
        if lam <= 0.0:
            u = w_end
            continue
        while True:
            u += rng.exponential() / lam
            if u > w_end:
                u = w_end
                break
            slope = 0.0
            for j in range(m):
                if ky[j] != 0.0:
                    th = two_pi * (kx[j] + ky[j] * u)
                    w = -math.sin(th) * A[j]
                    if B[j] != 0.0:
                        w += math.cos(th) * B[j]
                    slope += ky[j] * w
            slope *= two_pi
            v = rng.random()
            # beta(t + u) <= beta(window end), so v >= slope / G already rejects
            if slope <= 0.0 or (v * G >= slope and slope <= G):
                continue
            ratio = slope * beta(sk, sp0, sp1, stimes, svals, t + u) / lam
            if ratio > 1.0 + 1e-12:
                return u, 1
            if v < ratio:
                return u, 0
    return np.inf, 0


@njit(cache=True)
def run_torus(K, A, B, G, sk, sp0, sp1, stimes, svals, refresh, x, y, t, horizon, max_events, rng,
              edges, hist, dt, snap_t, snap_x, snap_u, log_t, log_k, log_pre, log_post, log_g):
    """Advance ``(x, y)`` in place to ``horizon``; returns ``(status, t, n_reflect, n_refresh, n_log)``."""
    d = len(x)
    z = np.empty(d)
    g = np.zeros(d)
    kx = np.empty(K.shape[0])
    ky = np.empty(K.shape[0])
    n_ref = 0
    n_fresh = 0
    n_log = 0
    cap_log = log_t.shape[0]
    isnap = 0
    nsnap = len(snap_t)
    next_sample = (math.floor(t / dt) + 1.0) * dt if dt > 0.0 else np.inf
    nbin = len(edges) - 1
    while True:
        S = rng.exponential() / refresh
        cap = min(S, horizon - t)
        u, bad = thinning(K, A, B, G, sk, sp0, sp1, stimes, svals, x, y, t, cap, rng, kx, ky)
        if bad:
            return ST_THINNING, t, n_ref, n_fresh, n_log
        step = min(u, cap)
        t_end = t + step
        while next_sample <= t_end:
            for i in range(d):
                z[i] = wrap(x[i] + y[i] * (next_sample - t))
            v = tval(K, A, B, z)
            k = np.searchsorted(edges, v, side="right") - 1
            if k < 0:
                k = 0
            if k >= nbin:
                k = nbin - 1
            hist[k] += 1.0
            next_sample += dt
        while isnap < nsnap and snap_t[isnap] <= t_end:
            for i in range(d):
                snap_x[isnap, i] = wrap(x[i] + y[i] * (snap_t[isnap] - t))
            snap_u[isnap] = tval(K, A, B, snap_x[isnap])
            isnap += 1
        if u <= cap:
            for i in range(d):
                x[i] = wrap(x[i] + y[i] * u)
            tgrad(K, A, B, x, g)
            kind = EV_REFLECT
            if n_log < cap_log:
                for i in range(d):
                    log_pre[n_log, i] = y[i]
            if reflect_inplace(y, g):
                n_ref += 1
            else:
                sphere(rng, y)
                n_fresh += 1
                kind = EV_ZERO_GRAD
        elif S <= horizon - t:
            for i in range(d):
                x[i] = wrap(x[i] + y[i] * S)
            kind = EV_REFRESH
            if n_log < cap_log:
                for i in range(d):
                    log_pre[n_log, i] = y[i]
            sphere(rng, y)
            n_fresh += 1
        else:
            for i in range(d):
                x[i] = wrap(x[i] + y[i] * (horizon - t))
            return ST_HORIZON, horizon, n_ref, n_fresh, n_log
        t = t_end
        if n_log < cap_log:
            log_t[n_log] = t
            log_k[n_log] = kind
            for i in range(d):
                log_post[n_log, i] = y[i]
                log_g[n_log, i] = np.nan if kind == EV_REFRESH else g[i]
            n_log += 1
        if n_ref + n_fresh >= max_events:
            return ST_RUNAWAY, t, n_ref, n_fresh, n_log
