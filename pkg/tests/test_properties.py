"""Statistical properties beyond the acceptance criteria: torus annealing,
relaxation at fixed temperature, torus invariance and the hitting-time TV bound."""
import math

import numpy as np
import pytest

from velojump.pdmp1d import State1D, run_batch
from velojump.pdmpd import energy_occupation, run_torus_batch
from velojump.potential import cosine_torus, quartic_double_well, two_well_torus
from velojump.schedules import ConstantSchedule, LogSchedule
from velojump.stats import gibbs_density_1d, gibbs_energy_histogram_torus, kramers_exact_mean, tv_histograms

THETA_HAT = 0.5625


def test_torus_annealing_reaches_global_well():
    # gap between the wells is 2b = 1, so h = 0.5 above the global minimum -1.5
    p = two_well_torus(2)
    res = run_torus_batch(p, LogSchedule(THETA_HAT + 0.5), 1.0, horizon=1e5, n_runs=200, seed=51)
    frac = float(np.mean(res.u_end < -1.5 + 0.5))
    print(f"torus annealing success fraction {frac:.3f}")
    assert frac >= 0.8


def test_fixed_temperature_relaxation_tv_nonincreasing():
    # cold enough that leaving the shallow well spans the checkpoints
    p = two_well_torus(2)
    eps = 0.2
    edges = np.linspace(-1.5, 1.5, 21)
    gibbs = gibbs_energy_histogram_torus(p, eps, edges, 256)
    checkpoints = [5.0, 10.0, 20.0, 40.0]
    # every run starts in the shallow well, far from equilibrium
    res = run_torus_batch(p, ConstantSchedule(eps), 1.0, horizon=40.0, n_runs=10_000, seed=52,
                          x0=[0.5, 0.0], snap_times=checkpoints)
    tvs = []
    for j in range(len(checkpoints)):
        h, _ = np.histogram(np.clip(res.snap_u[:, j], edges[0], edges[-1]), bins=edges)
        tvs.append(tv_histograms(h / h.sum(), gibbs))
    print("relaxation TV", [round(v, 4) for v in tvs])
    assert all(b <= a + 0.02 for a, b in zip(tvs, tvs[1:]))
    assert tvs[0] > 0.1 > tvs[-1]


@pytest.mark.parametrize("name", ["cosine", "two_well"])
@pytest.mark.parametrize("eps", [0.3, 0.6])
def test_torus_invariance(name, eps):
    p = cosine_torus(2) if name == "cosine" else two_well_torus(2)
    lo, hi = (-1.0, 1.0) if name == "cosine" else (-1.5, 1.5)
    edges = np.linspace(lo, hi, 41)
    emp = energy_occupation(p, eps, 5e4, edges, seed=53)
    tv = tv_histograms(emp, gibbs_energy_histogram_torus(p, eps, edges, 256))
    assert tv < 0.07


def test_tv_lower_bound_at_mean_hitting_time():
    p = quartic_double_well(-0.1)
    x0, x1, x2 = p.double_well()
    eps = 0.05
    t_eps = kramers_exact_mean(p, eps)
    res = run_batch(p, State1D(x0, -1), ConstantSchedule(eps), n_runs=10_000, seed=54,
                    horizon=t_eps, snap_times=[t_eps])
    frac = float(np.mean(res.snap_x[:, 0] > x1))
    gibbs_right = gibbs_density_1d(p, eps, [p.domain[0], x1, p.domain[1]])[1]
    proxy = gibbs_right - frac
    print(f"P(X > x1) = {frac:.4f}, Gibbs mass right of x1 = {gibbs_right:.4f}, TV proxy = {proxy:.4f}")
    assert frac <= 1 - math.exp(-1) + 0.03
    assert proxy >= math.exp(-1) - 0.05
