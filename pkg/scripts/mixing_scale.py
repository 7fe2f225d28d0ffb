"""Law of X at multiples of the mean hitting time on the tilted double well,
compared with the two-point measure m_t in W1 and by P(X > x1)."""
import argparse
import math

import numpy as np

from velojump.pdmp1d import State1D, run_batch
from velojump.potential import quartic_double_well
from velojump.schedules import ConstantSchedule
from velojump.stats import kramers_exact_mean, two_point_measure, wasserstein1_1d


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", type=float, nargs="+", default=[0.1, 0.05, 0.025])
    ap.add_argument("--t", type=float, nargs="+", default=[0.5, 1.0, 2.0])
    ap.add_argument("--runs", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=1000)
    args = ap.parse_args()
    p = quartic_double_well(-0.1)
    x0, x1, x2 = p.double_well()
    print("eps,t,w1,p_right,one_minus_exp")
    for i, eps in enumerate(args.eps):
        mean_tau = kramers_exact_mean(p, eps)
        snaps = [t * mean_tau for t in args.t]
        res = run_batch(p, State1D(x0, -1), ConstantSchedule(eps), n_runs=args.runs, seed=args.seed + i,
                        horizon=max(snaps), snap_times=snaps)
        for j, t in enumerate(args.t):
            x = res.snap_x[:, j]
            w1 = wasserstein1_1d(x, *two_point_measure(x0, x2, t))
            print(f"{eps},{t},{w1:.4f},{np.mean(x > x1):.4f},{1 - math.exp(-t):.4f}")


if __name__ == "__main__":
    main()
