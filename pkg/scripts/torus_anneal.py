"""Annealing on the two-well 2-torus with log schedules (c = theta_hat + eta)."""
import argparse

import numpy as np

from velojump.pdmpd import run_torus_batch
from velojump.potential import two_well_barrier, two_well_torus
from velojump.schedules import LogSchedule


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eta", type=float, nargs="+", default=[-0.4, 0.0, 0.5])
    ap.add_argument("--horizon", type=float, default=1e4)
    ap.add_argument("--runs", type=int, default=200)
    ap.add_argument("--refresh", type=float, default=1.0)
    ap.add_argument("--seed", type=int, default=51)
    args = ap.parse_args()
    p = two_well_torus(2)
    theta = two_well_barrier()
    print(f"# theta_hat {theta}")
    print("c,success,mean_U")
    for eta in args.eta:
        res = run_torus_batch(p, LogSchedule(theta + eta), args.refresh, horizon=args.horizon,
                              n_runs=args.runs, seed=args.seed)
        print(f"{theta + eta},{np.mean(res.u_end < -1.0):.3f},{res.u_end.mean():.4f}")


if __name__ == "__main__":
    main()
