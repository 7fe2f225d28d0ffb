"""Annealing on the piecewise-linear W potential: fraction of runs near the
global minimum at the horizon for log schedules above and below E* = 1.5."""
import argparse
import math

import numpy as np

from velojump.landscape import critical_depth
from velojump.pdmp1d import State1D, run_batch
from velojump.potential import W_POINTS, piecewise_linear
from velojump.schedules import LogSchedule


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--c", type=float, nargs="+", default=[0.3, 1.0, 2.0, 3.0])
    ap.add_argument("--horizons", type=float, nargs="+", default=[1e3, 1e4, 1e5])
    ap.add_argument("--runs", type=int, default=200)
    ap.add_argument("--seed", type=int, default=700)
    ap.add_argument("--h", type=float, default=0.2)
    args = ap.parse_args()
    w = piecewise_linear(W_POINTS)
    umin = float(np.min(w.cp_values))
    print(f"# critical depth {critical_depth(w)}")
    print("c,horizon,eps_T,near_global,near_start")
    for c in args.c:
        hs = sorted(args.horizons)
        res = run_batch(w, State1D(1.0, 1), LogSchedule(c), n_runs=args.runs, seed=args.seed,
                        horizon=hs[-1], snap_times=hs)
        for j, T in enumerate(hs):
            x = res.snap_x[:, j]
            good = np.mean(w.eval(x) < umin + args.h)
            trapped = np.mean((x > 0) & (x < 2))
            print(f"{c},{T:g},{c / math.log(math.e + T):.4f},{good:.3f},{trapped:.3f}")


if __name__ == "__main__":
    main()
