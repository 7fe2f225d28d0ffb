"""Mean escape time of the quartic double well against the Eyring-Kramers
prefactor and the exact finite-eps mean, over a range of temperatures."""
import argparse

from velojump.pdmp1d import State1D, run_batch
from velojump.potential import quartic_double_well
from velojump.schedules import ConstantSchedule
from velojump.stats import kramers_exact_mean, kramers_theory, summarize_escapes


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", type=float, nargs="+", default=[0.1, 0.05, 0.033, 0.025])
    ap.add_argument("--runs", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()
    p = quartic_double_well()
    print("eps,mean,stderr,theory,exact,ratio_theory,ratio_exact,ks")
    for i, eps in enumerate(args.eps):
        taus = run_batch(p, State1D(-1.0, -1), ConstantSchedule(eps), n_runs=args.runs, seed=args.seed,
                         hit=0.0, first_run=i * args.runs).t_end
        s = summarize_escapes(taus, kramers_theory(p, eps))
        exact = kramers_exact_mean(p, eps)
        print(f"{eps},{s.mean:.6g},{s.stderr:.3g},{s.theory:.6g},{exact:.6g},{s.ratio:.4f},{s.mean / exact:.4f},{s.ks:.4f}")


if __name__ == "__main__":
    main()
