"""Command-line driver for the escape, invariance and annealing experiments.

Every subcommand writes a block of ``# key=value`` lines echoing the full
configuration, followed by CSV rows. Runs are seeded per ``run_id`` from the
master seed, so a fixed configuration reproduces its output byte for byte.
"""
from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import __version__
from .errors import NumericalError
from .landscape import analyze
from .pdmp1d import (
    State1D,
    escape_probability_formula,
    occupation_histogram,
    parse_rate,
    run_batch,
)
from .pdmpd import run_torus_batch
from .potential import Potential1D, PotentialTorus, load_potential
from .schedules import ConstantSchedule, parse_schedule
from .stats import gibbs_density_1d, kramers_theory, tv_histograms

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class ConfigError(ValueError):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


class Output:
    """Header lines and CSV rows, buffered and written in one go."""

    def __init__(self):
        self.lines = []

    def meta(self, **kv):
        for k, v in kv.items():
            self.lines.append(f"# {k}={_fmt(v)}")

    def header(self, *cols):
        self.lines.append(",".join(cols))

    def row(self, *vals):
        self.lines.append(",".join("" if v is None else _fmt(v) for v in vals))

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def _eps_list(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError("--eps", f"cannot parse {text!r}")
    if not vals or any(not (v > 0 and math.isfinite(v)) for v in vals):
        raise ConfigError("--eps", "need positive finite temperatures")
    return vals


def _potential(args, want_torus: bool):
    try:
        p = load_potential(args.potential, getattr(args, "dim", 2))
    except (KeyError, ValueError, OSError) as exc:
        raise ConfigError("--potential", str(exc))
    if want_torus and not isinstance(p, PotentialTorus):
        raise ConfigError("--potential", f"{args.potential!r} is not a torus potential")
    if not want_torus and not isinstance(p, Potential1D):
        raise ConfigError("--potential", f"{args.potential!r} is not a one-dimensional potential")
    return p


def _schedule(text: str):
    try:
        return parse_schedule(text)
    except (ValueError, OSError) as exc:
        raise ConfigError("--schedule", str(exc))


def _positive(field, v, allow_inf=False):
    if not (v > 0) or (not allow_inf and not math.isfinite(v)):
        raise ConfigError(field, f"must be positive, got {v}")


def _common_meta(out: Output, args, **extra):
    out.meta(version=__version__, subcommand=args.cmd)
    for k in sorted(vars(args)):
        if k in ("cmd", "func", "out"):
            continue
        out.meta(**{k: getattr(args, k)})
    out.meta(**extra)


def cmd_kramers(args, out: Output):
    p = _potential(args, False)
    eps = _eps_list(args.eps)
    _positive("--runs", args.runs)
    x0, x1, _ = p.double_well()
    _common_meta(out, args, x0=x0, x1=x1, start_velocity=-1)
    for e in eps:
        out.meta(**{f"theory[{e!r}]": kramers_theory(p, e)})
    out.header("eps", "run_id", "tau", "n_flips")
    for i, e in enumerate(eps):
        res = run_batch(p, State1D(x0, -1), ConstantSchedule(e), None, n_runs=args.runs, seed=args.seed,
                        hit=x1, first_run=i * args.runs, engine=args.engine)
        for k in range(args.runs):
            out.row(e, k, float(res.t_end[k]), int(res.n_flips[k]))


def cmd_residual(args, out: Output):
    p = _potential(args, False)
    eps = _eps_list(args.eps)
    _positive("--runs", args.runs)
    try:
        rate = parse_rate(args.rate)
    except (ValueError, OSError) as exc:
        raise ConfigError("--rate", str(exc))
    x0, x1, _ = p.double_well()
    _common_meta(out, args, x0=x0, x1=x1, start_velocity=1)
    for e in eps:
        out.meta(**{f"formula[{e!r}]": escape_probability_formula(p, rate, e)})
    out.header("eps", "run_id", "escaped", "eta", "n_flips")
    for i, e in enumerate(eps):
        res = run_batch(p, State1D(x0, 1), ConstantSchedule(e), rate, n_runs=args.runs, seed=args.seed,
                        hit=(x0, x1), first_run=i * args.runs, engine=args.engine)
        for k in range(args.runs):
            out.row(e, k, int(abs(res.x_end[k] - x1) < 1e-12), float(res.t_end[k]), int(res.n_flips[k]))


def cmd_invariance(args, out: Output):
    p = _potential(args, False)
    eps = _eps_list(args.eps)
    if len(eps) != 1:
        raise ConfigError("--eps", "invariance takes a single temperature")
    _positive("--horizon", args.horizon)
    if args.bins < 2:
        raise ConfigError("--bins", "need at least 2 bins")
    rate = None
    if args.rate:
        try:
            rate = parse_rate(args.rate)
        except (ValueError, OSError) as exc:
            raise ConfigError("--rate", str(exc))
    occ = occupation_histogram(p, eps[0], args.horizon, bins=args.bins, seed=args.seed, rate=rate,
                               engine=args.engine)
    gibbs = gibbs_density_1d(p, eps[0], occ.edges)
    _common_meta(out, args, tv=tv_histograms(occ.masses, gibbs), plus_fraction=occ.plus_fraction,
                 n_flips=occ.n_flips)
    out.header("bin_lo", "bin_hi", "occupation", "gibbs")
    for lo, hi, a, b in zip(occ.edges[:-1], occ.edges[1:], occ.masses, gibbs):
        out.row(float(lo), float(hi), float(a), float(b))


def _checkpoints(args):
    if args.checkpoints:
        try:
            ts = sorted({float(v) for v in args.checkpoints.split(",") if v.strip()})
        except ValueError:
            raise ConfigError("--checkpoints", f"cannot parse {args.checkpoints!r}")
        if any(not (0 < v <= args.horizon) for v in ts):
            raise ConfigError("--checkpoints", "checkpoints must lie in (0, horizon]")
    else:
        ts = []
    if not ts or ts[-1] < args.horizon:
        ts.append(float(args.horizon))
    return ts


def cmd_anneal1d(args, out: Output):
    p = _potential(args, False)
    sched = _schedule(args.schedule)
    _positive("--horizon", args.horizon)
    _positive("--runs", args.runs)
    ts = _checkpoints(args)
    x_start = p.minima[0].position if args.start is None else args.start
    _common_meta(out, args, start_x=x_start, start_velocity=1)
    out.header("run_id", "t_checkpoint", "x", "U_value", "n_flips")
    res = run_batch(p, State1D(x_start, 1), sched, None, n_runs=args.runs, seed=args.seed,
                    horizon=args.horizon, snap_times=ts, engine=args.engine)
    for k in range(args.runs):
        for j, t in enumerate(ts):
            x = float(res.snap_x[k, j])
            out.row(k, t, x, float(p.eval(x)), int(res.n_flips[k]))


def cmd_annealtorus(args, out: Output):
    p = _potential(args, True)
    sched = _schedule(args.schedule)
    _positive("--horizon", args.horizon)
    _positive("--runs", args.runs)
    if args.refresh < 0 or not math.isfinite(args.refresh):
        raise ConfigError("--refresh", "must be a nonnegative finite rate")
    ts = _checkpoints(args)
    _common_meta(out, args, grad_sup=p.grad_sup)
    out.header("run_id", "t_checkpoint", "U_value", "n_reflect", "n_refresh")
    res = run_torus_batch(p, sched, args.refresh, horizon=args.horizon, n_runs=args.runs, seed=args.seed,
                          snap_times=ts, engine=args.engine)
    for k in range(args.runs):
        for j, t in enumerate(ts):
            out.row(k, t, float(res.snap_u[k, j]), int(res.n_reflect[k]), int(res.n_refresh[k]))


def cmd_landscape(args, out: Output):
    p = _potential(args, False)
    rep = analyze(p)
    _common_meta(out, args, critical_depth=rep.critical_depth)
    # human-readable table as comment lines, so the file stays valid CSV
    cols = ["position", "value", "depth", "z_l", "z_r"]
    out.lines.append("#" + "".join(c.rjust(12) for c in cols))
    for r in rep.rows():
        out.lines.append("#" + "".join(f"{v:.6g}".rjust(12) for v in r))
    out.header(*cols)
    for r in rep.rows():
        out.row(*[float(v) for v in r])


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="velojump",
        description="Velocity-jump Gibbs sampler experiments. Output is CSV preceded by '# key=value' metadata.",
    )
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def add(name, func, help, desc, seed=True):
        sp = sub.add_parser(name, help=help, description=desc)
        sp.set_defaults(func=func)
        if seed:
            sp.add_argument("--seed", type=int, required=True, help="master seed (required; runs derive from it)")
            sp.add_argument("--engine", choices=["auto", "numba", "python"], default="auto")
        sp.add_argument("--out", default=None, help="output file (default: stdout)")
        return sp

    sp = add("kramers", cmd_kramers, "mean and law of the barrier crossing time",
             "Start at the left minimum x0 moving left with the minimal jump rate at fixed eps and record "
             "the first hitting time of the saddle x1. Compare the mean with "
             "sqrt(8 pi eps / U''(x0)) exp(dU/eps) and tau/mean with Exp(1).")
    sp.add_argument("--potential", default="double_well")
    sp.add_argument("--eps", default="0.05", help="comma-separated temperatures")
    sp.add_argument("--runs", type=int, default=100)

    sp = add("residual", cmd_residual, "one-shot escape probability with a residual jump rate",
             "Start at (x0, +1) and stop at the first visit of {x0, x1}. The fraction ending at x1 "
             "estimates p_x0, which is compared with the closed-form escape probability for the given "
             "residual rate.")
    sp.add_argument("--potential", default="double_well")
    sp.add_argument("--eps", default="0.05")
    sp.add_argument("--runs", type=int, default=1000)
    sp.add_argument("--rate", default="const:0.5", help="const:rho or a piecewise-constant rate file")

    sp = add("invariance", cmd_invariance, "occupation histogram against the Gibbs density",
             "Run one long path at fixed eps and compare its time-averaged position histogram with the "
             "normalized density exp(-U/eps) (total variation) and its +1 velocity fraction with 1/2.")
    sp.add_argument("--potential", default="double_well")
    sp.add_argument("--eps", default="0.3")
    sp.add_argument("--horizon", type=float, default=1e5)
    sp.add_argument("--bins", type=int, default=50)
    sp.add_argument("--rate", default=None, help="optional residual rate")

    sp = add("anneal1d", cmd_anneal1d, "simulated annealing in one dimension",
             "Cool with the given schedule from the first listed minimum and report X at the checkpoints. "
             "Logarithmic schedules with c above the critical depth should end near the global minimum.")
    sp.add_argument("--potential", default="w")
    sp.add_argument("--schedule", default="log:c=2")
    sp.add_argument("--horizon", type=float, default=1e4)
    sp.add_argument("--runs", type=int, default=20)
    sp.add_argument("--start", type=float, default=None)
    sp.add_argument("--checkpoints", default=None, help="comma-separated times; the horizon is always added")

    sp = add("annealtorus", cmd_annealtorus, "simulated annealing on the torus",
             "Velocity-jump annealing on [0,1)^d with reflections sampled by thinning and Poisson "
             "refreshment of the velocity. Reports U(X) at the checkpoints.")
    sp.add_argument("--dim", type=int, default=2)
    sp.add_argument("--potential", default="two_well")
    sp.add_argument("--schedule", default="log:c=1.0625")
    sp.add_argument("--refresh", type=float, default=1.0)
    sp.add_argument("--horizon", type=float, default=1e3)
    sp.add_argument("--runs", type=int, default=10)
    sp.add_argument("--checkpoints", default=None)

    sp = add("landscape", cmd_landscape, "critical points, depths and cusps of a 1D potential",
             "Print every local minimum with its value, depth and cusp interval, and the critical depth E*.",
             seed=False)
    sp.add_argument("--potential", required=True)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "dim", 1) < 1:
        ap.error("--dim: must be >= 1")
    out = Output()
    try:
        args.func(args, out)
    except ConfigError as exc:
        print(f"velojump {args.cmd}: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"velojump {args.cmd}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    text = out.text()
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
