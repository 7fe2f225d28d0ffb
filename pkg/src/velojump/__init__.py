"""Velocity-jump PDMP Gibbs sampler and simulated annealing.

Modules: ``potential`` (test potentials and critical points), ``landscape``
(depths, cusps, critical depth), ``schedules`` (cooling schedules),
``pdmp1d`` and ``pdmpd`` (the samplers on the line and on the torus),
``stats`` (estimators and quadrature references) and ``cli``.
"""
__version__ = "0.1.0"

from .errors import CriticalPointError, MorseError, NumericalError, ThinningError
from .landscape import analyze, critical_depth, cusp_of, depth_of_minimum, landscape_oracle
from .pdmp1d import State1D, escape_probability_formula, run_batch, simulate
from .pdmpd import StateTorus, reflect, run_torus_batch, simulate_torus
from .potential import (
    Potential1D,
    PotentialTorus,
    cosine_torus,
    load_potential,
    piecewise_linear,
    quartic_double_well,
    two_well_torus,
)
from .schedules import ConstantSchedule, LogSchedule, TableSchedule, divergence_test, parse_schedule
