"""Exact single-machine speed scaling with discrete speed levels."""
from .core import INF, NEG_INF, Instance, Job, Ordering, SpeedProfile, validate_instance, validate_profile
from .dispatch import dispatch_ordering, realize_two_speed, srpt_schedule
from .greedy import kappa_delta, kappa_delta_c, naive_per_level_sweep, naive_two_speed_sweep, validate_kd_rule
from .lp import build_lp, reconstruct, solve, solve_ordering
from .metrics import Schedule, Segment, affection, evaluate, optimality_witness, perturb_processing_time
from .oracle import audit_optimum, exact_optimum
from .reductions import budget_to_fe, counterexample_instance, subsetsum_to_bidua, subsetsum_to_feidwu

__version__ = "0.1.0"
