"""Ad allocation along predicted user paths, with fatigue, and truthful payments."""
from .assignment import AssignmentState, solve_max_assignment
from .exceptions import (EnumerationLimitExceeded, GeoAdError, InfeasibleAssignmentError,
                         InvalidPlanError, PreconditionError, SearchBudgetExceeded, SearchTimeout)
from .instances import GenConfig, generate_instance, named_fixture, random_small_instance
from .io import load_instance, save_instance
from .mechanism import MechanismOutcome, NotTruthfulError, run_mechanism, utility
from .model import (EMPTY_AD, Advertiser, FatigueModel, Instance, Plan, social_welfare,
                    validate_plan, vtr, vtrs)
from .multi_path import f_am, f_em, f_mp, f_mp_plan
from .oracle import brute_force_optimal, brute_force_restricted
from .single_path import f_a, f_a2, f_dp_distinct_maximal, f_dp_general, f_e
from .solvers import SOLVERS, SolveOptions, solve
from .tree import Path, PathTree, build_tree, chain_tree

__version__ = "0.1.0"
