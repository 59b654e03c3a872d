"""Entropic and pentagram tests of contextuality for a single qutrit."""

from .entropy import (
    EntropyReport,
    conditional_entropy,
    evaluate_c,
    evaluate_c_from_marginals,
    shannon_entropy,
)
from .feasibility import FeasibilityProblem, FeasibilityResult, brute_force_feasibility_oracle, jpd_exists
from .graphs import (
    CommutationGraph,
    JointDistribution,
    PairwiseMarginals,
    build_clique_tree_jpd,
    build_tree_jpd,
    classify_graph,
    marginalize,
    random_jpd,
)
from .kcbs import classical_kcbs_bound_check, kcbs_value
from .optimize import optimize_general, optimize_two_param, scan_grid
from .quantum import (
    FamilyParams,
    PentagonConfig,
    Projector,
    PureState,
    build_pentagon_family,
    build_symmetric_pentagram,
    check_symmetries,
    four_cycle_collapse,
    outcome_probability,
    pair_joint_distribution,
    rotate_to_state,
)

__version__ = "0.1.0"
