"""Exact-rational statistics and causal analysis of the three-box experiment.

The package reproduces the complete measurement statistics of the quantum
three-box experiment in exact rational arithmetic and mechanically checks
which causal structures (outcome dependence M1→M2, parameter dependence
C→M2, with or without a realist particle position) can generate them.
"""

from .behavior import (
    Behavior,
    from_json,
    is_signalling,
    m2_marginal,
    restrict,
    three_box_behavior,
    to_json,
)
from .dag import ALL_VARIANTS, CausalDag, DagVariant, build, d_separated, markov_factorization, open_paths
from .errors import UndefinedConditionalError
from .feasibility import FeasibilityResult, decide, enumerate_strategies, figure4_report
from .inequality import InequalityReport, compact_check, pairwise_check
from .pps import (
    PpsScenario,
    abl_conditional,
    joint_distribution,
    postselection_success,
    three_box_scenario,
)
from .scm import Scm, catalog, induced_behavior, postselected_conditional

__version__ = "0.1.0"

__all__ = [
    "ALL_VARIANTS",
    "Behavior",
    "CausalDag",
    "DagVariant",
    "FeasibilityResult",
    "InequalityReport",
    "PpsScenario",
    "Scm",
    "UndefinedConditionalError",
    "abl_conditional",
    "build",
    "catalog",
    "compact_check",
    "d_separated",
    "decide",
    "enumerate_strategies",
    "figure4_report",
    "from_json",
    "induced_behavior",
    "is_signalling",
    "joint_distribution",
    "m2_marginal",
    "markov_factorization",
    "open_paths",
    "pairwise_check",
    "postselected_conditional",
    "postselection_success",
    "restrict",
    "three_box_behavior",
    "three_box_scenario",
    "to_json",
]
