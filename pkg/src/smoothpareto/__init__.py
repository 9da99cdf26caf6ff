"""Exact and approximate Pareto sets for binary multiobjective problems,
plus a seeded Monte-Carlo harness for perturbed instances."""

from .errors import (
    ContractViolation,
    DomainError,
    GuardError,
    InfeasibleError,
    InvariantError,
    ParetoError,
    ParseError,
)
from .pareto_core import (
    MAX,
    MIN,
    Direction,
    ObjectiveVector,
    ParetoSet,
    ScoredSolution,
    Solution,
    dominates,
    filter_klp,
    filter_naive,
    filter_sweep2d,
    pareto_bruteforce,
)
from .knapsack import (
    KnapsackInstance,
    NUTrace,
    gen_exponential,
    gen_nonmonotone,
    nu_pareto,
    nu_pareto_multi,
    solve,
)

from .graph_paths import (
    BiGraph,
    Edge,
    PathLabel,
    bf_pareto,
    fw_pareto,
    gen_exp_paths,
    paths_bruteforce,
    paths_pareto,
)
from .approx import EpsApproxSet, eps_coreset, eps_dominates

__version__ = "0.1.0"
