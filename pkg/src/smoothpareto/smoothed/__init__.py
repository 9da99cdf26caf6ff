"""Perturbed instances, seeded experiments, winner/loser diagnostics and round-and-solve."""

from .experiment import (
    CSV_HEADER,
    Aggregate,
    ExperimentReport,
    ExperimentSpec,
    ExplicitSetInstance,
    Problem,
    ProfitProfile,
    Statistic,
    TrialError,
    TrialRow,
    bound_reference,
    harmonic,
    plot_data,
    read_csv,
    run_experiment,
    sample_instance,
    write_csv,
)
from .perturbation import (
    PerturbationKind,
    PerturbationModel,
    TriangularDensity,
    UniformDensity,
    trial_seed,
)
from .rounding import ProfitDPResult, RoundSolveResult, profit_dp, round_and_solve
from .winners import (
    LambdaResult,
    compute_lambda,
    feasible_masks,
    knapsack_winner_gap,
    pareto_weight_in,
    winner_gap,
)

__all__ = [
    "CSV_HEADER",
    "Aggregate",
    "ExperimentReport",
    "ExperimentSpec",
    "ExplicitSetInstance",
    "LambdaResult",
    "PerturbationKind",
    "PerturbationModel",
    "Problem",
    "ProfitDPResult",
    "ProfitProfile",
    "RoundSolveResult",
    "Statistic",
    "TrialError",
    "TrialRow",
    "TriangularDensity",
    "UniformDensity",
    "bound_reference",
    "compute_lambda",
    "feasible_masks",
    "harmonic",
    "knapsack_winner_gap",
    "pareto_weight_in",
    "plot_data",
    "profit_dp",
    "read_csv",
    "round_and_solve",
    "run_experiment",
    "sample_instance",
    "trial_seed",
    "winner_gap",
    "write_csv",
]
