"""Seeded Monte-Carlo experiments over phi-perturbed instances.

Each trial draws its own generator from ``(master_seed, trial)``, so the rows
do not depend on how many worker processes run the trials or in what order
they finish.  Placement choices that play the adversary (interval starts,
profits, graph topology) come from a separate stream seeded once per
experiment and are shared by every trial.
"""

from __future__ import annotations

import enum
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..errors import ContractViolation, GuardError, ParetoError
from ..graph_paths import BiGraph, bf_pareto
from ..knapsack import KnapsackInstance, nu_pareto
from ..pareto_core import (
    MAX,
    MIN,
    ObjectiveVector,
    ScoredSolution,
    Solution,
    filter_naive,
    format_scalar,
    maxima_indices,
)
from .perturbation import PerturbationModel, adversary_rng, trial_rng, trial_seed
from .winners import ENUM_LIMIT, compute_lambda, knapsack_winner_gap, subset_sums, winner_gap

CSV_HEADER = "trial,seed,n,phi,statistic,value,elapsed_ns"


class Problem(enum.Enum):
    KNAPSACK = "knapsack"
    SHORTEST_PATH = "shortest_path"
    POINTS_2D = "points_2d"
    EXPLICIT_SET = "explicit_set"


class Statistic(enum.Enum):
    PARETO_COUNT = "pareto_count"
    LABEL_SIZES = "label_sizes"
    WINNER_GAP = "winner_gap"
    LAMBDA_CHECK = "lambda_check"
    MAXIMA_COUNT = "maxima_count"


class ProfitProfile(enum.Enum):
    UNIFORM = "uniform"
    EQUAL = "equal"
    EXPONENTIAL = "exponential"


_ALLOWED = {
    Problem.KNAPSACK: {
        Statistic.PARETO_COUNT,
        Statistic.LABEL_SIZES,
        Statistic.WINNER_GAP,
        Statistic.LAMBDA_CHECK,
    },
    Problem.SHORTEST_PATH: {Statistic.PARETO_COUNT, Statistic.LABEL_SIZES},
    Problem.EXPLICIT_SET: {Statistic.PARETO_COUNT, Statistic.WINNER_GAP},
    Problem.POINTS_2D: {Statistic.MAXIMA_COUNT},
}

# statistics that enumerate {0,1}^n
_ENUMERATING = {Statistic.WINNER_GAP, Statistic.LAMBDA_CHECK}


@dataclass(frozen=True)
class ExperimentSpec:
    problem: Problem
    n: int
    phi: float
    trials: int
    master_seed: int
    statistic: Statistic = Statistic.PARETO_COUNT
    profile: ProfitProfile = ProfitProfile.UNIFORM
    adversary_seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "problem", Problem(self.problem))
        object.__setattr__(self, "statistic", Statistic(self.statistic))
        object.__setattr__(self, "profile", ProfitProfile(self.profile))
        if self.statistic not in _ALLOWED[self.problem]:
            raise ContractViolation(
                f"statistic {self.statistic.value} is not defined for {self.problem.value}"
            )
        if self.trials < 1:
            raise ContractViolation(f"trials must be >= 1, got {self.trials}")
        if not math.isfinite(self.phi) or self.phi < 1:
            raise ContractViolation(f"phi must be >= 1, got {self.phi}")
        object.__setattr__(self, "phi", float(self.phi))
        min_n = 2 if self.problem is Problem.SHORTEST_PATH else 1
        if self.n < min_n:
            raise ContractViolation(f"n must be >= {min_n} for {self.problem.value}")
        if not 0 <= self.master_seed < 2**64:
            raise ContractViolation("master_seed must be a 64-bit unsigned integer")
        enumerates = self.statistic in _ENUMERATING or self.problem is Problem.EXPLICIT_SET
        if enumerates and self.n > ENUM_LIMIT:
            raise GuardError("n", self.n, ENUM_LIMIT)

    @property
    def adversary(self) -> int:
        return self.master_seed if self.adversary_seed is None else self.adversary_seed

    def default_model(self) -> PerturbationModel:
        return PerturbationModel(phi=self.phi)


# -- instance sampling --------------------------------------------------------


def _profits(spec: ExperimentSpec, rng: np.random.Generator) -> tuple:
    n = spec.n
    if spec.profile is ProfitProfile.EQUAL:
        return (1.0,) * n
    if spec.profile is ProfitProfile.EXPONENTIAL:
        return tuple(float(2**i) for i in range(1, n + 1))
    return tuple(float(x) for x in rng.random(n))


def _topology(n: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    """A chain 0 -> 1 -> ... -> n-1 plus random forward shortcuts."""
    arcs = [(i, i + 1) for i in range(n - 1)]
    p = min(1.0, 3.0 / n)
    for u in range(n):
        for v in range(u + 2, n):
            if rng.random() < p:
                arcs.append((u, v))
    return arcs


@dataclass(frozen=True)
class ExplicitSetInstance:
    """Solutions ``masks`` of {0,1}^n with an arbitrary profit per solution
    (maximized) and a linear weight (minimized)."""

    n: int
    masks: tuple
    profit: tuple
    weights: tuple

    def front(self):
        wsum = subset_sums(self.weights)
        entries = []
        for mask, p in zip(self.masks, self.profit):
            sol = Solution(tuple((mask >> i) & 1 for i in range(self.n)))
            vec = ObjectiveVector((p, float(wsum[mask])), (MAX, MIN))
            entries.append(ScoredSolution(sol, vec))
        return filter_naive(entries)


def sample_instance(spec: ExperimentSpec, model: PerturbationModel | None, trial: int):
    """The instance of one trial; identical for identical ``(spec, model, trial)``."""
    model = _model_for(spec, model)
    rng = trial_rng(spec.master_seed, trial)
    n = spec.n
    if spec.problem is Problem.POINTS_2D:
        return rng.random((n, 2))
    if spec.problem is Problem.SHORTEST_PATH:
        adv = adversary_rng(spec.adversary)
        arcs = _topology(n, adv)
        costs = 1.0 - adv.random(len(arcs))
        densities = model.densities_for(len(arcs), adv)
        weights = model.sample(densities, rng)
        # a perturbed weight of exactly 0 is a measure-zero event; keep edges positive
        weights = np.maximum(weights, np.nextafter(0.0, 1.0))
        edges = tuple(
            (u, v, float(c), float(w)) for (u, v), c, w in zip(arcs, costs, weights)
        )
        return BiGraph(n, edges, 0)
    if spec.problem is Problem.EXPLICIT_SET:
        adv = adversary_rng(spec.adversary)
        size = min(1 << n, 4 * n * n)
        masks = tuple(int(m) for m in np.sort(adv.choice(1 << n, size=size, replace=False)))
        profit = tuple(float(x) for x in adv.random(size))
        densities = model.densities_for(n, adv)
        weights = tuple(float(x) for x in model.sample(densities, rng))
        return ExplicitSetInstance(n, masks, profit, weights)
    # knapsack
    adv = adversary_rng(spec.adversary)
    if spec.statistic is Statistic.WINNER_GAP:
        # the objective is perturbed; weights and capacity define S adversarially
        weights = tuple(float(x) for x in adv.random(n))
        densities = model.densities_for(n, adv)
        profits = tuple(float(x) for x in model.sample(densities, rng))
    else:
        profits = _profits(spec, adv)
        densities = model.densities_for(n, adv)
        weights = tuple(float(x) for x in model.sample(densities, rng))
    return KnapsackInstance(profits, (weights,), (sum(weights) / 2,))


def _model_for(spec: ExperimentSpec, model: PerturbationModel | None) -> PerturbationModel:
    if model is None:
        return spec.default_model()
    if model.phi != spec.phi:
        raise ContractViolation(f"model phi={model.phi} differs from spec phi={spec.phi}")
    return model


# -- statistics ---------------------------------------------------------------


def _evaluate(spec: ExperimentSpec, instance, rng: np.random.Generator):
    stat = spec.statistic
    if spec.problem is Problem.POINTS_2D:
        return len(maxima_indices([(-x, -y) for x, y in instance.tolist()]))
    if spec.problem is Problem.SHORTEST_PATH:
        lists = bf_pareto(instance, early_exit=stat is not Statistic.LABEL_SIZES)
        if stat is Statistic.LABEL_SIZES:
            return lists.work
        return len(lists.labels[instance.vertex_count - 1])
    if spec.problem is Problem.EXPLICIT_SET:
        if stat is Statistic.WINNER_GAP:
            return winner_gap(instance.weights, instance.masks)
        return len(instance.front())
    if stat is Statistic.PARETO_COUNT:
        return len(nu_pareto(instance)[0])
    if stat is Statistic.LABEL_SIZES:
        return nu_pareto(instance)[1].work
    if stat is Statistic.WINNER_GAP:
        return knapsack_winner_gap(instance)
    t = float(rng.random()) * sum(instance.weights[0])
    return 1 if compute_lambda(instance, t).decomposition_holds() else 0


def bound_reference(spec: ExperimentSpec, instance=None) -> float | None:
    """The analytic value the experiment mean is compared against.

    Counting bounds (``n**2 phi + 1`` and friends) are upper bounds; the
    harmonic number for random maxima is an asymptotic reference, and a
    winner-gap experiment has no single bound.
    """
    n, phi = spec.n, spec.phi
    stat = spec.statistic
    if stat is Statistic.MAXIMA_COUNT:
        return harmonic(n)
    if stat is Statistic.LAMBDA_CHECK:
        return 1.0
    if stat is Statistic.WINNER_GAP:
        return None
    if spec.problem is Problem.SHORTEST_PATH:
        m = instance.edge_count if instance is not None else None
        if m is None:
            return None
        per_vertex = m * m * phi + 1
        if stat is Statistic.PARETO_COUNT:
            return per_vertex
        # every relax reads two lists, each bounded in expectation by per_vertex
        return (n - 1) * m * 2 * per_vertex
    if stat is Statistic.PARETO_COUNT:
        return n * n * phi + 1
    # sum over the prefix sets P_0 .. P_{n-1}
    return float(sum(i * i * phi + 1 for i in range(n)))


def harmonic(n: int) -> float:
    return math.fsum(1.0 / i for i in range(1, n + 1))


# -- running ------------------------------------------------------------------


@dataclass(frozen=True)
class TrialRow:
    trial: int
    seed: int
    n: int
    phi: float
    statistic: str
    value: float
    elapsed_ns: int = 0


@dataclass(frozen=True)
class Aggregate:
    trials: int
    mean: float
    variance: float
    max: float
    second_moment: float
    stderr: float

    @classmethod
    def of(cls, values: list) -> "Aggregate":
        k = len(values)
        fv = [float(v) for v in values]
        mean = math.fsum(fv) / k
        var = math.fsum((v - mean) ** 2 for v in fv) / (k - 1) if k > 1 else 0.0
        return cls(
            trials=k,
            mean=mean,
            variance=var,
            max=max(fv),
            second_moment=math.fsum(v * v for v in fv) / k,
            stderr=math.sqrt(var / k),
        )


@dataclass
class ExperimentReport:
    spec: ExperimentSpec
    rows: list
    aggregate: Aggregate
    bound_reference: float | None
    extra: dict = field(default_factory=dict)

    @property
    def within_bound(self) -> bool | None:
        """Mean at most the bound; ``None`` when there is no upper bound to check."""
        if self.bound_reference is None or self.spec.statistic is Statistic.MAXIMA_COUNT:
            return None
        return self.aggregate.mean <= self.bound_reference

    @property
    def near_bound(self) -> bool | None:
        """Mean within three standard errors of the bound (little headroom)."""
        if self.within_bound is None:
            return None
        return self.aggregate.mean > self.bound_reference - 3 * self.aggregate.stderr

    def values(self) -> list:
        return [r.value for r in self.rows]


def _run_trial(args) -> TrialRow:
    spec, model, trial, timing = args
    start = time.perf_counter_ns() if timing else 0
    try:
        instance = sample_instance(spec, model, trial)
        value = _evaluate(spec, instance, trial_rng(spec.master_seed, trial).spawn(1)[0])
    except ParetoError as exc:
        raise TrialError(trial, exc) from exc
    elapsed = time.perf_counter_ns() - start if timing else 0
    return TrialRow(
        trial=trial,
        seed=trial_seed(spec.master_seed, trial),
        n=spec.n,
        phi=spec.phi,
        statistic=spec.statistic.value,
        value=value,
        elapsed_ns=elapsed,
    )


class TrialError(ParetoError):
    def __init__(self, trial: int, cause: Exception):
        super().__init__(f"trial {trial} failed: {cause}")
        self.trial = trial
        self.cause = cause


def run_experiment(
    spec: ExperimentSpec,
    model: PerturbationModel | None = None,
    *,
    workers: int = 1,
    timing: bool = False,
) -> ExperimentReport:
    """Run every trial of ``spec`` and aggregate the per-trial values.

    With ``workers > 1`` trials run in a process pool; rows are still
    assembled in trial order.  ``timing`` fills ``elapsed_ns`` with wall
    time, which makes the CSV vary between runs, so it is off by default.
    """
    model = _model_for(spec, model)
    jobs = [(spec, model, t, timing) for t in range(spec.trials)]
    if workers > 1 and spec.trials > 1:
        chunk = max(1, spec.trials // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_trial, jobs, chunksize=chunk))
    else:
        rows = [_run_trial(j) for j in jobs]
    rows.sort(key=lambda r: r.trial)
    reference = None
    if spec.problem is Problem.SHORTEST_PATH:
        reference = bound_reference(spec, sample_instance(spec, model, 0))
    else:
        reference = bound_reference(spec)
    return ExperimentReport(spec, rows, Aggregate.of([r.value for r in rows]), reference)


# -- CSV ----------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format_scalar(v)


def agg_line(report: ExperimentReport) -> str:
    s, a = report.spec, report.aggregate
    fields = [
        ("problem", s.problem.value),
        ("n", s.n),
        ("phi", s.phi),
        ("statistic", s.statistic.value),
        ("trials", a.trials),
        ("mean", a.mean),
        ("variance", a.variance),
        ("max", a.max),
        ("second_moment", a.second_moment),
        ("stderr", a.stderr),
        ("bound", "none" if report.bound_reference is None else report.bound_reference),
    ]
    if report.within_bound is not None:
        fields.append(("within_bound", report.within_bound))
        fields.append(("near_bound", report.near_bound))
    return "#agg," + ",".join(f"{k}={v if isinstance(v, str) else _fmt(v)}" for k, v in fields)


def write_csv(reports, out=None) -> str:
    """CSV of every row, then one ``#agg`` line per report."""
    if isinstance(reports, ExperimentReport):
        reports = [reports]
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for rep in reports:
        for r in rep.rows:
            buf.write(
                f"{r.trial},{r.seed},{r.n},{_fmt(r.phi)},{r.statistic},{_fmt(r.value)},{r.elapsed_ns}\n"
            )
    for rep in reports:
        buf.write(agg_line(rep) + "\n")
    text = buf.getvalue()
    if out is not None:
        out.write(text)
    return text


def read_csv(text: str) -> tuple[list[dict], list[dict]]:
    """Rows and aggregate records of a report written by :func:`write_csv`."""
    lines = text.splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ContractViolation("missing report header")
    rows, aggs = [], []
    keys = CSV_HEADER.split(",")
    for line in lines[1:]:
        if line.startswith("#agg,"):
            aggs.append(dict(kv.split("=", 1) for kv in line[5:].split(",")))
        elif line:
            rows.append(dict(zip(keys, line.split(","))))
    return rows, aggs


def plot_data(reports, x: str = "n") -> str:
    """Tab-separated ``x mean`` pairs, one per report."""
    out = [f"{x}\tmean"]
    for rep in reports:
        xv = rep.spec.n if x == "n" else rep.spec.phi
        out.append(f"{_fmt(xv)}\t{_fmt(rep.aggregate.mean)}")
    return "\n".join(out) + "\n"
