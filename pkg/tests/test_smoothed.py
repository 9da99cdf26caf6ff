import math

import numpy as np
import pytest

from smoothpareto import (
    ContractViolation,
    DomainError,
    GuardError,
    KnapsackInstance,
    Solution,
    nu_pareto,
    solve,
)
from smoothpareto.smoothed import (
    CSV_HEADER,
    ExperimentSpec,
    PerturbationKind,
    PerturbationModel,
    TrialError,
    TriangularDensity,
    UniformDensity,
    compute_lambda,
    pareto_weight_in,
    profit_dp,
    read_csv,
    round_and_solve,
    run_experiment,
    sample_instance,
    trial_seed,
    winner_gap,
    write_csv,
)
from smoothpareto.smoothed.perturbation import adversary_rng

from conftest import random_knapsack

# -- seeding and perturbation models --------------------------------------------


def test_trial_seeds():
    assert trial_seed(7, 3) == trial_seed(7, 3)
    seeds = {trial_seed(7, t) for t in range(1000)}
    assert len(seeds) == 1000
    assert trial_seed(7, 0) != trial_seed(8, 0)


def test_phi_one_forces_unit_interval():
    model = PerturbationModel(phi=1)
    dens = model.densities_for(20, adversary_rng(5))
    assert all(f.support == (0.0, 1.0) for f in dens)


def test_model_validation():
    with pytest.raises(ContractViolation):
        PerturbationModel(phi=0.5)
    with pytest.raises(ContractViolation):
        PerturbationModel(phi=2, starts=(0.7,))
    with pytest.raises(ContractViolation):
        PerturbationModel(PerturbationKind.BOUNDED_DENSITY, phi=1.5, shape="triangular")
    with pytest.raises(ContractViolation):
        PerturbationModel(phi=2, value_range=(0, 2))
    with pytest.raises(ContractViolation):
        PerturbationModel(PerturbationKind.BOUNDED_DENSITY, phi=2, densities=(UniformDensity(0.0, 4.0),))
    PerturbationModel(phi=2, value_range=(-1, 1), starts=(-1.0, 0.5))


def _histogram_sup(samples, lo, hi, width=0.01):
    edges = np.arange(lo, hi + width / 2, width)
    counts, _ = np.histogram(samples, bins=edges)
    return counts.max() / (len(samples) * width)


def test_uniform_density_histogram():
    model = PerturbationModel(phi=4, starts=(0.25,))
    rng = np.random.default_rng(0)
    dens = model.densities_for(1, rng)
    samples = np.array([model.sample(dens, rng)[0] for _ in range(100_000)])
    assert samples.min() >= 0.25 and samples.max() <= 0.5
    assert _histogram_sup(samples, 0.0, 1.0) <= 4 * 1.05


@pytest.mark.parametrize("phi", [2.0, 4.0, 8.0])
def test_triangular_density_histogram(phi):
    f = TriangularDensity(0.5, phi)
    rng = np.random.default_rng(int(phi))
    samples = f.ppf(rng.random(100_000))
    lo, hi = f.support
    assert lo <= samples.min() and samples.max() <= hi
    assert _histogram_sup(samples, 0.0, 1.0) <= phi * 1.05
    grid = np.linspace(0, 1, 10_001)
    assert f.pdf(grid).max() <= phi + 1e-9
    # the density integrates to one
    assert abs(np.trapezoid(f.pdf(grid), grid) - 1) < 1e-3


def test_bounded_density_model_samples_in_range():
    model = PerturbationModel(PerturbationKind.BOUNDED_DENSITY, phi=3, shape="triangular")
    dens = model.densities_for(50, adversary_rng(1))
    assert all(isinstance(f, TriangularDensity) for f in dens)
    x = model.sample(dens, np.random.default_rng(2))
    assert x.min() >= 0 and x.max() <= 1


# -- instances -------------------------------------------------------------------


def test_sample_instance_deterministic():
    spec = ExperimentSpec("knapsack", 10, 2.0, 5, 11)
    a = sample_instance(spec, None, 3)
    assert a == sample_instance(spec, None, 3)
    assert a != sample_instance(spec, None, 4)
    # the adversarial profits are shared across trials
    assert a.profits == sample_instance(spec, None, 4).profits
    assert all(0 <= w <= 1 for w in a.weights[0])


def test_sample_instance_phi_one_uniform_weights():
    spec = ExperimentSpec("knapsack", 2000, 1.0, 1, 3)
    w = np.array(sample_instance(spec, None, 0).weights[0])
    assert 0.45 < w.mean() < 0.55 and w.min() >= 0 and w.max() <= 1


@pytest.mark.parametrize("profile", ["uniform", "equal", "exponential"])
def test_profiles(profile):
    spec = ExperimentSpec("knapsack", 6, 2.0, 3, 1, profile=profile)
    inst = sample_instance(spec, None, 0)
    if profile == "equal":
        assert set(inst.profits) == {1.0}
    if profile == "exponential":
        assert inst.profits == (2.0, 4.0, 8.0, 16.0, 32.0, 64.0)


def test_spec_validation():
    with pytest.raises(ContractViolation):
        ExperimentSpec("knapsack", 10, 0.5, 5, 1)
    with pytest.raises(ContractViolation):
        ExperimentSpec("knapsack", 10, 1.0, 0, 1)
    with pytest.raises(ContractViolation):
        ExperimentSpec("points_2d", 10, 1.0, 5, 1, statistic="winner_gap")
    with pytest.raises(GuardError):
        ExperimentSpec("knapsack", 21, 1.0, 5, 1, statistic="lambda_check")
    with pytest.raises(ContractViolation):
        run_experiment(ExperimentSpec("knapsack", 5, 2.0, 1, 1), PerturbationModel(phi=3))


def test_trial_failure_names_trial():
    model = PerturbationModel(phi=2.0, starts=(0.0,) * 3)
    spec = ExperimentSpec("knapsack", 4, 2.0, 2, 1)
    with pytest.raises(TrialError) as err:
        run_experiment(spec, model)
    assert err.value.trial == 0


# -- experiments ------------------------------------------------------------------


def test_single_trial_aggregates():
    rep = run_experiment(ExperimentSpec("knapsack", 8, 1.0, 1, 4))
    v = rep.rows[0].value
    agg = rep.aggregate
    assert agg.mean == agg.max == v and agg.variance == 0.0 and agg.trials == 1


def test_mean_recomputable_and_matches_direct_calls():
    spec = ExperimentSpec("knapsack", 12, 2.0, 20, 9)
    rep = run_experiment(spec)
    assert rep.aggregate.mean == pytest.approx(sum(rep.values()) / 20, rel=1e-15)
    for row in rep.rows[:5]:
        inst = sample_instance(spec, None, row.trial)
        assert row.value == len(nu_pareto(inst)[0])
        assert row.seed == trial_seed(9, row.trial)
    assert rep.bound_reference == 12 * 12 * 2 + 1
    assert rep.within_bound


def test_label_sizes_is_nu_work():
    spec = ExperimentSpec("knapsack", 10, 2.0, 3, 2, statistic="label_sizes")
    rep = run_experiment(spec)
    inst = sample_instance(spec, None, 0)
    assert rep.rows[0].value == nu_pareto(inst)[1].work
    assert rep.within_bound


@pytest.mark.parametrize(
    "problem,statistic,n",
    [
        ("knapsack", "winner_gap", 8),
        ("knapsack", "lambda_check", 8),
        ("shortest_path", "pareto_count", 10),
        ("shortest_path", "label_sizes", 10),
        ("explicit_set", "pareto_count", 8),
        ("explicit_set", "winner_gap", 8),
        ("points_2d", "maxima_count", 200),
    ],
)
def test_every_configuration_runs_deterministically(problem, statistic, n):
    spec = ExperimentSpec(problem, n, 2.0, 6, 5, statistic=statistic)
    a = write_csv(run_experiment(spec))
    assert a == write_csv(run_experiment(spec))
    assert a.splitlines()[0] == CSV_HEADER
    rows, aggs = read_csv(a)
    assert len(rows) == 6 and len(aggs) == 1


def test_lambda_check_experiment_all_ones():
    rep = run_experiment(ExperimentSpec("knapsack", 8, 2.0, 30, 5, statistic="lambda_check"))
    assert set(rep.values()) == {1}


def test_symmetric_range_explicit_set():
    model = PerturbationModel(phi=2.0, value_range=(-1, 1))
    spec = ExperimentSpec("explicit_set", 6, 2.0, 5, 3, statistic="winner_gap")
    rep = run_experiment(spec, model)
    inst = sample_instance(spec, model, 0)
    assert min(inst.weights) >= -1 and rep.aggregate.mean >= 0


def test_parallel_matches_serial():
    spec = ExperimentSpec("knapsack", 10, 2.0, 40, 21)
    assert write_csv(run_experiment(spec)) == write_csv(run_experiment(spec, workers=2))


def test_timing_is_opt_in():
    spec = ExperimentSpec("knapsack", 6, 1.0, 3, 1)
    assert all(r.elapsed_ns == 0 for r in run_experiment(spec).rows)
    assert all(r.elapsed_ns > 0 for r in run_experiment(spec, timing=True).rows)


# -- winners, losers and Λ ---------------------------------------------------------


def test_lambda_large_t():
    inst = KnapsackInstance((0.5, 0.25, 0.75), ((0.2, 0.3, 0.4),))
    res = compute_lambda(inst, 5.0)
    assert str(res.winner.solution) == "111"
    assert res.loser is None and res.lam == math.inf
    assert res.decomposition_holds()


def test_lambda_zero_t():
    inst = KnapsackInstance((0.5, 0.0, 0.75), ((0.2, 0.1, 0.4),))
    res = compute_lambda(inst, 0.0)
    assert str(res.winner.solution) == "000"
    # item 1 is lighter but has no profit, so the loser is item 0 alone
    assert str(res.loser.solution) == "100"
    assert res.lam == 0.2
    assert res.decomposition_holds()


def test_lambda_errors():
    inst = KnapsackInstance((0.5,), ((0.2,),))
    with pytest.raises(ContractViolation):
        compute_lambda(inst, -1.0)
    with pytest.raises(GuardError):
        compute_lambda(random_knapsack(np.random.default_rng(0), 21), 1.0)


def test_lambda_matches_definitions_by_enumeration():
    rng = np.random.default_rng(8)
    inst = random_knapsack(rng, 6)
    sols = [Solution(tuple((m >> i) & 1 for i in range(6))) for m in range(64)]
    vals = {s: inst.evaluate(s).values for s in sols}
    for t in rng.random(20) * 3:
        res = compute_lambda(inst, float(t))
        feasible = [s for s in sols if vals[s][1] <= t]
        pstar = max(vals[s][0] for s in feasible)
        assert res.winner.objective.values[0] == pstar
        better = [vals[s][1] for s in sols if vals[s][0] > pstar]
        expected = min(better) - t if better else math.inf
        assert res.lam == expected
        assert res.decomposition_holds()


def test_lambda_decomposition_and_equivalence_sample():
    rng = np.random.default_rng(12)
    for _ in range(100):
        inst = random_knapsack(rng, 8)
        t = float(rng.random() * sum(inst.weights[0]))
        res = compute_lambda(inst, t)
        assert res.decomposition_holds()
        front, _ = nu_pareto(inst)
        eps = float(rng.random() * 0.3)
        assert (res.lam <= eps) == pareto_weight_in(front, t, eps)


def test_winner_gap_examples():
    assert winner_gap((0.3, 0.4), [(0, 0), (1, 1)]) == pytest.approx(0.7)
    assert winner_gap((0.3, 0.3), [(1, 0), (0, 1)]) == 0
    assert winner_gap((0.3, 0.4), [0, 3], maximize=True) == pytest.approx(0.7)
    with pytest.raises(ContractViolation):
        winner_gap((0.3, 0.4), [(1, 1)])
    with pytest.raises(ContractViolation):
        winner_gap((0.3, 0.4), [(1, 1), (1, 1)])


def test_winner_gap_full_cube():
    c = (0.5, -0.2, 0.1)
    # best 010 at -0.2, second 011 at -0.1
    assert winner_gap(c) == pytest.approx(0.1)


# -- round and solve ---------------------------------------------------------------


def test_profit_dp_against_enumeration():
    rng = np.random.default_rng(3)
    for _ in range(50):
        n = int(rng.integers(1, 8))
        p = [int(x) for x in rng.integers(0, 20, n)]
        w = [float(x) for x in rng.random(n)]
        cap = float(rng.random() * sum(w))
        feas = []
        for m in range(1 << n):
            bits = tuple((m >> i) & 1 for i in range(n))
            ww = sum((a for a, b in zip(w, bits) if b), 0.0)
            if ww <= cap:
                feas.append((sum(a for a, b in zip(p, bits) if b), ww, bits))
        res = profit_dp(p, w, cap)
        best = max(f[0] for f in feas)
        assert res.profit == best
        others = sorted((f[0] for f in feas), reverse=True)
        expected_gap = math.inf if len(others) == 1 else others[0] - others[1]
        assert res.gap == expected_gap
        assert sum(a for a, b in zip(p, res.bits) if b) == best


def test_round_and_solve_first_precision():
    # one dominant item: the gap of 0.99 certifies at the starting precision
    inst = KnapsackInstance((1.0,) + (0.01,) * 7, ((1.0,) * 8,), (1.0,))
    res = round_and_solve(inst)
    assert res.certified and not res.fallback_used and res.bits_used == 5
    assert res.solution == solve(inst)


def test_round_and_solve_gap_point_one():
    # unique optimum 0.6 vs 0.5: the margin guarantees a certificate by b = 8
    inst = KnapsackInstance(
        (0.6, 0.5, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05),
        ((1.0, 1.0, 5.0, 5.0, 5.0, 5.0, 5.0, 5.0),),
        (1.0,),
    )
    res = round_and_solve(inst)
    assert res.certified and res.bits_used <= 8
    assert res.solution == solve(inst)
    assert str(res.solution.solution) == "10000000"


def test_round_and_solve_tie_falls_back():
    inst = KnapsackInstance((0.5, 0.5), ((1.0, 1.0),), (1.0,))
    res = round_and_solve(inst)
    assert res.fallback_used and not res.certified
    assert res.solution == solve(inst)
    assert str(res.solution.solution) == "01"


def test_round_and_solve_errors():
    with pytest.raises(DomainError):
        round_and_solve(KnapsackInstance((1.5,), ((1.0,),), (1.0,)))
    with pytest.raises(ContractViolation):
        round_and_solve(KnapsackInstance((0.5,), ((1.0,),)))


def test_round_and_solve_random():
    rng = np.random.default_rng(17)
    for _ in range(100):
        inst = random_knapsack(rng, int(rng.integers(1, 11)))
        res = round_and_solve(inst)
        assert res.solution == solve(inst)
