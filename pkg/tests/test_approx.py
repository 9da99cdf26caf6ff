import math

import numpy as np
import pytest

from smoothpareto import (
    MAX,
    MIN,
    ContractViolation,
    DomainError,
    ObjectiveVector,
    ScoredSolution,
    Solution,
    eps_coreset,
    eps_dominates,
    filter_naive,
    gen_exponential,
    nu_pareto,
)
from smoothpareto.approx import grid_size_bound


def one_axis_pair(y, x, direction):
    # pad with an identical second axis so only the first one matters
    return (
        ObjectiveVector((y, 1.0), (direction, MIN)),
        ObjectiveVector((x, 1.0), (direction, MIN)),
    )


def test_eps_dominates_examples():
    assert eps_dominates(*one_axis_pair(1.05, 1.0, MIN), 0.1)
    v = ObjectiveVector((2.0, 3.0), (MAX, MIN))
    assert eps_dominates(v, v, 0.0)
    assert not eps_dominates(*one_axis_pair(1.0, 1.2, MAX), 0.1)
    assert eps_dominates(*one_axis_pair(1.0, 1.1, MAX), 0.1)


def test_eps_dominates_errors():
    with pytest.raises(DomainError):
        eps_dominates(*one_axis_pair(0.0, 1.0, MIN), 0.1)
    with pytest.raises(DomainError):
        eps_dominates(*one_axis_pair(1.0, -1.0, MIN), 0.1)
    with pytest.raises(ContractViolation):
        eps_dominates(*one_axis_pair(1.0, 1.0, MIN), -0.1)


def random_front(rng, m, d=2):
    dirs = (MAX,) + (MIN,) * (d - 1)
    nbits = max(1, (m - 1).bit_length())
    pts = [
        ScoredSolution(
            Solution(tuple((i >> k) & 1 for k in range(nbits))),
            ObjectiveVector(tuple(float(0.01 + x) for x in rng.random(d)), dirs),
        )
        for i in range(m)
    ]
    return filter_naive(pts)


def assert_covered(core, source):
    for x in source:
        assert any(
            y.objective.values == x.objective.values
            or eps_dominates(y.objective, x.objective, core.epsilon)
            for y in core
        ), x


def test_single_cell():
    front = random_front(np.random.default_rng(0), 200)
    core = eps_coreset(front, 1e6)
    assert len(core) == 1
    assert_covered(core, front)


def test_random_points_coverage():
    rng = np.random.default_rng(1)
    pts = [
        ScoredSolution(
            Solution(tuple((i >> k) & 1 for k in range(10))),
            ObjectiveVector((float(1 - rng.random()), float(1 - rng.random())), (MAX, MIN)),
        )
        for i in range(1000)
    ]
    front = filter_naive(pts)
    core = eps_coreset(front, 0.1)
    assert core.covers(front)
    assert_covered(core, front)
    assert len(core) <= grid_size_bound(front, 0.1)


def test_exponential_fixture_with_zero_entry():
    front, _ = nu_pareto(gen_exponential(12))
    core = eps_coreset(front, 0.25)
    positive = [e for e in front if all(v > 0 for v in e.objective.values)]
    ratio = max(e.objective.values[0] for e in positive) / min(e.objective.values[0] for e in positive)
    k = math.ceil(math.log(ratio) / math.log(1.25))
    # the empty solution (0, 0) is kept verbatim on top of the grid cells
    assert len(core) <= k * k + 1
    assert ((0,) * 12, (0, 0)) in [(e.solution.bits, e.objective.values) for e in core]
    assert core.covers(front)


def test_representative_is_lexicographically_smallest():
    dirs = (MAX, MIN)
    a = ScoredSolution(Solution((1, 0)), ObjectiveVector((1.0, 1.0), dirs))
    b = ScoredSolution(Solution((0, 1)), ObjectiveVector((1.01, 1.01), dirs))
    front = filter_naive([a, b])
    core = eps_coreset(front, 0.5)
    assert [str(e.solution) for e in core] == ["01"]


def test_errors():
    front = random_front(np.random.default_rng(2), 10)
    with pytest.raises(ContractViolation):
        eps_coreset(front, 0.0)
    neg = filter_naive([ScoredSolution(Solution((0,)), ObjectiveVector((-1.0, 1.0), (MAX, MIN)))])
    with pytest.raises(DomainError):
        eps_coreset(neg, 0.1)


@pytest.mark.parametrize("d", [2, 3])
def test_nested_grids_are_monotone(d):
    rng = np.random.default_rng(10 + d)
    for _ in range(10):
        front = random_front(rng, 300, d)
        e1 = 0.1
        e2 = (1 + e1) ** 2 - 1
        assert len(eps_coreset(front, e1)) >= len(eps_coreset(front, e2))


def test_size_shrinks_across_tested_eps():
    rng = np.random.default_rng(20)
    for _ in range(20):
        front = random_front(rng, 300)
        sizes = [len(eps_coreset(front, e)) for e in (0.05, 0.1, 0.25)]
        assert sizes == sorted(sizes, reverse=True)
