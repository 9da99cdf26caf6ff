"""Winner, loser and winner gap by exhaustive enumeration over {0,1}^n.

Objective values of all 2**n solutions come from :func:`subset_sums`, which
adds coefficients in item order.  That is the same order used by
``KnapsackInstance.evaluate`` and by the Nemhauser-Ullmann merge, so values
computed here compare exactly (not approximately) with theirs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ContractViolation, GuardError
from ..knapsack import KnapsackInstance
from ..pareto_core import ScoredSolution, Solution

ENUM_LIMIT = 20


def subset_sums(coeffs) -> np.ndarray:
    """Entry ``mask`` holds the sum of ``coeffs[i]`` over the set bits i of ``mask``."""
    vals = list(coeffs)
    if any(isinstance(v, int) for v in vals):
        big = sum(abs(v) for v in vals) >= 2**62
        dtype = object if big else np.int64
    else:
        dtype = np.float64
    arr = np.zeros(1, dtype=dtype)
    for v in vals:
        arr = np.concatenate([arr, arr + v])
    return arr


def lex_rank(n: int) -> np.ndarray:
    """Rank of each mask in the lexicographic order of bit strings ``b_0 b_1 ...``."""
    masks = np.arange(1 << n, dtype=np.int64)
    rank = np.zeros_like(masks)
    for i in range(n):
        rank |= ((masks >> i) & 1) << (n - 1 - i)
    return rank


def mask_solution(mask: int, n: int) -> Solution:
    return Solution(tuple((int(mask) >> i) & 1 for i in range(n)))


def solution_mask(sol: Solution) -> int:
    return sum(1 << i for i, b in enumerate(sol.bits) if b)


def _guard(n: int) -> None:
    if n > ENUM_LIMIT:
        raise GuardError("n", n, ENUM_LIMIT)


@dataclass(frozen=True)
class LambdaResult:
    t: float
    winner: ScoredSolution | None
    loser: ScoredSolution | None
    lam: float
    per_index: tuple

    def witnesses(self) -> list[int]:
        """Indices i with Λ^i(t) == Λ(t), compared exactly."""
        return [i for i, v in enumerate(self.per_index) if v == self.lam]

    def decomposition_holds(self) -> bool:
        return self.lam == math.inf or bool(self.witnesses())


class _Table:
    """Profit and weight of every solution of a bicriteria instance."""

    def __init__(self, instance: KnapsackInstance):
        if instance.d != 2:
            raise ContractViolation(f"expected d=2, got d={instance.d}")
        _guard(instance.n)
        self.instance = instance
        self.n = instance.n
        self.p = subset_sums(instance.profits)
        self.w = subset_sums(instance.weights[0])
        self.rank = lex_rank(self.n)
        self.masks = np.arange(1 << self.n, dtype=np.int64)

    def scored(self, mask: int) -> ScoredSolution:
        sol = mask_solution(mask, self.n)
        return ScoredSolution(sol, self.instance.evaluate(sol))

    def _pick(self, idx: np.ndarray, first, second) -> int:
        """Filter by an extreme of ``first`` then of ``second``; break ties lexicographically."""
        for values, best in (first, second):
            sub = values[idx]
            idx = idx[sub == best(sub)]
        return int(idx[np.argmin(self.rank[idx])])

    def winner(self, eligible: np.ndarray) -> int | None:
        """Highest profit, then lowest weight, then lexicographically smallest."""
        idx = np.flatnonzero(eligible)
        if idx.size == 0:
            return None
        return self._pick(idx, (self.p, np.max), (self.w, np.min))

    def loser(self, eligible: np.ndarray, above) -> int | None:
        """Lowest weight among eligible solutions with profit above ``above``."""
        idx = np.flatnonzero(eligible & (self.p > above))
        if idx.size == 0:
            return None
        return self._pick(idx, (self.w, np.min), (self.p, np.max))


def compute_lambda(instance: KnapsackInstance, t) -> LambdaResult:
    """Λ(t) and every Λ^i(t) for a bicriteria knapsack instance.

    The winner is the most profitable solution of weight at most ``t``; the
    loser is the lightest solution with strictly more profit, and Λ(t) is by
    how much its weight exceeds ``t``.  For Λ^i(t) the winner may not use
    item i and the loser must use it.
    """
    if not t >= 0:
        raise ContractViolation(f"t must be >= 0, got {t}")
    tab = _Table(instance)
    feasible = tab.w <= t
    everything = np.ones(tab.masks.size, dtype=bool)

    def lam(win_set, lose_set):
        x_star = tab.winner(win_set)
        assert x_star is not None, "the empty solution is always an eligible winner for t >= 0"
        x_hat = tab.loser(lose_set, tab.p[x_star])
        value = math.inf if x_hat is None else tab.w[x_hat] - t
        return x_star, x_hat, value

    x_star, x_hat, value = lam(feasible, everything)
    per_index = []
    for i in range(tab.n):
        has_i = ((tab.masks >> i) & 1).astype(bool)
        per_index.append(lam(feasible & ~has_i, has_i)[2])
    return LambdaResult(
        t=t,
        winner=tab.scored(x_star),
        loser=None if x_hat is None else tab.scored(x_hat),
        lam=_plain(value),
        per_index=tuple(_plain(v) for v in per_index),
    )


def _plain(v):
    if v is math.inf:
        return v
    return v.item() if hasattr(v, "item") else v


def pareto_weight_in(front, t, eps) -> bool:
    """Does some Pareto-optimal solution weigh more than ``t`` and at most ``t + eps``?"""
    return any(t < e.objective.values[1] <= t + eps for e in front)


def winner_gap(costs, solutions=None, *, maximize: bool = False):
    """Difference between the best and the second-best objective value over ``solutions``.

    ``solutions`` is an iterable of :class:`Solution` (or bit tuples) or of
    integer masks; ``None`` means all of {0,1}^n.  Two distinct solutions
    with the same best value give a gap of 0.
    """
    costs = list(costs)
    n = len(costs)
    _guard(n)
    table = subset_sums(costs)
    if solutions is None:
        masks = np.arange(1 << n, dtype=np.int64)
    else:
        masks = np.array(sorted({_as_mask(s, n) for s in solutions}), dtype=np.int64)
    if masks.size < 2:
        raise ContractViolation("the winner gap needs at least two solutions")
    vals = np.sort(table[masks])
    if maximize:
        gap = vals[-1] - vals[-2]
    else:
        gap = vals[1] - vals[0]
    return _plain(gap)


def _as_mask(s, n: int) -> int:
    if isinstance(s, (int, np.integer)):
        if not 0 <= s < (1 << n):
            raise ContractViolation(f"mask {s} out of range for n={n}")
        return int(s)
    bits = s.bits if isinstance(s, Solution) else tuple(s)
    if len(bits) != n:
        raise ContractViolation(f"solution has {len(bits)} bits, expected {n}")
    return solution_mask(Solution(tuple(bits)))


def feasible_masks(instance: KnapsackInstance) -> np.ndarray:
    """Masks of every solution within all capacities."""
    if instance.capacities is None:
        raise ContractViolation("feasibility needs capacities")
    _guard(instance.n)
    ok = np.ones(1 << instance.n, dtype=bool)
    for row, cap in zip(instance.weights, instance.capacities):
        ok &= subset_sums(row) <= cap
    return np.flatnonzero(ok)


def knapsack_winner_gap(instance: KnapsackInstance):
    """Winner gap of the profit objective over the feasible solutions."""
    return winner_gap(instance.profits, feasible_masks(instance), maximize=True)
