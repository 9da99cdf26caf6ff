"""Round-and-solve for knapsack instances with perturbed profits.

Profits are rounded down to ``b`` fractional bits and the integer instance is
solved by a dynamic program indexed by profit.  Rounding moves the profit of
any solution by less than ``n * 2**-b``, so if the best rounded solution beats
every other feasible one by more than ``2n`` units of ``2**-b`` it is the exact
optimum.  Otherwise ``b`` grows by one bit and the instance is re-solved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ContractViolation, DomainError, InfeasibleError
from ..knapsack import KnapsackInstance, solve
from ..pareto_core import ScoredSolution, Solution

MAX_BITS = 52


@dataclass(frozen=True)
class ProfitDPResult:
    """Best feasible solution of an integer-profit instance plus its margin.

    ``gap`` is the best profit minus the second-best feasible profit; it is 0
    when two feasible solutions share the best profit and ``inf`` when only
    one solution is feasible.
    """

    bits: tuple
    profit: int
    gap: float


def profit_dp(int_profits, weights, capacity) -> ProfitDPResult:
    """Sparse profit-indexed dynamic program over items in input order.

    For each reachable profit value the two lightest partial solutions are
    kept, which is enough to tell whether the optimum profit is shared.
    State count is bounded by ``1 + sum(int_profits)``.
    """
    n = len(int_profits)
    if n > 62:
        raise ContractViolation("profit_dp encodes solutions in 62 bits")
    wdtype = np.float64 if any(isinstance(w, float) for w in weights) else np.int64
    prof = np.zeros(1, dtype=np.int64)
    wt = np.zeros(1, dtype=wdtype)
    # solution bits as an integer whose order is the lexicographic one
    lex = np.zeros(1, dtype=np.int64)
    for i, (p, w) in enumerate(zip(int_profits, weights)):
        take_w = wt + w
        ok = take_w <= capacity
        prof = np.concatenate([prof, prof[ok] + p])
        wt = np.concatenate([wt, take_w[ok]])
        lex = np.concatenate([lex, lex[ok] | (1 << (n - 1 - i))])
        order = np.lexsort((lex, wt, prof))
        prof, wt, lex = prof[order], wt[order], lex[order]
        start = np.r_[True, prof[1:] != prof[:-1]]
        first = np.flatnonzero(start)
        group = np.cumsum(start) - 1
        keep = (np.arange(prof.size) - first[group]) < 2
        prof, wt, lex = prof[keep], wt[keep], lex[keep]
    top = prof[-1]
    at_top = np.flatnonzero(prof == top)
    best = at_top[0]
    if at_top.size > 1:
        gap = 0.0
    elif at_top[0] == 0:
        gap = math.inf
    else:
        gap = float(top - prof[at_top[0] - 1])
    bits = tuple((int(lex[best]) >> (n - 1 - i)) & 1 for i in range(n))
    return ProfitDPResult(bits, int(top), gap)


@dataclass(frozen=True)
class RoundSolveResult:
    solution: ScoredSolution
    bits_used: int
    certified: bool
    fallback_used: bool
    attempts: tuple = field(default=(), compare=False)


def start_bits(n: int) -> int:
    return math.ceil(math.log2(n)) + 2 if n > 1 else 2


def round_and_solve(instance: KnapsackInstance, solver=profit_dp) -> RoundSolveResult:
    """Exact optimum of a bicriteria knapsack instance via rounded profits.

    ``solver(int_profits, weights, capacity)`` must return a
    :class:`ProfitDPResult`.  Past 52 bits the exact Nemhauser-Ullmann solve
    takes over.
    """
    if instance.d != 2:
        raise ContractViolation(f"round_and_solve needs d=2, got d={instance.d}")
    if instance.capacities is None:
        raise ContractViolation("round_and_solve needs a capacity")
    profits = [float(p) for p in instance.profits]
    if any(not 0.0 <= p <= 1.0 for p in profits):
        raise DomainError("round_and_solve needs profits in [0, 1]")
    n = instance.n
    weights = instance.weights[0]
    cap = instance.capacities[0]
    if cap < 0:
        raise InfeasibleError(f"negative capacity {cap} leaves no feasible solution")
    threshold = 2 * n
    b = start_bits(n)
    attempts = []
    # rounded profit sums must stay inside int64
    while b <= MAX_BITS and (n + 1) << b < 2**62:
        attempts.append(b)
        scale = 2.0**b
        rounded = [math.floor(p * scale) for p in profits]
        res = solver(rounded, weights, cap)
        if res.gap > threshold:
            sol = Solution(res.bits)
            scored = ScoredSolution(sol, instance.evaluate(sol))
            return RoundSolveResult(scored, b, True, False, tuple(attempts))
        b += 1
    return RoundSolveResult(solve(instance), b, False, True, tuple(attempts))
