"""Multiplicative epsilon-dominance and grid-based epsilon-approximate Pareto sets."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ContractViolation, DomainError
from .pareto_core import MAX, ObjectiveVector, ParetoSet, ScoredSolution, _check_compatible


def eps_dominates(y: ObjectiveVector, x: ObjectiveVector, eps: float) -> bool:
    """Is ``x`` worse than ``y`` by at most a factor ``1 + eps`` on every axis?

    Ratio semantics need strictly positive values.
    """
    _check_compatible(y, x)
    if eps < 0:
        raise ContractViolation(f"eps must be >= 0, got {eps}")
    bound = 1.0 + eps
    for a, b, s in zip(y.values, x.values, y.directions):
        if a <= 0 or b <= 0:
            raise DomainError("epsilon-dominance is only defined for positive values")
        ratio = b / a if s is MAX else a / b
        if ratio > bound:
            return False
    return True


def _covered_by(y: ScoredSolution, x: ScoredSolution, eps: float) -> bool:
    if y.objective.values == x.objective.values:
        return True
    if any(v <= 0 for v in y.objective.values + x.objective.values):
        return False
    return eps_dominates(y.objective, x.objective, eps)


@dataclass(frozen=True)
class EpsApproxSet:
    entries: tuple
    epsilon: float
    directions: tuple

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def uncovered(self, source) -> list[ScoredSolution]:
        """Entries of ``source`` that no kept entry epsilon-dominates.

        An entry always covers itself, which takes care of zero values.
        """
        return [
            x for x in source
            if not any(_covered_by(y, x, self.epsilon) for y in self.entries)
        ]

    def covers(self, source) -> bool:
        return not self.uncovered(source)


def _axis_buckets(vmin: float, vmax: float, eps: float) -> int:
    if vmax <= vmin:
        return 1
    return max(1, math.ceil(math.log(vmax / vmin) / math.log1p(eps)))


def _split(pareto: ParetoSet):
    positive, zeros = [], []
    for e in pareto:
        vals = e.objective.values
        if any(v < 0 for v in vals):
            raise DomainError(f"negative objective value in {e.objective}")
        (zeros if any(v == 0 for v in vals) else positive).append(e)
    return positive, zeros


def grid_size_bound(pareto: ParetoSet, eps: float) -> int:
    """Product over axes of ceil(log_{1+eps}(vmax/vmin)), plus ``d`` slack."""
    positive, _ = _split(pareto)
    d = len(pareto.directions) if pareto.directions else 2
    if not positive:
        return d
    total = 1
    for j in range(d):
        col = [e.objective.values[j] for e in positive]
        total *= _axis_buckets(min(col), max(col), eps)
    return total + d


def eps_coreset(pareto: ParetoSet, eps: float) -> EpsApproxSet:
    """Keep one entry per multiplicative grid cell of ratio ``1 + eps``.

    Each axis is cut into buckets ``[vmin (1+eps)^k, vmin (1+eps)^(k+1))``
    starting at the smallest positive value; the top bucket is closed at
    ``vmax``.  Entries with a zero value are kept verbatim.
    """
    if not eps > 0:
        raise ContractViolation(f"eps must be > 0, got {eps}")
    positive, zeros = _split(pareto)
    kept: dict[object, ScoredSolution] = {}
    if positive:
        d = len(positive[0].objective.values)
        lo = [min(e.objective.values[j] for e in positive) for j in range(d)]
        hi = [max(e.objective.values[j] for e in positive) for j in range(d)]
        counts = [_axis_buckets(lo[j], hi[j], eps) for j in range(d)]
        step = math.log1p(eps)
        cells: dict[tuple, ScoredSolution] = {}
        member_cell = []
        for e in positive:
            cell = tuple(
                min(counts[j] - 1, max(0, math.floor(math.log(v / lo[j]) / step)))
                for j, v in enumerate(e.objective.values)
            )
            member_cell.append(cell)
            cur = cells.get(cell)
            if cur is None or e.solution < cur.solution:
                cells[cell] = e
        kept.update(cells)
        # floating-point logs can misplace a value sitting on a bucket edge
        for e, cell in zip(positive, member_cell):
            if not _covered_by(cells[cell], e, eps):
                kept[("edge", e.solution)] = e
    for e in zeros:
        kept[("zero", e.solution)] = e
    entries = ParetoSet.build(kept.values(), pareto.directions).entries
    return EpsApproxSet(entries, eps, pareto.directions)
