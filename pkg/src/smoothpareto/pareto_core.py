"""Dominance semantics and non-dominance filters.

Three filters produce identical output: ``filter_naive`` (the oracle),
``filter_sweep2d`` for two objectives and ``filter_klp``, the
Kung-Luccio-Preparata divide-and-conquer maximal-vector algorithm for any
number of objectives.

Internally every kernel works on *canonical* tuples in which all axes are
minimized (maximized axes are negated).  Inputs and outputs keep their
natural orientation.
"""

from __future__ import annotations

import enum
import itertools
import math
import numbers
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ContractViolation, GuardError

BRUTEFORCE_LIMIT = 25


class Direction(enum.Enum):
    MAXIMIZE = "max"
    MINIMIZE = "min"


MAX = Direction.MAXIMIZE
MIN = Direction.MINIMIZE


def _scalar(v):
    t = type(v)
    if t is int:
        return v
    if t is float:
        if not math.isfinite(v):
            raise ContractViolation(f"objective value {v!r} is not finite")
        return v
    if isinstance(v, bool):
        raise ContractViolation("booleans are not objective values")
    if isinstance(v, numbers.Integral):
        return int(v)
    if isinstance(v, numbers.Real):
        f = float(v)
        if not math.isfinite(f):
            raise ContractViolation(f"objective value {v!r} is not finite")
        return f
    raise ContractViolation(f"objective value {v!r} is not a real number")


@dataclass(frozen=True, slots=True)
class ObjectiveVector:
    """``d >= 2`` objective values plus the optimization direction of each axis.

    Values are either all exact integers or all floats.
    """

    values: tuple
    directions: tuple

    def __post_init__(self):
        values = tuple(_scalar(v) for v in self.values)
        directions = tuple(self.directions)
        if len(values) != len(directions):
            raise ContractViolation(
                f"{len(values)} values but {len(directions)} directions"
            )
        if len(values) < 2:
            raise ContractViolation("an objective vector needs at least 2 axes")
        kinds = {type(v) for v in values}
        if len(kinds) > 1:
            raise ContractViolation("integer and float values mixed in one vector")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "directions", directions)

    @classmethod
    def _trusted(cls, values: tuple, directions: tuple) -> "ObjectiveVector":
        # for values computed from an already validated instance
        obj = object.__new__(cls)
        object.__setattr__(obj, "values", values)
        object.__setattr__(obj, "directions", directions)
        return obj

    @property
    def d(self) -> int:
        return len(self.values)

    def canonical(self) -> tuple:
        """Values with maximized axes negated, so that smaller is better."""
        return _canon(self.values, self.directions)

    def __str__(self):
        return "(" + ", ".join(format_scalar(v) for v in self.values) + ")"


def _canon(values, directions) -> tuple:
    return tuple(-v if s is MAX else v for v, s in zip(values, directions))


def format_scalar(v) -> str:
    """Plain decimal for integers, shortest round-trip form for floats."""
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


@dataclass(frozen=True, order=True, slots=True)
class Solution:
    """A fixed-length 0/1 vector; ordering is lexicographic on the bits."""

    bits: tuple

    def __post_init__(self):
        bits = tuple(self.bits)
        if not all(type(b) is int for b in bits):
            bits = tuple(int(b) for b in bits)
        if not set(bits) <= {0, 1}:
            raise ContractViolation("solution bits must be 0 or 1")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def zeros(cls, n: int) -> "Solution":
        return cls((0,) * n)

    @classmethod
    def parse(cls, text: str) -> "Solution":
        return cls(tuple(int(c) for c in text))

    @classmethod
    def from_items(cls, n: int, items: Iterable[int]) -> "Solution":
        bits = [0] * n
        for i in items:
            bits[i] = 1
        return cls(tuple(bits))

    @property
    def n(self) -> int:
        return len(self.bits)

    def items(self) -> list[int]:
        return [i for i, b in enumerate(self.bits) if b]

    def __len__(self):
        return len(self.bits)

    def __str__(self):
        return "".join(map(str, self.bits))


@dataclass(frozen=True, slots=True)
class ScoredSolution:
    solution: Solution
    objective: ObjectiveVector


def _sort_key(entry: ScoredSolution):
    values = entry.objective.values
    dirs = entry.objective.directions
    k = next((i for i, s in enumerate(dirs) if s is MIN), 0)
    rest = values[:k] + values[k + 1:]
    return (values[k],) + rest + (entry.solution,)


@dataclass(frozen=True)
class ParetoSet:
    """Dominance-free entries in canonical order.

    Entries are sorted ascending by the first minimized axis, then
    lexicographically by the remaining axes.  For the usual two-objective
    (max profit, min weight) layout the profit is then strictly increasing.
    """

    entries: tuple
    directions: tuple

    @classmethod
    def build(cls, entries: Iterable[ScoredSolution], directions) -> "ParetoSet":
        return cls(tuple(sorted(entries, key=_sort_key)), tuple(directions))

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def values(self) -> list[tuple]:
        return [e.objective.values for e in self.entries]

    def solutions(self) -> list[Solution]:
        return [e.solution for e in self.entries]

    def pairs(self) -> list[tuple]:
        """(bits, values) pairs; equality of these lists is bit-for-bit equality."""
        return [(e.solution.bits, e.objective.values) for e in self.entries]

    def check(self) -> None:
        """Assert the set invariants (quadratic; meant for tests)."""
        seen = set()
        for e in self.entries:
            if e.objective.values in seen:
                raise ContractViolation(f"duplicate objective {e.objective}")
            seen.add(e.objective.values)
        for a in self.entries:
            for b in self.entries:
                if a is not b and dominates(a.objective, b.objective):
                    raise ContractViolation(f"{a.objective} dominates {b.objective}")
        keys = [_sort_key(e) for e in self.entries]
        if keys != sorted(keys):
            raise ContractViolation("entries are not in canonical order")


def _check_compatible(a: ObjectiveVector, b: ObjectiveVector) -> None:
    if len(a.values) != len(b.values):
        raise ContractViolation(
            f"cannot compare vectors of dimension {len(a.values)} and {len(b.values)}"
        )
    if a.directions != b.directions:
        raise ContractViolation("cannot compare vectors with different directions")


def dominates(a: ObjectiveVector, b: ObjectiveVector) -> bool:
    """True iff ``a`` is at least as good as ``b`` everywhere and better somewhere."""
    _check_compatible(a, b)
    strict = False
    for x, y, s in zip(a.values, b.values, a.directions):
        if s is MAX:
            x, y = -x, -y
        if x > y:
            return False
        if x < y:
            strict = True
    return strict


def _weakly_le(a: tuple, b: tuple) -> bool:
    return all(x <= y for x, y in zip(a, b))


# -- kernels on canonical tuples --------------------------------------------


def _naive_kernel(canon: Sequence[tuple]) -> list[int]:
    # A dominated point is dominated by some non-dominated point, and every
    # dominator precedes its victim in lexicographic order, so comparing
    # against the earlier survivors (and earlier points of the same block)
    # is enough.  Points must be distinct.
    order = sorted(range(len(canon)), key=lambda i: canon[i])
    arr = _as_array([canon[i] for i in order])
    if arr is None:
        kept: list[int] = []
        for i in order:
            p = canon[i]
            if not any(_weakly_le(canon[j], p) for j in kept):
                kept.append(i)
        return kept
    survivors = np.empty((0, arr.shape[1]), dtype=arr.dtype)
    keep_pos = []
    for start in range(0, len(arr), _BLOCK):
        block = arr[start:start + _BLOCK]
        # pairwise weak dominance, earlier block points only
        le = (block[:, None, :] <= block[None, :, :]).all(axis=2)
        dominated = np.triu(le, k=1).any(axis=0)
        if len(survivors):
            by_old = (survivors[:, None, :] <= block[None, :, :]).all(axis=2)
            dominated |= by_old.any(axis=0)
        fresh = np.flatnonzero(~dominated)
        survivors = np.concatenate([survivors, block[fresh]])
        keep_pos.extend(start + fresh)
    return [order[k] for k in keep_pos]


_BLOCK = 32
_INT64_SAFE = 2 ** 62


def _as_array(rows: list[tuple]):
    """A numpy view of canonical rows, or None when int64 could overflow."""
    if not rows:
        return None
    if all(isinstance(v, float) for v in rows[0]):
        return np.asarray(rows, dtype=np.float64)
    flat = [v for r in rows for v in r]
    if all(isinstance(v, int) and -_INT64_SAFE <= v <= _INT64_SAFE for v in flat):
        return np.asarray(rows, dtype=np.int64)
    return None


def _sweep_kernel(canon: Sequence[tuple], tiebreak: Sequence) -> list[int]:
    order = sorted(range(len(canon)), key=lambda i: (canon[i], tiebreak[i]))
    kept = []
    best = math.inf
    for i in order:
        b = canon[i][1]
        if b < best:
            kept.append(i)
            best = b
    return kept


_BASE = 8


def _filter_by(a_pts: list[tuple], b_pts: list[tuple], k: int) -> list[tuple]:
    """Points of ``b_pts`` not weakly dominated by any point of ``a_pts``.

    Only the last ``k`` coordinates are compared; earlier coordinates are
    already known to favour ``a_pts``.
    """
    if not a_pts or not b_pts:
        return list(b_pts)
    off = len(b_pts[0]) - k
    if k == 1:
        lo = min(a[off] for a in a_pts)
        return [b for b in b_pts if b[off] < lo]
    if k == 2:
        # staircase sweep on the first remaining axis; A before B on ties
        tagged = [(a[off], 0, a[off + 1], None) for a in a_pts]
        tagged += [(b[off], 1, b[off + 1], idx) for idx, b in enumerate(b_pts)]
        tagged.sort(key=lambda t: (t[0], t[1]))
        best = math.inf
        keep = [True] * len(b_pts)
        for _, kind, y, idx in tagged:
            if kind == 0:
                best = min(best, y)
            elif best <= y:
                keep[idx] = False
        return [b for b, ok in zip(b_pts, keep) if ok]
    if len(a_pts) * len(b_pts) <= _BASE * _BASE:
        return [
            b for b in b_pts
            if not any(_weakly_le(a[off:], b[off:]) for a in a_pts)
        ]
    axis_vals = sorted(p[off] for p in itertools.chain(a_pts, b_pts))
    m = axis_vals[len(axis_vals) // 2]
    if m < axis_vals[-1]:
        low = lambda p: p[off] <= m  # noqa: E731
    elif axis_vals[0] < m:
        low = lambda p: p[off] < m  # noqa: E731
    else:
        # the split axis is constant, so it cannot separate anything
        return _filter_by(a_pts, b_pts, k - 1)
    a_lo = [a for a in a_pts if low(a)]
    a_hi = [a for a in a_pts if not low(a)]
    b_lo = [b for b in b_pts if low(b)]
    b_hi = [b for b in b_pts if not low(b)]
    out_lo = _filter_by(a_lo, b_lo, k)
    out_hi = _filter_by(a_hi, b_hi, k)
    out_hi = _filter_by(a_lo, out_hi, k - 1)
    return out_lo + out_hi


def _maxima(points: list[tuple]) -> list[tuple]:
    # points: distinct canonical tuples sorted lexicographically
    m = len(points)
    if m <= 1:
        return list(points)
    if len(points[0]) == 2:
        out, best = [], math.inf
        for p in points:
            if p[1] < best:
                out.append(p)
                best = p[1]
        return out
    half = m // 2
    low = _maxima(points[:half])
    high = _maxima(points[half:])
    # lexicographic order means no high point can dominate a low point
    return low + _filter_by(low, high, len(points[0]) - 1)


def _klp_kernel(canon: Sequence[tuple]) -> list[int]:
    index = {}
    for i, c in enumerate(canon):
        index.setdefault(c, i)
    survivors = _maxima(sorted(index))
    return [index[c] for c in survivors]


# -- public filters ------------------------------------------------------------


def _prepare(points: Sequence[ScoredSolution]):
    points = list(points)
    if not points:
        return [], None
    first = points[0].objective
    for p in points[1:]:
        _check_compatible(first, p.objective)
    return points, first.directions


def _dedupe(points: list[ScoredSolution]) -> list[ScoredSolution]:
    best: dict[tuple, ScoredSolution] = {}
    for p in points:
        key = p.objective.values
        cur = best.get(key)
        if cur is None or p.solution < cur.solution:
            best[key] = p
    return list(best.values())


def filter_naive(points: Sequence[ScoredSolution]) -> ParetoSet:
    """Reference filter by pairwise dominance checks."""
    points, dirs = _prepare(points)
    if not points:
        return ParetoSet((), ())
    points = _dedupe(points)
    canon = [p.objective.canonical() for p in points]
    return ParetoSet.build((points[i] for i in _naive_kernel(canon)), dirs)


def filter_sweep2d(points: Sequence[ScoredSolution]) -> ParetoSet:
    """Two-objective filter: one sort, then a linear sweep."""
    points, dirs = _prepare(points)
    if not points:
        return ParetoSet((), ())
    if len(dirs) != 2:
        raise ContractViolation(f"filter_sweep2d needs d=2, got d={len(dirs)}")
    canon = [p.objective.canonical() for p in points]
    kept = _sweep_kernel(canon, [p.solution for p in points])
    return ParetoSet.build((points[i] for i in kept), dirs)


def filter_klp(points: Sequence[ScoredSolution]) -> ParetoSet:
    """Kung-Luccio-Preparata divide and conquer, O(m log^(d-2) m)."""
    points, dirs = _prepare(points)
    if not points:
        return ParetoSet((), ())
    points = _dedupe(points)
    canon = [p.objective.canonical() for p in points]
    return ParetoSet.build((points[i] for i in _klp_kernel(canon)), dirs)


def maxima_indices(canon: Sequence[tuple]) -> list[int]:
    """Indices of the non-dominated canonical (all-minimize) tuples.

    Equal tuples keep their first occurrence.  Dispatches to the sweep for
    two axes and to KLP otherwise.
    """
    if not canon:
        return []
    if len(canon[0]) == 2:
        return _sweep_kernel(canon, range(len(canon)))
    return _klp_kernel(canon)


def pareto_bruteforce(
    evaluate: Callable[[Solution], ObjectiveVector],
    n: int,
    *,
    limit: int = BRUTEFORCE_LIMIT,
) -> ParetoSet:
    """Pareto set over all ``2**n`` solutions, by enumeration."""
    if n < 0:
        raise ContractViolation("n must be non-negative")
    if n > limit:
        raise GuardError("n", n, limit)
    points = [
        ScoredSolution(sol, evaluate(sol))
        for sol in map(Solution, itertools.product((0, 1), repeat=n))
    ]
    return filter_naive(points)
