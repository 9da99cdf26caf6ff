"""Knapsack instances and the Nemhauser-Ullmann Pareto dynamic program.

The program keeps, for every prefix of the items, the values of the Pareto
set of that prefix sorted by weight.  Each stored value points back to the
entry of the previous level it came from, so solutions are reconstructed
only when asked for.
"""

from __future__ import annotations

import math
import numbers
import re
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ContractViolation, GuardError, InfeasibleError, InvariantError, ParseError
from .pareto_core import (
    MAX,
    MIN,
    ObjectiveVector,
    ParetoSet,
    ScoredSolution,
    Solution,
    _klp_kernel,
    _naive_kernel,
    format_scalar,
)

EXPONENTIAL_LIMIT = 62


def _unify(values: list) -> list:
    """Promote to float if any value is a float, so one instance never mixes."""
    out = []
    for v in values:
        if isinstance(v, bool) or not isinstance(v, numbers.Real):
            raise ContractViolation(f"value {v!r} is not a number")
        if isinstance(v, numbers.Integral):
            out.append(int(v))
        else:
            f = float(v)
            if not math.isfinite(f):
                raise ContractViolation(f"value {v!r} is not finite")
            out.append(f)
    if any(isinstance(v, float) for v in out):
        out = [float(v) for v in out]
    return out


@dataclass(frozen=True)
class KnapsackInstance:
    """Profits (maximized) and ``d-1`` weight rows (each minimized).

    ``capacities`` may be ``None`` when only the Pareto set is wanted.
    ``weight_range`` declares the interval perturbed weights were drawn from;
    it is checked but otherwise informational.
    """

    profits: tuple
    weights: tuple
    capacities: tuple | None = None
    weight_range: tuple | None = None

    def __post_init__(self):
        profits = list(self.profits)
        rows = [list(r) for r in self.weights]
        if not rows:
            raise ContractViolation("at least one weight row is required (d >= 2)")
        n = len(profits)
        for r in rows:
            if len(r) != n:
                raise ContractViolation(f"weight row has {len(r)} entries, expected {n}")
        caps = None if self.capacities is None else list(self.capacities)
        if caps is not None and len(caps) != len(rows):
            raise ContractViolation(f"{len(caps)} capacities for {len(rows)} weight rows")
        flat = _unify(profits + [v for r in rows for v in r] + (caps or []))
        profits = flat[:n]
        rows = [flat[n + k * n: n + (k + 1) * n] for k in range(len(rows))]
        if caps is not None:
            caps = flat[n + len(rows) * n:]
        if any(p < 0 for p in profits):
            raise ContractViolation("profits must be non-negative")
        if self.weight_range is not None:
            lo, hi = self.weight_range
            for r in rows:
                if any(not lo <= w <= hi for w in r):
                    raise ContractViolation(f"weight outside declared range [{lo}, {hi}]")
        object.__setattr__(self, "profits", tuple(profits))
        object.__setattr__(self, "weights", tuple(tuple(r) for r in rows))
        object.__setattr__(self, "capacities", None if caps is None else tuple(caps))
        object.__setattr__(self, "_dirs", (MAX,) + (MIN,) * len(rows))
        object.__setattr__(
            self, "_zero", 0 if all(isinstance(v, int) for v in flat) else 0.0
        )

    @classmethod
    def from_items(cls, items: Iterable[Sequence], capacity=None) -> "KnapsackInstance":
        """Build from ``(p, w1, ..., w_{d-1})`` rows.

        ``capacity`` is a scalar for ``d=2`` or a sequence of ``d-1`` values.
        """
        items = [tuple(it) for it in items]
        if items:
            widths = {len(it) for it in items}
            if len(widths) != 1 or widths.pop() < 2:
                raise ContractViolation("items must all be (p, w1, ..., w_{d-1}) rows")
            dm1 = len(items[0]) - 1
        else:
            dm1 = 1 if capacity is None or not isinstance(capacity, Sequence) else len(capacity)
        caps = None
        if capacity is not None:
            caps = tuple(capacity) if isinstance(capacity, Sequence) else (capacity,)
        return cls(
            profits=tuple(it[0] for it in items),
            weights=tuple(tuple(it[k + 1] for it in items) for k in range(dm1)),
            capacities=caps,
        )

    @property
    def n(self) -> int:
        return len(self.profits)

    @property
    def d(self) -> int:
        return len(self.weights) + 1

    @property
    def exact(self) -> bool:
        """True when every number is an exact integer."""
        return isinstance(self._zero, int)

    @property
    def directions(self) -> tuple:
        return self._dirs

    def zero(self):
        return self._zero

    def prefix(self, i: int) -> "KnapsackInstance":
        """The instance restricted to the first ``i`` items."""
        return KnapsackInstance(
            self.profits[:i], tuple(r[:i] for r in self.weights), self.capacities
        )

    def evaluate(self, solution: Solution) -> ObjectiveVector:
        if solution.n != self.n:
            raise ContractViolation(f"solution has {solution.n} bits, instance has {self.n} items")
        z = self.zero()
        bits = solution.bits
        # left-to-right sums from zero, the same order the dynamic program uses
        p = sum((v for v, b in zip(self.profits, bits) if b), z)
        ws = [sum((v for v, b in zip(row, bits) if b), z) for row in self.weights]
        return ObjectiveVector._trusted((p, *ws), self._dirs)

    def is_feasible(self, solution: Solution) -> bool:
        if self.capacities is None:
            raise ContractViolation("instance has no capacities")
        ws = self.evaluate(solution).values[1:]
        return all(w <= c for w, c in zip(ws, self.capacities))


@dataclass
class NUTrace:
    """Telemetry of one Nemhauser-Ullmann run.

    ``sizes[i]`` is the size of the Pareto set of the first ``i`` items.
    ``levels`` holds their value tuples when recording was requested.
    """

    sizes: list = field(default_factory=list)
    elapsed: float = 0.0
    comparisons: int = 0
    levels: list | None = None

    @property
    def work(self) -> int:
        """sum of |P_i| for i < n, the running-time measure of the algorithm."""
        return sum(self.sizes[:-1])


class _Levels:
    """Back-references of all levels, for reconstruction and tie-breaking."""

    def __init__(self, n: int):
        self.n = n
        self.parent: list[list[int]] = []
        self.took: list[list[bool]] = []

    def bits(self, level: int, idx: int) -> list[int]:
        bits = [0] * self.n
        for lv in range(level, 0, -1):
            if self.took[lv - 1][idx]:
                bits[lv - 1] = 1
            idx = self.parent[lv - 1][idx]
        return bits

    def prefix_less(self, level: int, a: int, b: int) -> bool:
        """Is solution ``a`` lexicographically smaller than ``b`` (both at ``level``)?"""
        return self.bits(level, a) < self.bits(level, b)


def _shift_first(levels: _Levels, i: int, ja: int, jb: int) -> bool:
    # Tie between ja (item i left out) and jb + item i with equal values.
    # Bits after item i are zero in both, so only the prefix and bit i decide.
    if ja == jb:
        return False
    return levels.prefix_less(i, jb, ja)


def nu_pareto(
    instance: KnapsackInstance,
    *,
    prune_capacity: bool = False,
    check_invariants: bool = False,
    record_levels: bool = False,
) -> tuple[ParetoSet, NUTrace]:
    """Pareto set of a two-objective knapsack instance (max profit, min weight)."""
    if instance.d != 2:
        raise ContractViolation(f"nu_pareto needs d=2, got d={instance.d}; use nu_pareto_multi")
    cap = None
    if prune_capacity:
        if instance.capacities is None:
            raise ContractViolation("capacity pruning needs a capacity")
        cap = instance.capacities[0]
    t0 = time.perf_counter()
    n = instance.n
    profits = instance.profits
    weights = instance.weights[0]
    z = instance.zero()
    cur_w, cur_p = [z], [z]
    levels = _Levels(n)
    trace = NUTrace(sizes=[1], levels=[[(z, z)]] if record_levels else None)
    comparisons = 0
    for i in range(n):
        pi, wi = profits[i], weights[i]
        m = len(cur_w)
        sh_w = [w + wi for w in cur_w]
        sh_p = [p + pi for p in cur_p]
        new_w, new_p, parent, took = [], [], [], []
        best = -math.inf
        a = b = 0
        while a < m or b < m:
            if b >= m:
                use_b = False
            elif a >= m:
                use_b = True
            else:
                comparisons += 1
                wa, wb = cur_w[a], sh_w[b]
                if wa != wb:
                    use_b = wb < wa
                elif cur_p[a] != sh_p[b]:
                    use_b = sh_p[b] > cur_p[a]
                else:
                    use_b = _shift_first(levels, i, a, b)
            if use_b:
                w, p, j, t = sh_w[b], sh_p[b], b, True
                b += 1
            else:
                w, p, j, t = cur_w[a], cur_p[a], a, False
                a += 1
            if cap is not None and w > cap:
                continue
            if p > best:
                best = p
                new_w.append(w)
                new_p.append(p)
                parent.append(j)
                took.append(t)
        if check_invariants:
            _check_level(cur_w, cur_p, sh_w, sh_p, new_w, new_p, i + 1)
        levels.parent.append(parent)
        levels.took.append(took)
        cur_w, cur_p = new_w, new_p
        trace.sizes.append(len(cur_w))
        if record_levels:
            trace.levels.append(list(zip(cur_p, cur_w)))
    entries = [
        ScoredSolution(Solution(tuple(levels.bits(n, k))), ObjectiveVector((p, w), instance.directions))
        for k, (p, w) in enumerate(zip(cur_p, cur_w))
    ]
    trace.comparisons = comparisons
    trace.elapsed = time.perf_counter() - t0
    return ParetoSet(tuple(entries), instance.directions), trace


def _check_level(cur_w, cur_p, sh_w, sh_p, new_w, new_p, level):
    q = set(zip(cur_w, cur_p)) | set(zip(sh_w, sh_p))
    for wp in zip(new_w, new_p):
        if wp not in q:
            raise InvariantError(f"P_{level} entry {wp} is not in Q_{level}")
    for k in range(1, len(new_w)):
        if not (new_w[k - 1] < new_w[k] and new_p[k - 1] < new_p[k]):
            raise InvariantError(f"P_{level} is not a strict staircase at position {k}")


def nu_pareto_multi(
    instance: KnapsackInstance,
    *,
    filter: str = "klp",
    record_levels: bool = False,
) -> tuple[ParetoSet, NUTrace]:
    """Pareto set for ``d >= 3`` objectives (max profit, min every weight row).

    ``filter`` selects the dominance filter applied to each merged level:
    ``"klp"`` (default) or ``"naive"`` for cross-checking.
    """
    if instance.d < 3:
        raise ContractViolation(f"nu_pareto_multi needs d>=3, got d={instance.d}")
    kernel = {"klp": _klp_kernel, "naive": _naive_kernel}.get(filter)
    if kernel is None:
        raise ContractViolation(f"unknown filter {filter!r}")
    t0 = time.perf_counter()
    n, d = instance.n, instance.d
    dirs = instance.directions
    z = instance.zero()
    cur = [(z,) * d]
    levels = _Levels(n)
    trace = NUTrace(sizes=[1], levels=[list(cur)] if record_levels else None)
    comparisons = 0
    for i in range(n):
        item = (instance.profits[i],) + tuple(r[i] for r in instance.weights)
        shifted = [tuple(x + y for x, y in zip(v, item)) for v in cur]
        # resolve equal-value collisions between the two halves first
        slot: dict[tuple, tuple[int, bool]] = {v: (k, False) for k, v in enumerate(cur)}
        for k, v in enumerate(shifted):
            prev = slot.get(v)
            if prev is None or _shift_first(levels, i, prev[0], k):
                slot[v] = (k, True)
        cand = list(slot)
        canon = [tuple(-x if s is MAX else x for x, s in zip(v, dirs)) for v in cand]
        keep = kernel(canon)
        comparisons += len(cand)
        kept = sorted((cand[k] for k in keep), key=lambda v: (v[1], v[0]) + v[2:])
        levels.parent.append([slot[v][0] for v in kept])
        levels.took.append([slot[v][1] for v in kept])
        cur = kept
        trace.sizes.append(len(cur))
        if record_levels:
            trace.levels.append(list(cur))
    entries = [
        ScoredSolution(Solution(tuple(levels.bits(n, k))), ObjectiveVector(v, dirs))
        for k, v in enumerate(cur)
    ]
    trace.comparisons = comparisons
    trace.elapsed = time.perf_counter() - t0
    return ParetoSet.build(entries, dirs), trace


def pareto(instance: KnapsackInstance, **kwargs) -> tuple[ParetoSet, NUTrace]:
    """Dispatch to ``nu_pareto`` or ``nu_pareto_multi`` by dimension."""
    if instance.d == 2:
        return nu_pareto(instance, **kwargs)
    return nu_pareto_multi(instance, **kwargs)


def solve(instance: KnapsackInstance, *, prune_capacity: bool = False) -> ScoredSolution:
    """Optimal solution: the most profitable feasible Pareto-optimal entry."""
    caps = instance.capacities
    if caps is None:
        raise ContractViolation("solve needs capacities")
    if any(c < 0 for c in caps):
        raise InfeasibleError(f"negative capacity {caps} leaves no feasible solution")
    if prune_capacity and instance.d == 2:
        front, _ = nu_pareto(instance, prune_capacity=True)
    else:
        front, _ = pareto(instance)
    best = None
    for e in front:
        ws = e.objective.values[1:]
        if any(w > c for w, c in zip(ws, caps)):
            continue
        if best is None:
            best = e
            continue
        p, bp = e.objective.values[0], best.objective.values[0]
        if p > bp or (p == bp and e.solution < best.solution):
            best = e
    if best is None:
        raise InfeasibleError("no feasible solution")
    return best


# -- fixture generators -------------------------------------------------------


def gen_exponential(n: int) -> KnapsackInstance:
    """Items with p_i = w_i = 2**i (i = 1..n); every solution is Pareto-optimal."""
    if not 0 <= n <= EXPONENTIAL_LIMIT:
        raise GuardError("n", n, EXPONENTIAL_LIMIT)
    vals = tuple(2 ** i for i in range(1, n + 1))
    return KnapsackInstance(vals, (vals,))


# Found by randomized search over small integer instances; the Pareto set
# sizes of the prefixes are 1, 2, 4, 7, 12, 11.
_NONMONOTONE_ITEMS = ((7, 3), (5, 2), (9, 8), (8, 7), (4, 3))


def gen_nonmonotone() -> KnapsackInstance:
    """A fixed instance whose prefix Pareto sets shrink from 12 to 11 entries."""
    return KnapsackInstance.from_items(_NONMONOTONE_ITEMS)


# -- text format --------------------------------------------------------------

_INT_RE = re.compile(r"[+-]?\d+\Z")


def parse_scalar(token: str, line: int | None = None, *, exact_int: bool = False):
    if _INT_RE.match(token):
        return int(token)
    if exact_int:
        raise ParseError(f"expected an integer, got {token!r}", line)
    try:
        v = float(token)
    except ValueError:
        raise ParseError(f"not a number: {token!r}", line) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite value {token!r}", line)
    return v


def content_lines(text: str):
    """(line number, tokens) for every non-blank line, comments stripped."""
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].split()
        if body:
            yield no, body


def parse_knapsack(text: str, *, exact_int: bool = False) -> KnapsackInstance:
    """Parse ``d n`` / capacities or ``-`` / ``n`` item rows."""
    lines = list(content_lines(text))
    if not lines:
        raise ParseError("empty knapsack file")
    no, head = lines[0]
    if len(head) != 2 or not all(_INT_RE.match(t) for t in head):
        raise ParseError("header must be 'd n'", no)
    d, n = int(head[0]), int(head[1])
    if d < 2 or n < 0:
        raise ParseError(f"invalid header d={d} n={n}", no)
    if len(lines) < 2:
        raise ParseError("missing capacity line", no)
    no, cap_tokens = lines[1]
    if cap_tokens == ["-"]:
        caps = None
    else:
        if len(cap_tokens) != d - 1:
            raise ParseError(f"expected {d - 1} capacities", no)
        caps = tuple(parse_scalar(t, no, exact_int=exact_int) for t in cap_tokens)
    rows = lines[2:]
    if len(rows) != n:
        where = rows[n][0] if len(rows) > n else (rows[-1][0] if rows else no)
        raise ParseError(f"expected {n} item lines, found {len(rows)}", where)
    items = []
    for no, toks in rows:
        if len(toks) != d:
            raise ParseError(f"expected {d} values per item, got {len(toks)}", no)
        items.append(tuple(parse_scalar(t, no, exact_int=exact_int) for t in toks))
    try:
        return KnapsackInstance(
            profits=tuple(it[0] for it in items),
            weights=tuple(tuple(it[k] for it in items) for k in range(1, d)),
            capacities=caps,
        )
    except ContractViolation as exc:
        raise ParseError(str(exc)) from None


def load_knapsack(path, *, exact_int: bool = False) -> KnapsackInstance:
    return parse_knapsack(Path(path).read_text(), exact_int=exact_int)


def format_knapsack(instance: KnapsackInstance) -> str:
    out = [f"{instance.d} {instance.n}"]
    if instance.capacities is None:
        out.append("-")
    else:
        out.append(" ".join(format_scalar(c) for c in instance.capacities))
    for i in range(instance.n):
        vals = [instance.profits[i]] + [r[i] for r in instance.weights]
        out.append(" ".join(format_scalar(v) for v in vals))
    return "\n".join(out) + "\n"
