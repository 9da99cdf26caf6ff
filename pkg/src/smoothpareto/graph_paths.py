"""Bicriteria shortest paths: label-correcting Bellman-Ford and Floyd-Warshall.

Every vertex carries a list of (cost, weight) labels kept dominance-free and
sorted by weight.  Relaxing edge (u, v) merges the shifted list of u into the
list of v and sweeps out dominated labels, in time linear in both lists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

from .errors import ContractViolation, GuardError, ParseError
from .knapsack import _unify, content_lines, parse_scalar
from .pareto_core import (
    MIN,
    ObjectiveVector,
    ParetoSet,
    ScoredSolution,
    Solution,
    filter_naive,
    format_scalar,
)

PATHS_BRUTEFORCE_LIMIT = 12
EXP_PATHS_LIMIT = 20

DIRECTIONS = (MIN, MIN)


class Edge(NamedTuple):
    u: int
    v: int
    cost: float
    weight: float


@dataclass(frozen=True)
class BiGraph:
    """Directed multigraph with strictly positive edge costs and weights."""

    vertex_count: int
    edges: tuple
    source: int = 0

    def __post_init__(self):
        n = self.vertex_count
        if n < 1:
            raise ContractViolation("a graph needs at least one vertex")
        if not 0 <= self.source < n:
            raise ContractViolation(f"source {self.source} is not a vertex")
        raw = [tuple(e) for e in self.edges]
        for idx, (u, v, c, w) in enumerate(raw):
            if not (0 <= u < n and 0 <= v < n):
                raise ContractViolation(f"edge {idx} ({u}, {v}) has a vertex outside [0, {n})")
            if not c > 0 or not w > 0:
                raise ContractViolation(f"edge {idx} must have positive cost and weight")
        nums = _unify([x for e in raw for x in e[2:]])
        edges = tuple(
            Edge(int(u), int(v), nums[2 * k], nums[2 * k + 1])
            for k, (u, v, _, _) in enumerate(raw)
        )
        object.__setattr__(self, "edges", edges)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def zero(self):
        return 0.0 if any(isinstance(e.cost, float) for e in self.edges) else 0

    def with_source(self, source: int) -> "BiGraph":
        return BiGraph(self.vertex_count, self.edges, source)


@dataclass(frozen=True, slots=True)
class PathLabel:
    """Value of one s-v path plus a back-reference to the label it extends."""

    cost: float
    weight: float
    pred: "PathLabel | None" = None
    edge: int | None = None

    def edge_indices(self) -> list[int]:
        out = []
        lab = self
        while lab.edge is not None:
            out.append(lab.edge)
            lab = lab.pred
        out.reverse()
        return out

    def vertices(self, graph: BiGraph) -> list[int]:
        verts = [graph.source]
        for idx in self.edge_indices():
            verts.append(graph.edges[idx].v)
        return verts


@dataclass
class LabelLists:
    labels: list
    relax_count: int = 0
    work: int = 0
    rounds: int = 0
    history: list | None = field(default=None, repr=False)

    def values(self, v: int) -> list[tuple]:
        return [(lab.cost, lab.weight) for lab in self.labels[v]]

    def __getitem__(self, v: int) -> list:
        return self.labels[v]


def _relax(lu: list, lv: list, c, w, edge: int) -> tuple[list, bool]:
    shifted = [PathLabel(lab.cost + c, lab.weight + w, lab, edge) for lab in lu]
    out = []
    best = math.inf
    changed = False
    a = b = 0
    na, nb = len(lv), len(shifted)
    while a < na or b < nb:
        if b >= nb:
            take_b = False
        elif a >= na:
            take_b = True
        else:
            x, y = lv[a], shifted[b]
            # ties on both values keep the label that was there first
            take_b = (y.weight, y.cost) < (x.weight, x.cost)
        if take_b:
            lab = shifted[b]
            b += 1
        else:
            lab = lv[a]
            a += 1
        if lab.cost < best:
            best = lab.cost
            out.append(lab)
            if take_b:
                changed = True
    if not changed and len(out) == na:
        return lv, False
    return out, True


def bf_pareto(
    graph: BiGraph,
    *,
    early_exit: bool = True,
    check_invariants: bool = False,
) -> LabelLists:
    """Pareto-optimal s-v path values for every vertex v.

    Runs ``|V|-1`` rounds of relax operations over the edges in input order.
    With ``early_exit`` the loop stops after a round that changed nothing,
    which cannot alter the result.
    """
    z = graph.zero()
    labels: list[list[PathLabel]] = [[] for _ in range(graph.vertex_count)]
    labels[graph.source] = [PathLabel(z, z)]
    result = LabelLists(labels)
    for _ in range(graph.vertex_count - 1):
        result.rounds += 1
        changed = False
        for idx, (u, v, c, w) in enumerate(graph.edges):
            result.relax_count += 1
            result.work += len(labels[u]) + len(labels[v])
            if not labels[u]:
                continue
            labels[v], ch = _relax(labels[u], labels[v], c, w, idx)
            changed |= ch
            if check_invariants:
                _check_list(labels[v], v)
        if early_exit and not changed:
            break
    return result


def _check_list(lv: list, v: int) -> None:
    from .errors import InvariantError

    for k in range(1, len(lv)):
        if not (lv[k - 1].weight < lv[k].weight and lv[k - 1].cost > lv[k].cost):
            raise InvariantError(f"label list of vertex {v} is not a strict staircase")


def _front(pairs) -> list[tuple]:
    """Dominance-free (cost, weight) pairs sorted by weight."""
    out, best = [], math.inf
    for c, w in sorted(pairs, key=lambda p: (p[1], p[0])):
        if c < best:
            out.append((c, w))
            best = c
    return out


def fw_pareto(graph: BiGraph) -> list[list[list[tuple]]]:
    """All-pairs Pareto (cost, weight) values via the intermediate-vertex recursion.

    ``result[u][v]`` lists the Pareto-optimal u-v path values sorted by weight;
    the diagonal holds the empty path ``(0, 0)``.
    """
    n = graph.vertex_count
    z = graph.zero()
    dist: list[list[list[tuple]]] = [[[] for _ in range(n)] for _ in range(n)]
    for u in range(n):
        dist[u][u] = [(z, z)]
    direct: dict[tuple, list] = {}
    for u, v, c, w in graph.edges:
        direct.setdefault((u, v), []).append((c, w))
    for (u, v), pairs in direct.items():
        dist[u][v] = _front(dist[u][v] + pairs)
    for m in range(n):
        for u in range(n):
            um = dist[u][m]
            if u == m or not um:
                continue
            for v in range(n):
                mv = dist[m][v]
                if v == m or not mv:
                    continue
                joined = [(c1 + c2, w1 + w2) for c1, w1 in um for c2, w2 in mv]
                dist[u][v] = _front(dist[u][v] + joined)
    return dist


def paths_pareto(graph: BiGraph, target: int, *, early_exit: bool = True) -> ParetoSet:
    """Bellman-Ford labels of ``target`` as a ParetoSet over edge incidence vectors."""
    if not 0 <= target < graph.vertex_count:
        raise ContractViolation(f"target {target} is not a vertex")
    lists = bf_pareto(graph, early_exit=early_exit)
    m = graph.edge_count
    entries = [
        ScoredSolution(
            Solution.from_items(m, lab.edge_indices()),
            ObjectiveVector((lab.cost, lab.weight), DIRECTIONS),
        )
        for lab in lists.labels[target]
    ]
    return ParetoSet.build(entries, DIRECTIONS)


def paths_bruteforce(
    graph: BiGraph, target: int, *, limit: int = PATHS_BRUTEFORCE_LIMIT
) -> ParetoSet:
    """Pareto set over all simple source-target paths, by enumeration.

    Solutions are edge incidence vectors.
    """
    if graph.vertex_count > limit:
        raise GuardError("vertex_count", graph.vertex_count, limit)
    if not 0 <= target < graph.vertex_count:
        raise ContractViolation(f"target {target} is not a vertex")
    m = graph.edge_count
    z = graph.zero()
    out_edges: list[list[int]] = [[] for _ in range(graph.vertex_count)]
    for idx, e in enumerate(graph.edges):
        out_edges[e.u].append(idx)
    found: list[ScoredSolution] = []
    visited = [False] * graph.vertex_count
    path: list[int] = []

    def walk(x: int, cost, weight):
        if x == target:
            found.append(
                ScoredSolution(
                    Solution.from_items(m, path),
                    ObjectiveVector((cost, weight), DIRECTIONS),
                )
            )
            return
        visited[x] = True
        for idx in out_edges[x]:
            e = graph.edges[idx]
            if not visited[e.v]:
                path.append(idx)
                walk(e.v, cost + e.cost, weight + e.weight)
                path.pop()
        visited[x] = False

    walk(graph.source, z, z)
    return filter_naive(found)


def gen_exp_paths(k: int) -> BiGraph:
    """A chain of ``k`` stages, each two parallel edges, with 2**k Pareto paths.

    Stage i offers (cost 1 + 2**i, weight 1) or (cost 1, weight 1 + 2**i).
    Every s-t path has cost + weight = 2k + 2**k - 1 and distinct paths have
    distinct costs, so no path dominates another.
    """
    if not 1 <= k <= EXP_PATHS_LIMIT:
        raise GuardError("k", k, EXP_PATHS_LIMIT)
    edges = []
    for i in range(k):
        edges.append(Edge(i, i + 1, 1 + 2 ** i, 1))
        edges.append(Edge(i, i + 1, 1, 1 + 2 ** i))
    return BiGraph(k + 1, tuple(edges), 0)


# -- text format --------------------------------------------------------------


def parse_graph(text: str, *, exact_int: bool = False) -> BiGraph:
    """Parse ``n m s`` followed by ``m`` lines ``u v cost weight``."""
    lines = list(content_lines(text))
    if not lines:
        raise ParseError("empty graph file")
    no, head = lines[0]
    try:
        n, m, s = (int(t) for t in head)
    except ValueError:
        raise ParseError("header must be 'n m s' integers", no) from None
    rows = lines[1:]
    if len(rows) != m:
        where = rows[m][0] if len(rows) > m else (rows[-1][0] if rows else no)
        raise ParseError(f"expected {m} edge lines, found {len(rows)}", where)
    edges = []
    for no, toks in rows:
        if len(toks) != 4:
            raise ParseError("edge lines are 'u v cost weight'", no)
        try:
            u, v = int(toks[0]), int(toks[1])
        except ValueError:
            raise ParseError("edge endpoints must be integers", no) from None
        c = parse_scalar(toks[2], no, exact_int=exact_int)
        w = parse_scalar(toks[3], no, exact_int=exact_int)
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"edge ({u}, {v}) has a vertex outside [0, {n})", no)
        if not (c > 0 and w > 0):
            raise ParseError("edge cost and weight must be positive", no)
        edges.append((u, v, c, w))
    try:
        return BiGraph(n, tuple(edges), s)
    except ContractViolation as exc:
        raise ParseError(str(exc)) from None


def load_graph(path, *, exact_int: bool = False) -> BiGraph:
    return parse_graph(Path(path).read_text(), exact_int=exact_int)


def format_graph(graph: BiGraph) -> str:
    out = [f"{graph.vertex_count} {graph.edge_count} {graph.source}"]
    for e in graph.edges:
        out.append(f"{e.u} {e.v} {format_scalar(e.cost)} {format_scalar(e.weight)}")
    return "\n".join(out) + "\n"
