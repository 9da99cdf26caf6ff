import numpy as np
import pytest

from smoothpareto import KnapsackInstance
from smoothpareto.graph_paths import BiGraph

# acceptance results, printed in the terminal summary
CRITERIA: dict[int, tuple[bool, str]] = {}


def random_knapsack(rng: np.random.Generator, n: int, d: int = 2, *, capacity=True):
    profits = tuple(float(x) for x in rng.random(n))
    weights = tuple(tuple(float(x) for x in rng.random(n)) for _ in range(d - 1))
    caps = tuple(sum(r) / 2 for r in weights) if capacity else None
    return KnapsackInstance(profits, weights, caps)


def random_graph(rng: np.random.Generator, n: int, *, integer=True, density=0.35):
    edges = []
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < density:
                if integer:
                    edges.append((u, v, int(rng.integers(1, 10)), int(rng.integers(1, 10))))
                else:
                    edges.append((u, v, float(1 - rng.random()), float(1 - rng.random())))
    # a few parallel edges
    for _ in range(int(rng.integers(0, 3))):
        if edges:
            u, v, _, _ = edges[int(rng.integers(len(edges)))]
            edges.append((u, v, int(rng.integers(1, 10)), int(rng.integers(1, 10))))
    return BiGraph(n, tuple(edges), 0)


@pytest.fixture
def record_criterion():
    def record(number: int, passed: bool, detail: str) -> None:
        CRITERIA[number] = (passed, detail)
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        passed, detail = CRITERIA[number]
        terminalreporter.write_line(
            f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
        )
