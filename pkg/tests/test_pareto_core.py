import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smoothpareto import (
    MAX,
    MIN,
    ContractViolation,
    GuardError,
    ObjectiveVector,
    ScoredSolution,
    Solution,
    dominates,
    filter_klp,
    filter_naive,
    filter_sweep2d,
    pareto_bruteforce,
)
from smoothpareto.pareto_core import format_scalar, maxima_indices

PW = (MAX, MIN)


def pw(p, w):
    return ObjectiveVector((p, w), PW)


def scored(bits, values, dirs=PW):
    return ScoredSolution(Solution.parse(bits), ObjectiveVector(values, dirs))


def points_from(values, dirs):
    n = max(1, (len(values) - 1).bit_length())
    out = []
    for i, v in enumerate(values):
        bits = format(i, f"0{n}b")
        out.append(scored(bits, v, dirs))
    return out


# -- dominance -----------------------------------------------------------------


def test_dominates_examples():
    assert dominates(pw(3, 2), pw(2, 2))
    assert not dominates(pw(2, 2), pw(2, 2))
    assert not dominates(pw(3, 3), pw(2, 1))
    assert not dominates(pw(2, 1), pw(3, 3))


def test_dominates_rejects_mismatch():
    with pytest.raises(ContractViolation):
        dominates(pw(1, 1), ObjectiveVector((1, 1), (MIN, MIN)))
    with pytest.raises(ContractViolation):
        dominates(pw(1, 1), ObjectiveVector((1, 1, 1), (MAX, MIN, MIN)))


@pytest.mark.parametrize(
    "values",
    [(1,), (1, float("nan")), (1.0, float("inf")), (1, 2.0), (True, 1)],
)
def test_objective_vector_validation(values):
    with pytest.raises(ContractViolation):
        ObjectiveVector(values, (MAX,) * len(values))


def test_numpy_scalars_are_accepted():
    v = ObjectiveVector((np.int64(3), np.int64(2)), PW)
    assert v.values == (3, 2) and type(v.values[0]) is int


def test_solution_order_and_parse():
    assert Solution.parse("01") < Solution.parse("10")
    assert str(Solution.from_items(4, [0, 3])) == "1001"
    assert Solution.zeros(0).n == 0
    with pytest.raises(ContractViolation):
        Solution((0, 2))


def test_format_scalar():
    assert format_scalar(3) == "3"
    assert format_scalar(0.1) == "0.1"
    assert format_scalar(2.0) == "2.0"


vec3 = st.tuples(*(st.integers(-3, 3) for _ in range(3)))


@given(vec3, vec3)
def test_antisymmetry(a, b):
    dirs = (MAX, MIN, MIN)
    va, vb = ObjectiveVector(a, dirs), ObjectiveVector(b, dirs)
    assert not (dominates(va, vb) and dominates(vb, va))


@given(vec3, vec3, vec3)
def test_transitivity(a, b, c):
    dirs = (MIN, MAX, MIN)
    va, vb, vc = (ObjectiveVector(x, dirs) for x in (a, b, c))
    if dominates(va, vb) and dominates(vb, vc):
        assert dominates(va, vc)


# -- filters -------------------------------------------------------------------

EXAMPLE = [(0, 0), (1, 2), (2, 1), (3, 3)]


@pytest.mark.parametrize("flt", [filter_naive, filter_sweep2d, filter_klp])
def test_filter_examples(flt):
    pts = points_from(EXAMPLE, PW)
    assert flt(pts).values() == [(0, 0), (2, 1), (3, 3)]
    single = [scored("1", (5, 5))]
    assert flt(single).pairs() == [((1,), (5, 5))]
    twins = [scored("10", (1, 1)), scored("01", (1, 1))]
    assert flt(twins).pairs() == [((0, 1), (1, 1))]
    assert len(flt([])) == 0


def test_sweep_rejects_d3():
    with pytest.raises(ContractViolation):
        filter_sweep2d([scored("0", (1, 1, 1), (MAX, MIN, MIN))])


def test_sweep_idempotent_on_front():
    front = filter_naive(points_from(EXAMPLE, PW))
    again = filter_sweep2d(list(front))
    assert again.pairs() == front.pairs()


def test_klp_d3_example():
    dirs = (MAX, MAX, MAX)
    pts = [scored("0", (1, 1, 1), dirs), scored("1", (2, 2, 2), dirs)]
    assert filter_klp(pts).values() == [(2, 2, 2)]


def test_canonical_order():
    front = filter_naive(points_from(EXAMPLE, PW))
    front.check()
    ws = [v[1] for v in front.values()]
    ps = [v[0] for v in front.values()]
    assert ws == sorted(ws) and ps == sorted(ps)


def _random_points(rng, m, d, *, ties=False):
    dirs = tuple(MAX if i % 2 == 0 else MIN for i in range(d))
    nbits = max(1, (m - 1).bit_length())
    pts = []
    for i in range(m):
        if ties:
            vals = tuple(int(x) for x in rng.integers(0, 6, size=d))
        else:
            vals = tuple(float(x) for x in rng.random(d))
        pts.append(ScoredSolution(Solution(tuple((i >> k) & 1 for k in range(nbits))), ObjectiveVector(vals, dirs)))
    return pts


@pytest.mark.parametrize(
    "m,d,ties",
    [(1000, 2, False), (500, 3, False), (200, 4, False), (400, 3, True), (300, 4, True), (10_000, 2, False), (10_000, 3, False)],
)
def test_filters_agree(m, d, ties):
    rng = np.random.default_rng(m * 10 + d + ties)
    pts = _random_points(rng, m, d, ties=ties)
    ref = filter_naive(pts)
    if m <= 1000:
        ref.check()
    assert filter_klp(pts).pairs() == ref.pairs()
    if d == 2:
        assert filter_sweep2d(pts).pairs() == ref.pairs()


def test_filters_agree_d4_large():
    rng = np.random.default_rng(4)
    pts = _random_points(rng, 10_000, 4)
    assert filter_klp(pts).pairs() == filter_naive(pts).pairs()


small_pts = st.lists(
    st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(0, 4)),
    min_size=0,
    max_size=40,
)


@settings(max_examples=150, deadline=None)
@given(small_pts, st.randoms(use_true_random=False))
def test_filter_properties(vals, rnd):
    dirs = (MAX, MIN, MIN)
    pts = points_from(vals, dirs) if vals else []
    ref = filter_naive(pts)
    assert filter_klp(pts).pairs() == ref.pairs()
    # idempotent
    assert filter_naive(list(ref)).pairs() == ref.pairs()
    # independent of input order
    shuffled = list(pts)
    rnd.shuffle(shuffled)
    assert filter_klp(shuffled).pairs() == ref.pairs()
    # every input point is matched or dominated by a kept one
    for p in pts:
        assert any(
            q.objective.values == p.objective.values or dominates(q.objective, p.objective)
            for q in ref
        )


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6)), max_size=40))
def test_sweep_matches_naive_with_ties(vals):
    pts = points_from(vals, PW) if vals else []
    assert filter_sweep2d(pts).pairs() == filter_naive(pts).pairs()


def test_maxima_indices_keeps_first_duplicate():
    canon = [(1, 2), (2, 1), (1, 2), (3, 3)]
    assert sorted(maxima_indices(canon)) == [0, 1]
    canon3 = [(1, 1, 1), (1, 1, 1), (0, 2, 2)]
    assert sorted(maxima_indices(canon3)) == [0, 2]


# -- brute force ---------------------------------------------------------------


def test_bruteforce_examples():
    profits, weights = (1, 2), (1, 1)

    def ev(sol):
        p = sum(a for a, b in zip(profits, sol.bits) if b)
        w = sum(a for a, b in zip(weights, sol.bits) if b)
        return pw(p, w)

    front = pareto_bruteforce(ev, 2)
    assert front.values() == [(0, 0), (2, 1), (3, 2)]
    assert [str(s) for s in front.solutions()] == ["00", "01", "11"]

    def ev_exp(sol):
        v = sum(2 ** (i + 1) for i, b in enumerate(sol.bits) if b)
        return pw(v, v)

    assert len(pareto_bruteforce(ev_exp, 3)) == 8

    empty = pareto_bruteforce(lambda s: pw(0, 0), 0)
    assert empty.pairs() == [((), (0, 0))]


def test_bruteforce_guard():
    with pytest.raises(GuardError, match="limit of 25"):
        pareto_bruteforce(lambda s: pw(0, 0), 26)


def test_random_tuples_python_fallback():
    # integers too large for the numpy block kernel
    big = 2**70
    rnd = random.Random(3)
    vals = [(rnd.randint(0, 5) * big, rnd.randint(0, 5) * big) for _ in range(30)]
    pts = points_from(vals, PW)
    assert filter_naive(pts).pairs() == filter_sweep2d(pts).pairs() == filter_klp(pts).pairs()
