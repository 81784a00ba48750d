import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wellkit.errors import SizeLimitError
from wellkit.matching import (brute_force_bottleneck, bottleneck, expand, gap,
                              sorted_differences, uncross)
from wellkit.wellcore import DiagramPoint, WellDiagram

INF = math.inf


def test_examples():
    d = WellDiagram((DiagramPoint(1.0, 2), DiagramPoint(3.0, 2)), 4)
    assert bottleneck(d, d).bottleneck == 0
    r = bottleneck([1, 3], [2])
    assert r.pairs == ((1.0, 0.0), (3.0, 2.0)) and r.bottleneck == 1
    assert bottleneck([INF], [INF]).bottleneck == 0
    assert bottleneck([INF], []).bottleneck == INF
    assert brute_force_bottleneck([1, 3], [2]) == 1
    assert brute_force_bottleneck([5], []) == 5
    assert brute_force_bottleneck(d, d) == 0
    assert brute_force_bottleneck([], []) == 0


def test_gap_conventions():
    assert gap(INF, INF) == 0 and gap(INF, 2.0) == INF and gap(1.0, 3.5) == 2.5


def test_expand_and_limits():
    assert expand([0.0, 2.0, 1.0]) == [1.0, 2.0]
    with pytest.raises(ValueError):
        expand([-1.0])
    with pytest.raises(SizeLimitError):
        expand([1.0] * 10, limit=5)
    with pytest.raises(SizeLimitError):
        expand(WellDiagram((DiagramPoint(1.0, 20_000),), 20_000))
    with pytest.raises(SizeLimitError):
        brute_force_bottleneck([1] * 5, [2] * 4)


def test_result_json():
    r = bottleneck([INF, 1.0], [2.0])
    assert r.to_json() == {"bottleneck": "inf", "pairs": [[1.0, 0.0], ["inf", 2.0]]}


point = st.one_of(st.integers(1, 8).map(float), st.floats(0.01, 5.0), st.just(INF))
dgm = st.lists(point, max_size=4)


@given(dgm, dgm)
def test_sorted_matching_is_optimal(u, v):
    assert bottleneck(u, v).bottleneck == brute_force_bottleneck(u, v)


@given(dgm, dgm)
def test_pairs_are_inversion_free(u, v):
    r = bottleneck(u, v)
    left = [p for p, _ in r.pairs]
    right = [q for _, q in r.pairs]
    assert left == sorted(left) and right == sorted(right)
    assert r.bottleneck == max((gap(p, q) for p, q in r.pairs), default=0.0)


@given(dgm, dgm, dgm)
def test_metric(u, v, w):
    d = lambda x, y: bottleneck(x, y).bottleneck  # noqa: E731
    assert d(u, u) == 0
    assert d(u, v) == d(v, u)
    assert d(u, w) <= d(u, v) + d(v, w) + 1e-12
    if d(u, v) == 0:
        assert expand(u) == expand(v)


@given(st.lists(st.tuples(st.floats(0, 10), st.floats(0, 10)), min_size=2, max_size=6),
       st.data())
def test_exchange_step(pairs, data):
    u = [p for p, _ in pairs]
    v = [q for _, q in pairs]
    i = data.draw(st.integers(0, len(u) - 1))
    k = data.draw(st.integers(0, len(u) - 1))
    before = sorted_differences(u, v)
    nu, nv = uncross(u, v, i, k)
    after = sorted_differences(nu, nv)
    assert after <= before
    assert max(after) <= max(before)
