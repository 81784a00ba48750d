import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wellkit.errors import NonGenericError, SizeLimitError
from wellkit.mesh import Interval1D, TriangulatedRect, build_map, refine
from wellkit.persistence import (Cell, Filtration, PersistenceDiagram, PersistencePair,
                                 bottleneck_small, critical_values, lower_star_filtration,
                                 persistence_diagram, reduce, sublevel_filtration, well_values)

INF = math.inf


def pd(*pairs):
    return PersistenceDiagram(tuple(PersistencePair(0, b, d) for b, d in pairs))


def test_four_crossing_filtration_and_diagram(fig1):
    filt = sublevel_filtration(fig1, 0.0)
    verts = [c for c in filt.cells if c.dim == 0]
    assert len(verts) == 9
    assert sorted(c.value for c in verts) == [0, 0, 0, 0, 1, 2, 3, 4, 4]
    d = reduce(filt)
    finite = sorted(p.death for p in d.off_diagonal(0) if p.death != INF)
    assert finite == [1, 2, 3]
    assert len(d.essential(0)) == 1
    assert critical_values(d) == [0, 1, 2, 3]


def test_single_edge_filtration():
    fm = build_map(Interval1D(0.0, 1.0, 2), [-1.0, 1.0])
    filt = sublevel_filtration(fm, 0.0)
    assert [(c.dim, c.value) for c in filt.cells] == [(0, 0.0), (0, 1.0), (0, 1.0),
                                                     (1, 1.0), (1, 1.0)]


def test_constant_map_enters_at_distance():
    fm = build_map(Interval1D(0.0, 1.0, 4), [0.7] * 4)
    filt = sublevel_filtration(fm, 0.2)
    assert all(c.value == pytest.approx(0.5) for c in filt.cells)
    d = reduce(filt)
    (p,) = d.off_diagonal()
    assert p.birth == pytest.approx(0.5) and p.death == INF


def test_trivial_reductions():
    d = reduce(Filtration((Cell(0, 0, 2.0, ()),)))
    assert d.pairs == (PersistencePair(0, 2.0, INF),)
    f = Filtration((Cell(0, 0, 0.0, ()), Cell(1, 0, 0.0, ()), Cell(2, 1, 0.0, (0, 1))))
    d = reduce(f)
    assert d.essential() == [PersistencePair(0, 0.0, INF)]
    assert PersistencePair(0, 0.0, 0.0) in d.pairs


def test_malformed_filtrations():
    with pytest.raises(ValueError):
        Filtration((Cell(0, 0, 1.0, ()), Cell(1, 0, 0.0, ())))
    with pytest.raises(ValueError):
        Filtration((Cell(0, 0, 0.0, ()), Cell(1, 1, 0.0, (5,))))
    with pytest.raises(ValueError):
        Filtration((Cell(0, 0, 0.0, ()), Cell(1, 0, 0.0, ()), Cell(2, 2, 1.0, (0, 1))))


def test_non_generic_rejected():
    fm = build_map(Interval1D(0.0, 1.0, 3), [-1.0, 0.0, 1.0])
    with pytest.raises(NonGenericError):
        sublevel_filtration(fm, 0.0)
    assert len(sublevel_filtration(fm, 0.0, jitter=True)) > 0


def test_critical_values_trivial():
    assert critical_values(PersistenceDiagram(())) == []
    assert critical_values(pd((0.0, INF))) == [0.0]


def test_bottleneck_examples():
    d = pd((0, 3), (1, 2))
    assert bottleneck_small(d, d) == 0
    assert bottleneck_small(pd((0, 3)), PersistenceDiagram(())) == 1.5
    assert bottleneck_small(pd((0, 3)), pd((0, 4))) == 1
    assert bottleneck_small(pd((0, INF)), pd((0, 3))) == INF
    assert bottleneck_small(pd((0, INF)), pd((1, INF))) == 1
    with pytest.raises(SizeLimitError):
        bottleneck_small(pd(*[(0, k + 1) for k in range(13)]), PersistenceDiagram(()))


def _exhaustive(a, b):
    """Every partial injection of a into b; unmatched points go to the diagonal."""
    def cost(p, q):
        if p[1] == INF or q[1] == INF:
            return abs(p[0] - q[0]) if p[1] == q[1] else INF
        return max(abs(p[0] - q[0]), abs(p[1] - q[1]))

    def diag(p):
        return INF if p[1] == INF else (p[1] - p[0]) / 2

    best = INF

    def rec(i, used, cur):
        nonlocal best
        if cur >= best:
            return
        if i == len(a):
            rest = [diag(q) for j, q in enumerate(b) if j not in used]
            best = min(best, max([cur, *rest]))
            return
        rec(i + 1, used, max(cur, diag(a[i])))
        for j, q in enumerate(b):
            if j not in used:
                rec(i + 1, used | {j}, max(cur, cost(a[i], q)))

    rec(0, frozenset(), 0.0)
    return best


pair_st = st.tuples(st.integers(0, 6), st.integers(1, 6)).map(lambda t: (t[0], t[0] + t[1]))
dgm_st = st.lists(st.one_of(pair_st, st.integers(0, 6).map(lambda b: (b, INF))), max_size=5)


@given(dgm_st, dgm_st)
def test_bottleneck_matches_exhaustive(a, b):
    got = bottleneck_small(pd(*a), pd(*b))
    assert got == _exhaustive([tuple(map(float, p)) for p in a], [tuple(map(float, p)) for p in b])


@given(dgm_st, dgm_st, dgm_st)
def test_bottleneck_triangle(a, b, c):
    da, db, dc = pd(*a), pd(*b), pd(*c)
    assert bottleneck_small(da, dc) <= bottleneck_small(da, db) + bottleneck_small(db, dc)
    assert bottleneck_small(da, db) == bottleneck_small(db, da)


def _shuffle_ties(filt, rng):
    cells = list(filt.cells)
    out, k = [], 0
    while k < len(cells):
        j = k
        while j < len(cells) and cells[j].value == cells[k].value:
            j += 1
        block = cells[k:j]
        # keep faces before cofaces: shuffle within each dimension
        for dim in sorted({c.dim for c in block}):
            part = [c for c in block if c.dim == dim]
            rng.shuffle(part)
            out.extend(part)
        k = j
    return Filtration(tuple(out))


def test_tie_breaking_invariance():
    rng = np.random.default_rng(3)
    for _ in range(30):
        n = int(rng.integers(3, 12))
        fm = build_map(Interval1D(0.0, 1.0, n), rng.integers(-3, 4, n) + 0.5)
        filt = sublevel_filtration(fm, 0.0)
        base = reduce(filt)
        for _ in range(3):
            assert reduce(_shuffle_ties(filt, rng)).same_points(base)
    dom = TriangulatedRect(0, 1, 0, 1, 4, 4)
    fm = build_map(dom, rng.integers(-2, 3, (16, 2)) + 0.25)
    filt = sublevel_filtration(fm, (0.0, 0.0))
    assert reduce(_shuffle_ties(filt, rng)).same_points(reduce(filt))


def test_essential_classes_count_components():
    rng = np.random.default_rng(8)
    for _ in range(20):
        fm = build_map(TriangulatedRect(0, 1, 0, 1, 5, 5), rng.uniform(-1, 1, (25, 2)))
        d = persistence_diagram(fm, (0.01, 0.02), jitter=True)
        assert len(d.essential(0)) == 1
        assert len(d.essential(1)) == 0


def test_born_at_zero_counts_zero_components():
    rng = np.random.default_rng(9)
    for _ in range(100):
        n = int(rng.integers(3, 16))
        vals = rng.uniform(-1, 1, n)
        fm = build_map(Interval1D(0.0, 1.0, n), vals)
        crossings = int(np.sum(vals[:-1] * vals[1:] < 0))
        d = persistence_diagram(fm, 0.0)
        born0 = [p for p in d.pairs if p.dim == 0 and p.birth == 0.0]
        assert len(born0) == crossings


def _sup_well_gap(f, g, a):
    rf, rg = refine(f, a), refine(g, a)
    wf, wg = well_values(rf, a), well_values(rg, a)
    xs = np.union1d(rf.points, rg.points)
    return float(np.max(np.abs(np.interp(xs, rf.points, wf) - np.interp(xs, rg.points, wg))))


def test_tame_stability_random():
    rng = np.random.default_rng(2024)
    worst = -INF
    for _ in range(500):
        n = int(rng.integers(3, 7))
        dom = Interval1D(0.0, 1.0, n)
        f = build_map(dom, rng.uniform(-1, 1, n))
        g = build_map(dom, rng.uniform(-1, 1, n))
        bound = _sup_well_gap(f, g, 0.0)
        got = bottleneck_small(persistence_diagram(f, 0.0), persistence_diagram(g, 0.0))
        worst = max(worst, got - bound)
    assert worst <= 1e-9


def test_lower_star_checks_shape():
    fm = build_map(Interval1D(0.0, 1.0, 3), [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        lower_star_filtration(fm, [1.0])


def test_json_round_trip(fig1):
    d = persistence_diagram(fig1, 0.0)
    back = PersistenceDiagram.from_json(d.to_json())
    assert back.same_points(d)
