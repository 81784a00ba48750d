import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wellkit.errors import BoundaryContactError
from wellkit.fixtures import CROSSING_RADII, identity_map, squaring_map
from wellkit.mesh import Interval1D, TriangulatedRect, build_map, map_from_function
from wellkit.oracles import clamp_oracle_rank_1d, safe_radius_grid
from wellkit.persistence import critical_values, persistence_diagram
from wellkit.wellcore import (ComponentSnapshot, WellDiagram, build_well_module, class_robustness,
                              components_at, inclusion_matrix, left_filtration, local_degree,
                              robustness, sweep_diagram, terminal_critical_values, well_diagram,
                              well_function, well_group_at, winding_number)

INF = math.inf


def line(values, lo=0.0, hi=None):
    n = len(values)
    return build_map(Interval1D(lo, float(n - 1) if hi is None else hi, n), values)


# ------------------------------------------------------------ fixture values

def test_fixture_well_values(fig1):
    w = well_function(fig1, 0.0)
    orig = ~w.mesh.zero_mask
    assert w.vertex_values[orig].tolist() == [4, 3, 2, 1, 4]
    assert np.count_nonzero(w.mesh.zero_mask) == 4
    assert np.all(w.vertex_values[w.mesh.zero_mask] == 0)


def test_two_d_identity_well_values():
    # the y range is offset so that no mesh edge passes through the origin
    fm = map_from_function(TriangulatedRect(-1.0, 1.0, -1.05, 1.0, 10, 10),
                           lambda p: (p[0], p[1]))
    w = well_function(fm, (0.0, 0.0))
    np.testing.assert_allclose(w.vertex_values, np.linalg.norm(w.mesh.points, axis=1),
                               atol=1e-15)


def test_fixture_components(fig1):
    w = well_function(fig1, 0.0)
    comps = components_at(w, 1.5)
    assert len(comps) == 3
    assert sorted(c.degree for c in comps if c.degree is not None) == [-1, 0, 1]
    # the merged right pair is the degree-0 component
    merged = [c for c in comps if c.degree == 0]
    assert len(merged) == 1 and not merged[0].well
    assert [c.degree for c in components_at(w, 0.0)] == [1, -1, 1, -1]
    big = components_at(w, 10.0)
    assert len(big) == 1 and big[0].touches_domain_boundary


def test_table_ranks(fig1):
    snaps = [well_group_at(fig1, 0.0, r) for r in CROSSING_RADII]
    assert [s.homology_rank for s in snaps] == [4, 3, 2, 1]
    assert [s.rank for s in snaps] == [4, 2, 2, 0]


def test_constant_map_has_no_wells():
    fm = line([0.5] * 5)
    for r in (0.0, 0.3, 1.0):
        assert well_group_at(fm, 0.0, r).rank == 0
    assert terminal_critical_values(fm, 0.0) == []
    m = build_well_module(fm, 0.0)
    assert m.ranks == (0,) and m.radii == (0.0,)
    assert well_diagram(m) == WellDiagram((), 0)
    lf = left_filtration(m)
    assert lf.ranks == ((0,), (0,))


# ------------------------------------------------------------------- degrees

def _snap(left, right):
    return ComponentSnapshot(0.0, (1,), (left, right), None, False, False)


def test_degree_examples_1d():
    fm = line([-1.0, 1.0, 1.0])
    assert local_degree(fm, 0.0, _snap(-1, 1)) == 1
    assert local_degree(fm, 0.0, _snap(1, -1)) == -1
    assert local_degree(fm, 0.0, _snap(-1, -1)) == 0


def test_degree_refuses_boundary_component(fig1):
    w = well_function(fig1, 0.0)
    (c,) = components_at(w, 10.0)
    with pytest.raises(BoundaryContactError):
        local_degree(w, None, c)
    assert local_degree(w, None, c, extended=True) == 0


def test_squaring_loop_winds_twice():
    t = np.linspace(0, 2 * np.pi, 400, endpoint=False)
    z = np.exp(1j * t) ** 2
    assert winding_number(np.column_stack([z.real, z.imag])) == 2
    assert winding_number(np.column_stack([np.cos(t), -np.sin(t)])) == -1
    assert winding_number([(2, 0), (3, 0), (3, 1)]) == 0


def test_squaring_map_component_degree():
    fm = squaring_map(20)
    w = well_function(fm, (1e-3, 2e-3))
    zeros = np.flatnonzero(w.mesh.zero_mask)
    assert sorted(w.mesh.zero_index[zeros].tolist()) == [1, 1]
    comps = [c for c in components_at(w, 0.05) if any(w.mesh.zero_mask[list(c.members)])]
    assert len(comps) == 1 and comps[0].degree == 2 and comps[0].well


def test_identity_2d_rank_until_boundary():
    fm = identity_map(10)
    a = (0.013, -0.007)
    w = well_function(fm, a)
    reach = float(np.min(w.vertex_values[w.mesh.boundary]))
    for r in (0.0, 0.3, 0.9 * reach):
        assert well_group_at(w, r=r).rank == 1
    assert well_group_at(w, r=reach).rank == 0
    ext = well_function(fm, a, extended=True)
    assert well_group_at(ext, r=5.0).rank == 1


def test_graze_resolves_to_nothing_robust():
    fm = line([1.0, 0.0, 1.0])
    vals = [p.value for p in robustness(fm, 0.0, jitter=True)]
    assert len(vals) in (0, 2)
    assert all(v < 1e-6 for v in vals)


# --------------------------------------------------------------- the module

def test_fixture_module(fig1):
    m = build_well_module(fig1, 0.0)
    assert m.terminal_values == (1.0, 3.0)
    assert m.radii == (0.5, 2.0, 4.0)
    assert m.ranks == (4, 2, 0)
    assert m.quotient_ranks == (2, 1, 0)
    assert tuple(k.rank for k in m.vanishing) == (2, 1, 0)
    assert [m.multiplicity(i) for i in (1, 2)] == [2, 2]
    assert m.boundary_flags == (False, False)


def test_terminal_routes_agree(fig1):
    assert terminal_critical_values(fig1, 0.0) == [1.0, 3.0]
    assert terminal_critical_values(fig1, 0.0, method="resample") == [1.0, 3.0]
    with pytest.raises(ValueError):
        terminal_critical_values(fig1, 0.0, method="guess")


def test_fixture_left_filtration(fig1):
    m = build_well_module(fig1, 0.0)
    lf = left_filtration(m)
    # frozen from the chain-tracked construction
    assert lf.ranks == ((2, 3, 3), (4, 4, 3))
    assert len(lf.compatible_basis) == 4
    kinds = sorted((b.kind, b.robustness) for b in lf.compatible_basis)
    assert kinds == [("coker", 3.0), ("ker", 1.0), ("ker", 1.0), ("ker", 3.0)]


def test_fixture_diagram_and_robustness(fig1):
    d = well_diagram(build_well_module(fig1, 0.0))
    assert d.as_pairs() == [(1.0, 2), (3.0, 2)]
    assert d.mass == d.rank_at_zero == 4
    assert sweep_diagram(fig1, 0.0) == d
    assert [p.value for p in robustness(fig1, 0.0)] == [3.0, 3.0, 1.0, 1.0]


def test_single_crossing():
    fm = line([-1.0, 2.0, 3.0])
    assert terminal_critical_values(fm, 0.0) == [1.0]
    m = build_well_module(fm, 0.0)
    assert m.ranks == (1, 0) and m.boundary_flags == (True,)
    lf = left_filtration(m)
    assert lf.ranks[0][0] == 0 and lf.ranks[1][0] == 1
    (p,) = robustness(fm, 0.0)
    assert p.value == 1.0 and p.boundary_limited
    d = well_diagram(m)
    assert d.points[0].flag == "boundary"


def test_two_separate_crossings():
    fm = line([-2.0, 1.0, 4.0, -3.0])
    us = terminal_critical_values(fm, 0.0)
    assert us == [2.0, 3.0]
    m = build_well_module(fm, 0.0)
    assert m.ranks[0] == 2
    assert [m.multiplicity(i) for i in (1, 2)] == [1, 1]


def test_inclusion_matrix_direction(fig1):
    w = well_function(fig1, 0.0)
    s, t = well_group_at(w, r=0.5), well_group_at(w, r=1.5)
    f = inclusion_matrix(s, t)
    assert (f.rows, f.cols) == (3, 4)
    with pytest.raises(ValueError):
        inclusion_matrix(t, s)


def test_class_robustness_uses_basis(fig1):
    lf = left_filtration(build_well_module(fig1, 0.0))
    vals = sorted(class_robustness(lf, b.coords) for b in lf.compatible_basis)
    assert vals == [1.0, 1.0, 3.0, 3.0]
    assert class_robustness(lf, 0) == 0.0


def test_identity_box_and_extended():
    fm = identity_map(9)
    a = (0.01, 0.02)
    box = well_diagram(build_well_module(fm, a))
    (p,) = box.points
    assert p.flag == "boundary" and p.multiplicity == 1
    ext = well_diagram(build_well_module(fm, a, extended=True))
    assert ext.as_pairs() == [(INF, 1)]


def test_diagram_json_round_trip(fig1):
    d = well_diagram(build_well_module(fig1, 0.0))
    assert WellDiagram.from_json(d.to_json()) == d
    inf = WellDiagram.from_values([INF, 2.0, 0.0])
    assert WellDiagram.from_json(inf.to_json()) == inf
    with pytest.raises(ValueError):
        WellDiagram.from_values([-1.0])


# ---------------------------------------------------------------- properties

values_st = st.lists(st.floats(-1, 1, allow_nan=False).filter(lambda v: abs(v) > 1e-3),
                     min_size=2, max_size=14)


def _generic(vals):
    return len(set(abs(v) for v in vals)) == len(vals)


@given(values_st)
def test_module_invariants(vals):
    if not _generic(vals):
        return
    fm = line(vals, 0.0, 1.0)
    m = build_well_module(fm, 0.0)
    d = well_diagram(m)
    assert d.mass == m.ranks[0] == d.rank_at_zero
    assert d == sweep_diagram(fm, 0.0)
    assert terminal_critical_values(fm, 0.0) == terminal_critical_values(fm, 0.0,
                                                                          method="resample")
    lf = left_filtration(m)
    a_r, b_r = lf.ranks
    for i, g in enumerate(m.groups):
        assert b_r[i] - (a_r[i - 1] if i else 0) == g.rank
    for i in range(1, len(b_r)):
        assert lf.A[i].contains(lf.A[i - 1])
        assert lf.B[i - 1].contains(lf.B[i])
    # diagram values are homological critical values or boundary events
    w = well_function(fm, 0.0)
    allowed = set(critical_values(persistence_diagram(fm, 0.0)))
    allowed |= set(w.vertex_values[w.mesh.boundary].tolist())
    assert all(v in allowed for v in d.values() if v != INF)
    rob = [p.value for p in robustness(w)]
    assert max(rob, default=0.0) == max([v for v in d.values()], default=0.0)
    assert sorted(rob) == d.values()


@given(values_st)
def test_rank_non_increasing(vals):
    if not _generic(vals):
        return
    w = well_function(line(vals, 0.0, 1.0), 0.0)
    ranks = [well_group_at(w, r=r).rank for r in np.linspace(0, 1.2, 25)]
    assert all(x >= y for x, y in zip(ranks, ranks[1:]))


def test_oracle_equivalence_sample():
    rng = np.random.default_rng(77)
    for _ in range(60):
        n = int(rng.integers(3, 13))
        fm = line(rng.uniform(-1, 1, n), 0.0, 1.0)
        w = well_function(fm, 0.0)
        grid = safe_radius_grid(np.unique(w.vertex_values), float(w.vertex_values.max()) * 1.1,
                                20, 1e-4)
        for r in grid:
            assert well_group_at(w, r=r).rank == clamp_oracle_rank_1d(fm, 0.0, r)


def test_dimension_mismatch_rejected():
    fm = map_from_function(TriangulatedRect(0, 1, 0, 1, 3, 3), lambda p: (p[0] - 0.3,))
    with pytest.raises(ValueError):
        well_function(fm, 0.0)
